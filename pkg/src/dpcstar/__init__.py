"""Directional path-consistency (DPC, DPC*) for binary constraint networks,
with checkers for the constraint languages these algorithms decide."""

from .consistency import enforce_ac, enforce_strong_pc, is_path_consistent, is_strongly_dpc
from .core import (
    Assignment,
    Domain,
    Network,
    NetworkError,
    Relation,
    Verdict,
    is_solution,
    relation_algebra,
    relation_compose,
    relation_image,
    restrict,
)
from .dpc import ExtractionError, SolveOutcome, default_order, dpc, dpc_star, extract_solution
from .elimination import CheckResult, Language, check_helly, check_vep_instance, eliminate
from .generators import (
    GenerationError,
    GenParams,
    Instance,
    gen_inconsistent_variant,
    gen_majority_closed_network,
    gen_majority_op,
    gen_random_network,
    gen_tree_preserving_network,
)
from .graph import ConstraintGraph, fill_in, find_peo, induced_width, is_chordal, is_peo, mcs_order
from .majority import (
    MajorityOperation,
    NaryRelation,
    PreconditionError,
    TreeDomain,
    binarize,
    binary_closure,
    close_under,
    is_2_decomposable,
    is_closed_under,
    is_tree_preserving,
    standard_tree_majority,
    tree_closure_equivalence,
)
from .oracle import SearchSpaceError, check_global_consistency, enumerate_solutions, is_consistent

__version__ = "0.1.0"
