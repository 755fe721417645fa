from pathlib import Path

import pytest

from dpcstar import io as nio

DATA = Path(__file__).resolve().parent.parent / "data"

# criterion number -> (passed, detail), filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def data_dir():
    return DATA


def load_doc(name):
    return nio.read_network(DATA / name)


@pytest.fixture
def ex1():
    return load_doc("example1.json").network


@pytest.fixture
def ex3():
    return load_doc("example3.json").network


@pytest.fixture
def ex5_doc():
    return load_doc("example5.json")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        tr.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
