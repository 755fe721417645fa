"""Dense block workspace shared by the propagation algorithms.

All relations of a network are laid out in one square bool matrix whose
rows/columns are the concatenated domain values of the variables in a given
order. Block (i, j) holds R_ij and block (j, i) its transpose; absent pairs
hold all-ones blocks and are tracked in `present`. Diagonal blocks are free
for the caller (the strong-PC enforcer keeps the active domains there).
Memory is quadratic in the total number of values, which is fine for the
desk-scale instances this package targets.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import Network


def pack_rows(a: np.ndarray) -> np.ndarray:
    """Bit-pack each row of a bool matrix into the narrowest unsigned words
    that hold it (uint8 up to uint32 as one word, else several uint64)."""
    bits = np.packbits(a, axis=1, bitorder="little")
    nbytes = bits.shape[1]
    width = next((w for w in (1, 2, 4) if nbytes <= w), 8)
    pad = (-nbytes) % width
    if pad or nbytes == 0:
        bits = np.pad(bits, ((0, 0), (0, pad or width)))
    return np.ascontiguousarray(bits).view(np.dtype(f"<u{width}"))


class Scratch:
    """Reusable flat buffers; fresh large allocations dominate otherwise."""

    def __init__(self):
        self._bufs: dict[np.dtype, np.ndarray] = {}

    def get(self, shape: tuple[int, int], dtype) -> np.ndarray:
        dtype = np.dtype(dtype)
        size = shape[0] * shape[1]
        buf = self._bufs.get(dtype)
        if buf is None or buf.size < size:
            buf = np.empty(max(size, 1), dtype=dtype)
            self._bufs[dtype] = buf
        return buf[:size].reshape(shape)


def rows_meet(p: np.ndarray, q: np.ndarray, scratch: Scratch | None = None) -> np.ndarray:
    """out[x, y] = rows p[x] and q[y] share a set bit.

    With p = pack(R_ik) and q = pack(R_jk) this is R_ik ∘ R_kj. With a
    scratch pool the result lives in (and is overwritten through) the pool.
    """
    scratch = scratch or Scratch()
    shape = (p.shape[0], q.shape[0])
    out = scratch.get(shape, bool)
    tmp = scratch.get(shape, p.dtype)
    np.bitwise_and(p[:, 0, None], q[None, :, 0], out=tmp)
    np.not_equal(tmp, 0, out=out)
    if p.shape[1] > 1:
        hit = np.empty(shape, dtype=bool)
        for w in range(1, p.shape[1]):
            np.bitwise_and(p[:, w, None], q[None, :, w], out=tmp)
            np.not_equal(tmp, 0, out=hit)
            out |= hit
    return out


class Workspace:
    def __init__(self, net: Network, order: Sequence[str]):
        self.order = list(order)
        self.pos = {v: i for i, v in enumerate(self.order)}
        sizes = np.array([len(net.domains[v]) for v in self.order], dtype=np.intp)
        self.sizes = sizes
        self.offsets = np.concatenate([[0], np.cumsum(sizes)])
        total = int(self.offsets[-1])
        self.M = np.ones((total, total), dtype=bool)
        n = len(self.order)
        self.present = np.zeros((n, n), dtype=bool)
        self.scratch = Scratch()
        self.dom = np.concatenate([net.active[v] for v in self.order]) if n else np.zeros(0, bool)
        for u, v in net.scopes():
            i, j = self.pos[u], self.pos[v]
            m = net.matrix(u, v)
            self.M[self.blk(i), self.blk(j)] = m
            self.M[self.blk(j), self.blk(i)] = m.T
            self.present[i, j] = self.present[j, i] = True

    def blk(self, i: int) -> slice:
        return slice(int(self.offsets[i]), int(self.offsets[i + 1]))

    def rows(self, idx: np.ndarray) -> np.ndarray:
        """Concatenated value indices of the variables at positions idx."""
        if len(idx) == 0:
            return np.zeros(0, dtype=np.intp)
        return np.concatenate([np.arange(self.offsets[i], self.offsets[i + 1]) for i in idx])

    def span(self, idx: np.ndarray) -> slice | None:
        """Slice covering rows(idx) when idx is a run of consecutive positions."""
        if len(idx) and idx[-1] - idx[0] == len(idx) - 1:
            return slice(int(self.offsets[idx[0]]), int(self.offsets[idx[-1] + 1]))
        return None

    def starts(self, idx: np.ndarray) -> np.ndarray:
        """Start offsets of each variable's block inside self.rows(idx)."""
        return np.concatenate([[0], np.cumsum(self.sizes[idx])[:-1]]).astype(np.intp)

    def block_any(self, sub: np.ndarray, idx: np.ndarray) -> np.ndarray:
        """(p, p) matrix: block (a, b) of sub (laid out as rows(idx)²) is nonempty."""
        st = self.starts(idx)
        return np.logical_or.reduceat(np.logical_or.reduceat(sub, st, axis=0), st, axis=1)

    def domain_empty(self, i: int) -> bool:
        return not self.dom[self.blk(i)].any()

    def write_back(self, net: Network) -> None:
        for v in self.order:
            net.active[v] = self.dom[self.blk(self.pos[v])].copy()
        index = net.index
        n = len(self.order)
        for i in range(n):
            for j in range(i + 1, n):
                if self.present[i, j]:
                    u, v = self.order[i], self.order[j]
                    if index(u) > index(v):
                        u, v, i2, j2 = v, u, j, i
                    else:
                        i2, j2 = i, j
                    net.set_relation(u, v, self.M[self.blk(i2), self.blk(j2)])
