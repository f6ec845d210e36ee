"""Hata graphs of fractal squares and the connectedness certificate.

Two pieces f_d(K) and f_d'(K) of the same level meet iff the translates
K^(2) + d and K^(2) + d' do, so the overlap test runs on closed cells of the
level-2 pattern placed at the two digit positions.  Because every piece carries the
same pattern, the answer only depends on the offset d' - d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .core import DigitSet, check_budget, expand_digits, level_mask

CONNECTED = "connected"
DISCONNECTED = "disconnected"

# neighbour offsets with dx > 0 or (dx == 0 and dy > 0); the rest follow by symmetry
_HALF_OFFSETS = ((1, -1), (1, 0), (1, 1), (0, 1))


def _dilate1(v: np.ndarray) -> np.ndarray:
    out = v.copy()
    out[1:] |= v[:-1]
    out[:-1] |= v[1:]
    return out


def offset_touch(P: np.ndarray, dx: int, dy: int) -> bool:
    """Do closed cells of P and of P shifted by (dx, dy) * side share a point?

    (dx, dy) must be a nonzero vector in {-1, 0, 1}^2.
    """
    if dx < 0 or (dx == 0 and dy < 0):
        dx, dy = -dx, -dy
    if (dx, dy) == (1, 0):
        return bool(np.any(P[-1, :] & _dilate1(P[0, :])))
    if (dx, dy) == (0, 1):
        return bool(np.any(P[:, -1] & _dilate1(P[:, 0])))
    if (dx, dy) == (1, 1):
        return bool(P[-1, -1] and P[0, 0])
    if (dx, dy) == (1, -1):
        return bool(P[-1, 0] and P[0, -1])
    raise ValueError(f"offset {(dx, dy)} is not a unit neighbour offset")


def adjacency(D: DigitSet, d, d2, basis: int = 2, budget=None) -> bool:
    """f_d(K) meets f_d2(K), tested on K^(basis) + d against K^(basis) + d2.

    basis = 2 is already exact; larger bases give the same answer and serve as
    a consistency check.  basis = 1 is the naive box test and can overstate.
    """
    d, d2 = tuple(d), tuple(d2)
    if d == d2:
        raise ValueError("adjacency needs two distinct digits")
    for x in (d, d2):
        if x not in D:
            raise ValueError(f"{x} is not a digit of D")
    dx, dy = d2[0] - d[0], d2[1] - d[1]
    if max(abs(dx), abs(dy)) > 1:
        return False
    P = level_mask(D, basis, budget)
    return offset_touch(P, dx, dy)


def adjacency_level2(D: DigitSet, d, d2) -> bool:
    return adjacency(D, d, d2, basis=2)


@dataclass(frozen=True)
class HataGraph:
    order: int
    level: int
    vertices: tuple  # sorted cells of D_n
    edges: tuple  # sorted pairs (u, v) with u < v
    adjacency_basis: int

    def components(self) -> int:
        idx = {v: k for k, v in enumerate(self.vertices)}
        n = len(self.vertices)
        if not self.edges:
            return n
        rows = [idx[u] for u, _ in self.edges]
        cols = [idx[v] for _, v in self.edges]
        g = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
        k, _ = connected_components(g, directed=False)
        return int(k)

    def is_connected(self) -> bool:
        return self.components() == 1

    def to_json(self) -> dict:
        return {
            "n": self.level,
            "vertices": [list(v) for v in self.vertices],
            "edges": [[list(u), list(v)] for u, v in self.edges],
            "basis": self.adjacency_basis,
            "components": self.components(),
        }


def hata_graph(D: DigitSet, n: int = 1, budget=None, basis: int | None = None) -> HataGraph:
    """Hata graph on the level-n cells.

    Overlaps are decided on the level-``basis`` pattern placed in each piece
    (default 2n: the second approximation of the order-N^n system).
    """
    if n < 1:
        raise ValueError("level must be >= 1")
    basis = 2 * n if basis is None else basis
    if basis < 1:
        raise ValueError("basis level must be >= 1")
    check_budget(D.order, basis, budget)
    P = level_mask(D, basis, budget)
    touch = {off: offset_touch(P, *off) for off in _HALF_OFFSETS}
    verts = sorted(expand_digits(D, n, budget).cells)
    vset = set(verts)
    edges = []
    for u in verts:
        for (dx, dy), ok in touch.items():
            if not ok:
                continue
            v = (u[0] + dx, u[1] + dy)
            if v in vset:
                edges.append((u, v) if u < v else (v, u))
    edges.sort()
    return HataGraph(D.order, n, tuple(verts), tuple(edges), basis)


def connected_certificate(D: DigitSet) -> str:
    """Decides connectedness of K: it is connected iff its first Hata graph is."""
    return CONNECTED if hata_graph(D, 1).is_connected() else DISCONNECTED
