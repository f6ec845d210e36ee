"""Components, holes and the periodic complement of approximations K^(n).

Occupied cells are closed squares, so two of them meet when they share an edge
or a corner (8-adjacency).  Empty cells are open regions, which only connect
through a shared edge (4-adjacency).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .core import DigitSet, check_budget, level_mask

EIGHT = np.ones((3, 3), dtype=bool)
FOUR = ndimage.generate_binary_structure(2, 1)

UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class CellGrid:
    order: int
    level: int
    occupancy: np.ndarray  # [i, j], True where the cell belongs to K^(n)

    @property
    def side(self) -> int:
        return self.order ** self.level

    def popcount(self) -> int:
        return int(self.occupancy.sum())


def rasterize(D: DigitSet, n: int, budget: int | None = None) -> CellGrid:
    return CellGrid(D.order, n, level_mask(D, n, budget))


# -- exact diameters ---------------------------------------------------------

def _hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _candidate_corners(xs: np.ndarray, ys: np.ndarray):
    # a farthest pair of corners is extreme in its column, so keep only the
    # lowest and highest cell of every column
    order = np.lexsort((ys, xs))
    xs, ys = xs[order], ys[order]
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    ends = np.r_[starts[1:], len(xs)] - 1
    cx = xs[starts]
    lo = ys[starts]
    hi = ys[ends] + 1
    pts = []
    for x, a, b in zip(cx.tolist(), lo.tolist(), hi.tolist()):
        pts.extend(((x, a), (x + 1, a), (x, b), (x + 1, b)))
    return pts


def cells_diameter_sq(xs, ys) -> int:
    """Squared Euclidean diameter, in cell units, of a union of closed unit cells."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    if xs.size == 0:
        return 0
    hull = np.array(_hull(_candidate_corners(xs, ys)), dtype=object)
    if len(hull) == 1:
        return 0
    hx = hull[:, 0][:, None] - hull[:, 0][None, :]
    hy = hull[:, 1][:, None] - hull[:, 1][None, :]
    return int((hx * hx + hy * hy).max())


# -- components of K^(n) -----------------------------------------------------

@dataclass
class ComponentSummary:
    level: int
    count: int
    labels: np.ndarray  # 0 on empty cells, 1..count on occupied ones
    diameters_sq: list  # Fraction, in units of the unit square

    def to_json(self) -> dict:
        return {
            "n": self.level,
            "beta0": self.count,
            "diameters": [str(d) for d in self.diameters_sq],
        }


def components(grid: CellGrid, diameters: bool = True) -> ComponentSummary:
    labels, count = ndimage.label(grid.occupancy, structure=EIGHT)
    diams = []
    if diameters and count:
        scale = grid.side ** 2
        for k, sl in enumerate(ndimage.find_objects(labels), start=1):
            sub = labels[sl] == k
            xs, ys = np.nonzero(sub)
            d = cells_diameter_sq(xs + sl[0].start, ys + sl[1].start)
            diams.append(Fraction(d, scale))
    return ComponentSummary(grid.level, int(count), labels, diams)


@dataclass
class _Boundary:
    """Component bookkeeping of one level, reduced to what the next level needs.

    Each side array holds, per boundary cell, the component id or -1.
    """

    side: int
    count: int
    left: np.ndarray
    right: np.ndarray
    bottom: np.ndarray
    top: np.ndarray


def _boundary_from_mask(mask: np.ndarray) -> _Boundary:
    labels, count = ndimage.label(mask, structure=EIGHT)
    labels = labels.astype(np.int64) - 1
    return _Boundary(mask.shape[0], int(count), labels[0, :].copy(), labels[-1, :].copy(),
                     labels[:, 0].copy(), labels[:, -1].copy())


def _shift_pairs(a: np.ndarray, b: np.ndarray):
    """Index pairs (p, q) with |p - q| <= 1 where both sides are occupied."""
    out_a, out_b = [], []
    n = len(a)
    for e in (-1, 0, 1):
        lo, hi = max(0, -e), min(n, n - e)
        pa = a[lo:hi]
        pb = b[lo + e:hi + e]
        ok = (pa >= 0) & (pb >= 0)
        out_a.append(pa[ok])
        out_b.append(pb[ok])
    return np.concatenate(out_a), np.concatenate(out_b)


def _refine(D: DigitSet, prev: _Boundary) -> _Boundary:
    """Boundary data of K^(n+1) = union over d of (K^(n) + d)/N."""
    N = D.order
    digits = D.sorted()
    index = {d: k for k, d in enumerate(digits)}
    beta, M = prev.count, prev.side
    src, dst = [], []

    def link(ka, kb, ca, cb):
        src.append(ka * beta + ca)
        dst.append(kb * beta + cb)

    for (i, j), ka in index.items():
        kb = index.get((i + 1, j))
        if kb is not None:
            ca, cb = _shift_pairs(prev.right, prev.left)
            link(ka, kb, ca, cb)
        kb = index.get((i, j + 1))
        if kb is not None:
            ca, cb = _shift_pairs(prev.top, prev.bottom)
            link(ka, kb, ca, cb)
        kb = index.get((i + 1, j + 1))
        if kb is not None and prev.top[M - 1] >= 0 and prev.bottom[0] >= 0:
            link(ka, kb, np.array([prev.top[M - 1]]), np.array([prev.bottom[0]]))
        kb = index.get((i + 1, j - 1))
        if kb is not None and prev.bottom[M - 1] >= 0 and prev.top[0] >= 0:
            link(ka, kb, np.array([prev.bottom[M - 1]]), np.array([prev.top[0]]))

    nodes = len(digits) * beta
    if src:
        s = np.concatenate(src)
        t = np.concatenate(dst)
    else:
        s = t = np.zeros(0, dtype=np.int64)
    graph = coo_matrix((np.ones(len(s), dtype=np.int8), (s, t)), shape=(nodes, nodes))
    count, comp = connected_components(graph, directed=False)

    side = N * M

    def lift(get_cells, axis_pos, on_side):
        out = np.full(side, -1, dtype=np.int64)
        for (i, j), k in index.items():
            if not on_side(i, j):
                continue
            cells = get_cells
            ok = cells >= 0
            pos = axis_pos(i, j) * M + np.flatnonzero(ok)
            out[pos] = comp[k * beta + cells[ok]]
        return out

    left = lift(prev.left, lambda i, j: j, lambda i, j: i == 0)
    right = lift(prev.right, lambda i, j: j, lambda i, j: i == N - 1)
    bottom = lift(prev.bottom, lambda i, j: i, lambda i, j: j == 0)
    top = lift(prev.top, lambda i, j: i, lambda i, j: j == N - 1)
    return _Boundary(side, int(count), left, right, bottom, top)


def beta0_sequence(D: DigitSet, n_max: int, budget: int | None = None) -> list:
    """Component counts of K^(1), ..., K^(n_max).

    Works level by level on boundary signatures, so the N^n x N^n grid is never
    materialized; the budget still caps the level as if it were.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    check_budget(D.order, n_max, budget)
    state = _boundary_from_mask(D.mask())
    seq = [state.count]
    for _ in range(n_max - 1):
        state = _refine(D, state)
        seq.append(state.count)
    return seq


@dataclass(frozen=True)
class Stabilization:
    n0: int
    beta0: int
    sequence: tuple


def beta0_stabilize(D: DigitSet, n_max: int, budget: int | None = None) -> Stabilization | None:
    """Least n0 in [2, n_max) with beta0(K^(n0+1)) == beta0(K^(n0)).

    When found, beta0(K) equals that count.  Stops computing as soon as the
    first repeat after level 2 shows up.
    """
    if n_max < 3:
        raise ValueError("n_max must be >= 3")
    check_budget(D.order, n_max, budget)
    state = _boundary_from_mask(D.mask())
    seq = [state.count]
    for n in range(2, n_max + 1):
        state = _refine(D, state)
        seq.append(state.count)
        if n >= 3 and seq[-1] == seq[-2]:
            return Stabilization(n - 1, seq[-1], tuple(seq))
    return None


# -- holes and fundamental group ---------------------------------------------

def holes(grid: CellGrid) -> int:
    """Number of bounded components of the plane minus the union of cells."""
    empty = np.pad(~grid.occupancy, 1, constant_values=True)
    labels, count = ndimage.label(empty, structure=FOUR)
    outer = set(np.unique(np.concatenate(
        [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]])).tolist())
    outer.discard(0)
    return int(count) - len(outer)


TRIVIAL_CERTIFIED = "trivial_certified"
NO_CERTIFICATE = "no_certificate"


def pi1_certificate(D: DigitSet, budget: int | None = None) -> str:
    # a hole-free third approximation forces a trivial fundamental group;
    # the converse fails, so no hole-based verdict of nontriviality is given
    return TRIVIAL_CERTIFIED if holes(rasterize(D, 3, budget)) == 0 else NO_CERTIFICATE


# -- periodic complement of H_n = K^(n) + Z^2 --------------------------------

class _OffsetUnionFind:
    """Union-find where each member stores its period displacement to the root."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.dx = [0] * n
        self.dy = [0] * n
        self.holonomy = {}

    def find(self, a):
        path = []
        while self.parent[a] != a:
            path.append(a)
            a = self.parent[a]
        root = a
        # compress, accumulating offsets from the root outward
        for node in reversed(path):
            p = self.parent[node]
            if p != root:
                self.dx[node] += self.dx[p]
                self.dy[node] += self.dy[p]
            self.parent[node] = root
        return root

    def union(self, a, b, ox, oy):
        """Record that b sits at displacement (ox, oy) from a."""
        ra, rb = self.find(a), self.find(b)
        ax, ay = self.dx[a], self.dy[a]
        bx, by = self.dx[b], self.dy[b]
        if ra == rb:
            hx, hy = ax + ox - bx, ay + oy - by
            if hx or hy:
                self.holonomy.setdefault(ra, []).append((hx, hy))
            return
        self.parent[rb] = ra
        self.dx[rb] = ax + ox - bx
        self.dy[rb] = ay + oy - by
        if rb in self.holonomy:
            self.holonomy.setdefault(ra, []).extend(self.holonomy.pop(rb))


@dataclass
class ComplementComponent:
    cells: int  # footprint size on one period
    holonomy: tuple
    diameter_sq: object  # Fraction, or UNBOUNDED

    @property
    def bounded(self) -> bool:
        return self.diameter_sq != UNBOUNDED

    def to_json(self) -> dict:
        return {
            "cells": self.cells,
            "holonomy": list(self.holonomy),
            "diameter_sq": self.diameter_sq if self.diameter_sq == UNBOUNDED else str(self.diameter_sq),
        }


@dataclass
class PeriodicComplementReport:
    level: int
    order: int
    components: list = field(default_factory=list)

    @property
    def unbounded(self) -> list:
        return [c for c in self.components if not c.bounded]

    def max_bounded_diameter_sq(self):
        ds = [c.diameter_sq for c in self.components if c.bounded]
        return max(ds) if ds else None

    def to_json(self) -> dict:
        return {"n": self.level, "components": [c.to_json() for c in self.components]}


def _short(vectors):
    return min(vectors, key=lambda v: (v[0] * v[0] + v[1] * v[1], v))


def complement_components_periodic(D: DigitSet, n: int, budget: int | None = None,
                                   diameters: bool = True) -> PeriodicComplementReport:
    """Components of the complement of H_n, one period at a time.

    Empty cells are labelled without wrap, then patches are glued across the
    period seams with a displacement-tracking union-find.  A cycle that closes
    with a nonzero net displacement is a holonomy: the lifted component is
    unbounded.  Bounded components are lifted to the plane and measured.
    """
    grid = rasterize(D, n, budget)
    M = grid.side
    empty = ~grid.occupancy
    labels, count = ndimage.label(empty, structure=FOUR)
    report = PeriodicComplementReport(n, D.order)
    if count == 0:
        return report

    uf = _OffsetUnionFind(count + 1)
    right, left = labels[M - 1, :], labels[0, :]
    for a, b in zip(right.tolist(), left.tolist()):
        if a and b:
            uf.union(a, b, 1, 0)
    top, bottom = labels[:, M - 1], labels[:, 0]
    for a, b in zip(top.tolist(), bottom.tolist()):
        if a and b:
            uf.union(a, b, 0, 1)

    roots = np.array([uf.find(k) for k in range(count + 1)])
    ox = np.array(uf.dx)
    oy = np.array(uf.dy)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)

    comp_roots = sorted(set(roots[1:].tolist()))
    footprint = {r: 0 for r in comp_roots}
    for k in range(1, count + 1):
        footprint[int(roots[k])] += int(sizes[k])

    xs, ys = np.nonzero(labels)
    lab = labels[xs, ys]
    cell_root = roots[lab]
    lx = xs + ox[lab] * M
    ly = ys + oy[lab] * M
    order = np.argsort(cell_root, kind="stable")
    cell_root, lx, ly = cell_root[order], lx[order], ly[order]
    starts = np.searchsorted(cell_root, comp_roots, side="left")
    ends = np.searchsorted(cell_root, comp_roots, side="right")

    scale = M * M
    for r, a, b in zip(comp_roots, starts, ends):
        hol = uf.holonomy.get(r)
        if hol:
            report.components.append(ComplementComponent(footprint[r], _short(hol), UNBOUNDED))
            continue
        if diameters:
            d = Fraction(cells_diameter_sq(lx[a:b], ly[a:b]), scale)
        else:
            # bounding-box diagonal, an upper bound on the diameter
            w = int(lx[a:b].max() - lx[a:b].min()) + 1
            h = int(ly[a:b].max() - ly[a:b].min()) + 1
            d = Fraction(w * w + h * h, scale)
        report.components.append(ComplementComponent(footprint[r], (0, 0), d))
    return report


# -- dichotomy probe ---------------------------------------------------------

CASE1 = "case1"
UNDETERMINED = "undetermined"


def dichotomy_bound_sq(order: int) -> Fraction:
    """Square of the diameter bound sqrt(2)(N^2+1)^2/N on bounded complement components."""
    return Fraction(2 * (order * order + 1) ** 4, order * order)


@dataclass
class DichotomyWitness:
    outcome: str
    level: int
    kind: str | None
    bound_sq: Fraction
    holonomy: tuple | None = None
    diameter_sq: Fraction | None = None
    max_bounded_sq: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "level": self.level,
            "kind": self.kind,
            "bound_sq": str(self.bound_sq),
            "holonomy": list(self.holonomy) if self.holonomy else None,
            "diameter_sq": str(self.diameter_sq) if self.diameter_sq is not None else None,
        }


def dichotomy_probe(D: DigitSet, n_max: int, budget: int | None = None) -> DichotomyWitness:
    """Look for a complement component of H_n that rules out the Peano case.

    Since the complement of H_n sits inside the complement of H, an unbounded
    component, or one wider than the bound, at any level is a witness for the
    first alternative.  The second alternative has no finite certificate, so
    the probe never claims it.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    bound = dichotomy_bound_sq(D.order)
    seen = []
    for n in range(1, n_max + 1):
        rep = complement_components_periodic(D, n, budget, diameters=False)
        unb = rep.unbounded
        if unb:
            return DichotomyWitness(CASE1, n, "holonomy", bound, holonomy=unb[0].holonomy,
                                    max_bounded_sq=seen)
        big = [c for c in rep.components if c.diameter_sq > bound]
        if big:
            # the box diagonal only bounds from above; confirm exactly
            rep = complement_components_periodic(D, n, budget, diameters=True)
            exact = [c.diameter_sq for c in rep.components if c.diameter_sq > bound]
            if exact:
                return DichotomyWitness(CASE1, n, "diameter", bound, diameter_sq=max(exact),
                                        max_bounded_sq=seen)
            seen.append(rep.max_bounded_diameter_sq())
        else:
            seen.append(rep.max_bounded_diameter_sq())
    return DichotomyWitness(UNDETERMINED, n_max, None, bound, max_bounded_sq=seen)
