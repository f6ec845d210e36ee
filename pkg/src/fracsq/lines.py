"""Rational line directions and the intercept sets of lines lying in H_n.

For a slope r/s the projection x -> x2 - (r/s) x1 sends every lattice corner
of the level-n grid to a multiple of 1/(N^n s).  All computations below work in
those integer units, so the period [0, 1/s] becomes [0, N^n].  The part of the
period not covered by the projected complement of H_n is Omega_n: the
intercepts of lines of that slope that stay inside H_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import DigitSet, LogRatio, check_budget, level_mask


@dataclass(frozen=True, order=True)
class Slope:
    """Direction r/s in lowest terms; (1, 0) is vertical, (0, 1) horizontal."""

    r: int
    s: int

    @classmethod
    def of(cls, r: int, s: int) -> "Slope":
        if r == 0 and s == 0:
            raise ValueError("(0, 0) is not a direction")
        if s < 0 or (s == 0 and r < 0):
            r, s = -r, -s
        g = math.gcd(abs(r), s)
        return cls(r // g, s // g)

    def __post_init__(self):
        if self.s < 0 or math.gcd(abs(self.r), self.s) != 1 or (self.s == 0 and self.r != 1):
            raise ValueError(f"slope ({self.r}, {self.s}) is not normalized")

    @property
    def vertical(self) -> bool:
        return self.s == 0

    @property
    def horizontal(self) -> bool:
        return self.r == 0

    @property
    def axis(self) -> bool:
        return self.s == 0 or self.r == 0

    @property
    def period(self) -> Fraction:
        """Length of the intercept period: 1/s, or 1 for vertical lines."""
        return Fraction(1, self.s) if self.s else Fraction(1)

    def transposed(self) -> "Slope":
        return Slope.of(self.s, self.r)

    def to_json(self) -> list:
        return [self.r, self.s]

    def __str__(self):
        return f"{self.r}/{self.s}" if self.s else "vertical"


def admissible_slopes(N: int) -> list:
    """Slopes that can carry lines in H for a proper digit set of order N.

    An open missing cell projects to an interval of (|r| + s) units on a period
    of N units, so steeper-in-lattice-terms directions are covered entirely.
    """
    if N < 2:
        raise ValueError("order must be >= 2")
    out = [Slope(1, 0), Slope(0, 1)]
    for total in range(2, N + 1):
        for a in range(1, total):
            s = total - a
            if math.gcd(a, s) != 1:
                continue
            out.append(Slope(a, s))
            out.append(Slope(-a, s))
    return out


# -- projection of the level-n complement ------------------------------------

def _mask_for(D: DigitSet, slope: Slope, n: int, budget) -> tuple:
    mask = level_mask(D, n, budget)
    if slope.vertical:
        # vertical lines of D are horizontal lines of the transpose
        return mask.T, Slope(0, 1)
    return mask, slope


def _cover(starts: np.ndarray, counts: np.ndarray, period: int) -> np.ndarray:
    """Boolean cover of the cyclic ranges [start, start + count) mod period."""
    counts = np.minimum(counts, period)
    keep = counts > 0
    starts, counts = starts[keep] % period, counts[keep]
    diff = np.zeros(period + 1, dtype=np.int64)
    ends = starts + counts
    inside = ends <= period
    np.add.at(diff, starts, 1)
    np.add.at(diff, np.where(inside, ends, period), -1)
    wrap = ~inside
    np.add.at(diff, np.zeros(int(wrap.sum()), dtype=np.int64), 1)
    np.add.at(diff, ends[wrap] - period, -1)
    return np.cumsum(diff[:-1]) > 0


def _free_sets(mask: np.ndarray, slope: Slope) -> tuple:
    """(free cells, free points) of one period, in units 1/(M s).

    Points are indexed 0..M with 0 and M the same intercept class.
    """
    M = mask.shape[0]
    r, s = slope.r, slope.s
    a, b = np.nonzero(~mask)
    a = a.astype(np.int64)
    b = b.astype(np.int64)
    if r >= 0:
        lo = b * s - r * (a + 1)
    else:
        lo = b * s - r * a
    length = abs(r) + s
    cells_cov = _cover(lo, np.full(lo.shape, length), M)
    pts_cov = _cover(lo + 1, np.full(lo.shape, length - 1), M)
    if r == 0:
        # a horizontal line along a grid edge leaves H_n where the cells on
        # both sides of the edge are missing
        missing = ~mask
        pts_cov |= (missing & np.roll(missing, 1, axis=1)).any(axis=0)
    cells = ~cells_cov
    points = np.empty(M + 1, dtype=bool)
    points[:M] = ~pts_cov
    points[M] = points[0]
    return cells, points


@dataclass(frozen=True)
class OmegaLevelSet:
    """A closed subset of the intercept period made of grid cells and grid points.

    ``cells[k]`` covers [k, k+1] and ``points[v]`` the point v, both in units of
    1/(N^level s).  ``points`` includes the endpoints of every cell in the set.
    """

    slope: Slope
    order: int
    level: int
    cells: np.ndarray
    points: np.ndarray

    @property
    def side(self) -> int:
        return self.order ** self.level

    def is_empty(self) -> bool:
        return not self.points.any()

    def refine(self, level: int) -> "OmegaLevelSet":
        if level < self.level:
            raise ValueError("cannot coarsen")
        k = self.order ** (level - self.level)
        if k == 1:
            return self
        cells = np.repeat(self.cells, k)
        points = np.zeros(len(cells) + 1, dtype=bool)
        points[::k] = self.points
        points[:-1] |= cells
        points[1:] |= cells
        return OmegaLevelSet(self.slope, self.order, level, cells, points)

    def _aligned(self, other):
        lv = max(self.level, other.level)
        return self.refine(lv), other.refine(lv)

    def issubset(self, other: "OmegaLevelSet") -> bool:
        a, b = self._aligned(other)
        return bool(np.all(b.cells[a.cells]) and np.all(b.points[a.points]))

    def union(self, other: "OmegaLevelSet") -> "OmegaLevelSet":
        a, b = self._aligned(other)
        return OmegaLevelSet(self.slope, self.order, a.level, a.cells | b.cells, a.points | b.points)

    def __eq__(self, other):
        if not isinstance(other, OmegaLevelSet):
            return NotImplemented
        a, b = self._aligned(other)
        return (self.slope == other.slope and np.array_equal(a.cells, b.cells)
                and np.array_equal(a.points, b.points))

    __hash__ = None

    def contains(self, omega: Fraction) -> bool:
        """Membership of the intercept class of ``omega``."""
        t = (Fraction(omega) % self.slope.period) * self.side / self.slope.period
        if t.denominator == 1:
            return bool(self.points[int(t)])
        return bool(self.cells[math.floor(t)])

    def to_json(self) -> dict:
        return {
            "slope": self.slope.to_json(),
            "level": self.level,
            "cells": np.flatnonzero(self.cells).tolist(),
            "points": np.flatnonzero(self.points).tolist(),
        }


def phi_image(X: OmegaLevelSet) -> OmegaLevelSet:
    """Image under t -> N t mod period, one level coarser.

    In units, cell k and point v of level n+1 land on k and v mod N^n of level n.
    """
    if X.level < 1:
        raise ValueError("level 0 has no coarser image")
    M = X.side // X.order
    cells = np.zeros(M, dtype=bool)
    points = np.zeros(M + 1, dtype=bool)
    cells[np.flatnonzero(X.cells) % M] = True
    points[np.flatnonzero(X.points) % M] = True
    points[M] = points[0]
    return OmegaLevelSet(X.slope, X.order, X.level - 1, cells, points)


def full_period(slope: Slope, order: int) -> OmegaLevelSet:
    return OmegaLevelSet(slope, order, 0, np.ones(1, dtype=bool), np.ones(2, dtype=bool))


def omega_level(D: DigitSet, slope: Slope, n: int, budget: int | None = None) -> OmegaLevelSet:
    check_budget(D.order, n, budget)
    mask, eff = _mask_for(D, slope, n, budget)
    cells, points = _free_sets(mask, eff)
    return OmegaLevelSet(slope, D.order, n, cells, points)


def line_in_H_exact(D: DigitSet, slope: Slope, omega) -> bool:
    """Exact test that the line of this slope through intercept ``omega`` lies in H.

    Off the axes a line never runs along a cell edge for more than a point, so
    it lies in H iff every intercept of its multiplication-by-N orbit lies in
    Omega_1.  Axis-parallel lines can run along edges; the ones strictly inside
    a row need that row full, and a line on a row boundary is covered from the
    row above by the bottom trace of K and from below by the top trace, which
    are full intervals only when the bottom (top) row of D is full.
    """
    omega = Fraction(omega)
    N = D.order
    period = slope.period
    if not slope.axis:
        lv = omega_level(D, slope, 1)
        w = omega % period
        seen = set()
        while w not in seen:
            if not lv.contains(w):
                return False
            seen.add(w)
            w = (N * w) % period
        return True
    mask = D.mask().T if slope.vertical else D.mask()
    row_full = mask.all(axis=0)
    t = omega % 1
    seen = set()
    while t not in seen:
        seen.add(t)
        x = N * t
        if x.denominator == 1:
            v = int(x)
            if v == 0:
                return bool(row_full[0] or row_full[N - 1])
            return all((mask[a, v] and row_full[0]) or (mask[a, v - 1] and row_full[N - 1])
                       for a in range(N))
        b = math.floor(x)
        if not row_full[b]:
            return False
        t = x - b
    return True


@dataclass(frozen=True)
class OmegaProfile:
    slope: Slope
    order: int
    cells: tuple  # u with [u, u+1] inside Omega_1
    isolated: tuple  # grid indices in 0..N
    m: int
    q: int
    level1: OmegaLevelSet
    isolated_lines: tuple = ()  # isolated v whose line lies in H
    isolated_lines_with_images: tuple = ()  # ... and whose images under every cell map do too

    @property
    def line_bearing(self) -> bool:
        return self.m + self.q >= 1

    @property
    def carries_line(self) -> bool:
        """Exact: H contains a line of this slope.

        A free cell u gives the line through the fixed point of t -> (t + u/s)/N;
        with no free cell the only candidates are the isolated intercepts.
        """
        return self.m >= 1 or bool(self.isolated_lines)

    @property
    def q_lines(self) -> int:
        """Isolated intercepts that feed infinitely many lines into Omega (0 and N counted once)."""
        vs = set(self.isolated_lines_with_images)
        if 0 in vs and self.order in vs:
            vs.discard(self.order)
        return len(vs)

    def intercept(self, v: int) -> Fraction:
        return Fraction(v, self.order) * self.slope.period

    def cell_map(self, u: int, t: Fraction) -> Fraction:
        return (t + u * self.slope.period) / self.order

    def fixed_point(self, u: int) -> Fraction:
        """Fixed intercept of the cell map for cell u."""
        return Fraction(u, self.order - 1) * self.slope.period

    def to_json(self) -> dict:
        return {
            "slope": self.slope.to_json(),
            "m": self.m,
            "q": self.q,
            "cells": list(self.cells),
            "isolated": list(self.isolated),
            "line_bearing": self.line_bearing,
            "carries_line": self.carries_line,
            "isolated_lines": list(self.isolated_lines),
            "q_lines": self.q_lines,
        }


def _isolated(level1: OmegaLevelSet) -> list:
    N = level1.order
    cells, points = level1.cells, level1.points
    iso = []
    for v in range(N + 1):
        if not points[v]:
            continue
        if (v >= 1 and cells[v - 1]) or (v < N and cells[v]):
            continue
        iso.append(v)
    return iso


def omega1(D: DigitSet, slope: Slope) -> OmegaProfile:
    level1 = omega_level(D, slope, 1)
    N = D.order
    free = tuple(int(u) for u in np.flatnonzero(level1.cells))
    iso = _isolated(level1)
    q = len(iso)
    if 0 in iso and N in iso:
        q -= 1
    prof = OmegaProfile(slope, N, free, tuple(iso), len(free), q, level1)
    lines = tuple(v for v in iso if line_in_H_exact(D, slope, prof.intercept(v)))
    with_images = tuple(
        v for v in lines
        if all(line_in_H_exact(D, slope, prof.cell_map(u, prof.intercept(v))) for u in free))
    return OmegaProfile(slope, N, free, tuple(iso), len(free), q, level1, lines, with_images)


# -- the cell maps on the intercept period -----------------------------------

class NoCellMaps(ValueError):
    """Omega_1 has no whole cell, so there is nothing to iterate."""


def omega_recursion_step(profile: OmegaProfile, X: OmegaLevelSet) -> OmegaLevelSet:
    """Apply the union of the cell maps t -> (t + u/s)/N, u over Omega_1's cells."""
    if profile.m == 0:
        raise NoCellMaps("m = 0: Omega is the finite set of isolated intercepts")
    M = X.side
    N = profile.order
    cells = np.zeros(N * M, dtype=bool)
    points = np.zeros(N * M + 1, dtype=bool)
    src_c = np.flatnonzero(X.cells)
    src_p = np.flatnonzero(X.points)
    for u in profile.cells:
        cells[src_c + u * M] = True
        points[src_p + u * M] = True
    return OmegaLevelSet(X.slope, X.order, X.level + 1, cells, points)


def isolated_set(profile: OmegaProfile) -> OmegaLevelSet:
    N = profile.order
    points = np.zeros(N + 1, dtype=bool)
    points[list(profile.isolated)] = True
    if points[0] or points[N]:
        points[0] = points[N] = True
    return OmegaLevelSet(profile.slope, N, 1, np.zeros(N, dtype=bool), points)


def phi_power_full(profile: OmegaProfile, n: int) -> OmegaLevelSet:
    """The n-th image of the whole period under the cell maps."""
    X = full_period(profile.slope, profile.order)
    for _ in range(n):
        X = omega_recursion_step(profile, X)
    return X


def condensation_orbit(profile: OmegaProfile, n: int) -> OmegaLevelSet:
    """E_n: the isolated intercepts and their images under up to n-1 cell maps."""
    A = isolated_set(profile)
    E = A
    X = A
    for _ in range(n - 1):
        if profile.m == 0:
            break
        X = omega_recursion_step(profile, X)
        E = E.union(X)
    return E


# -- dimensions --------------------------------------------------------------

def dim_lambda1(m: int, N: int) -> LogRatio:
    """Dimension 1 + log m / log N of the non-locally-connected part."""
    if m < 2:
        raise ValueError("the formula needs at least two cells (m >= 2)")
    return LogRatio(m, N, 1)


def dim_omega(m: int, N: int) -> LogRatio:
    """Dimension log m / log N of the limiting intercept set."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return LogRatio(m, N, 0)


# -- slopes that carry lines --------------------------------------------------

def all_profiles(D: DigitSet) -> list:
    return [omega1(D, s) for s in admissible_slopes(D.order)]


def line_bearing_slopes(D: DigitSet) -> list:
    """(slope, profile) for every admissible slope along which H carries a line."""
    return [(p.slope, p) for p in all_profiles(D) if p.carries_line]
