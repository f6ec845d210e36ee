"""The digit operator: from finitely many rational lines to a digit set.

A line family generates its orbit under integer translations and the
homothety x -> N x.  For rational intercepts the orbit is finite modulo the
translation period, so the set of cells it meets is computable exactly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .core import DigitSet, DigitSetError
from .lines import Slope, omega_level

CONTAINED_UP_TO_DEPTH = "contained_up_to_depth"
EXCLUDED_AT = "excluded_at"


@dataclass(frozen=True)
class RationalLine:
    """x2 = (r/s) x1 + intercept, or x1 = intercept when the slope is vertical."""

    slope: Slope
    intercept: Fraction

    def __post_init__(self):
        object.__setattr__(self, "intercept", Fraction(self.intercept))

    def shifted(self, k: int) -> "RationalLine":
        return RationalLine(self.slope, self.intercept + k * self.slope.period)

    def __str__(self):
        if self.slope.vertical:
            return f"v@{self.intercept}"
        return f"{self.slope.r}/{self.slope.s}@{self.intercept}"


_LINE_RE = re.compile(r"^\s*(v|-?\d+(?:/\d+)?)\s*@\s*(-?\d+(?:/\d+)?)\s*$")


def parse_line(text: str) -> RationalLine:
    """Parse ``"r/s@p/q"`` (slope r/s, intercept p/q) or ``"v@p/q"`` (x1 = p/q)."""
    m = _LINE_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse line {text!r}; expected r/s@p/q or v@p/q")
    slope_txt, icpt = m.groups()
    try:
        if slope_txt == "v":
            slope = Slope(1, 0)
        else:
            tau = Fraction(slope_txt)
            slope = Slope.of(tau.numerator, tau.denominator)
        return RationalLine(slope, Fraction(icpt))
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in line {text!r}") from None


@dataclass(frozen=True)
class OrbitClosure:
    slope: Slope
    classes: frozenset  # intercepts reduced into [0, period)

    def sorted(self) -> list:
        return sorted(self.classes)

    def to_json(self) -> dict:
        return {"slope": self.slope.to_json(), "classes": [str(c) for c in self.sorted()]}


def intercept_orbit(line: RationalLine, N: int) -> OrbitClosure:
    """Forward orbit of the intercept under w -> N w, modulo the period."""
    period = line.slope.period
    w = line.intercept % period
    seen = set()
    while w not in seen:
        seen.add(w)
        w = (N * w) % period
    return OrbitClosure(line.slope, frozenset(seen))


def _hits_cell(line: RationalLine, i: int, j: int, N: int) -> bool:
    """Does the line meet the half-open cell [i, i+1)/N x [j, j+1)/N?"""
    x0, x1 = Fraction(i, N), Fraction(i + 1, N)
    y0, y1 = Fraction(j, N), Fraction(j + 1, N)
    c = line.intercept
    sl = line.slope
    if sl.vertical:
        return x0 <= c < x1
    if sl.r == 0:
        return y0 <= c < y1
    tau = Fraction(sl.r, sl.s)
    a, b = tau * x0 + c, tau * x1 + c
    if tau > 0:
        # image [a, b) against [y0, y1)
        return a < y1 and y0 < b
    # image (b, a] against [y0, y1)
    return b < y1 and y0 <= a


def _shift_range(sl: Slope) -> range:
    """Integer shifts k of a class representative in [0, period) that can reach the unit square."""
    if sl.vertical or sl.r == 0:
        return range(0, 1)
    reach = (abs(sl.r) + sl.s) + 1
    return range(-reach, reach + 1)


def digit_operator(lines, N: int) -> DigitSet:
    lines = list(lines)
    if not lines:
        raise ValueError("need at least one line")
    cells = set()
    for line in lines:
        orb = intercept_orbit(line, N)
        for w in orb.sorted():
            base = RationalLine(line.slope, w)
            for k in _shift_range(line.slope):
                cand = base.shifted(k)
                for i in range(N):
                    for j in range(N):
                        if (i, j) not in cells and _hits_cell(cand, i, j, N):
                            cells.add((i, j))
    if len(cells) < 2:
        raise DigitSetError(f"digit operator produced {len(cells)} digit(s); a digit set needs 2")
    return DigitSet(N, frozenset(cells))


@dataclass(frozen=True)
class LineCheck:
    status: str
    level: int | None = None  # first excluding level

    def to_json(self) -> dict:
        return {"status": self.status, "level": self.level}


def line_in_H_check(D: DigitSet, line: RationalLine, depth: int, budget=None) -> LineCheck:
    """Depth-bounded test of l inside H_n for n = 1..depth.

    An exclusion is a proof that l is not in H; survival is not a proof of
    containment.
    """
    for n in range(1, depth + 1):
        if not omega_level(D, line.slope, n, budget).contains(line.intercept):
            return LineCheck(EXCLUDED_AT, n)
    return LineCheck(CONTAINED_UP_TO_DEPTH)


def example_family(k: int) -> DigitSet:
    """Order-5 digit sets from the slope-one lines through intercepts 0, -1/5, 1/5.

    k = 1, 2, 3 uses the first k of those lines; k = 0 is the k = 2 set with the
    corner digit (0, 4) removed.
    """
    lines = [RationalLine(Slope(1, 1), Fraction(w)) for w in (0, Fraction(-1, 5), Fraction(1, 5))]
    if k == 0:
        D2 = example_family(2)
        return DigitSet(5, D2.digits - {(0, 4)})
    if k not in (1, 2, 3):
        raise ValueError("k must be 0, 1, 2 or 3")
    return digit_operator(lines[:k], 5)
