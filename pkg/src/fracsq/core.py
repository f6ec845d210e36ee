"""Digit sets of fractal squares and the algebra on them.

A fractal square K(N, D) is the attractor of the maps x -> (x + d)/N for d in
a digit set D of {0..N-1}^2.  Everything here is integer arithmetic; the only
floats produced are the rendered values of dimension log-ratios.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from itertools import product
from typing import Iterable

import numpy as np

DEFAULT_BUDGET_CELLS = 2 ** 26


class DigitSetError(ValueError):
    """Malformed or invalid digit-set input."""


class BudgetExceeded(RuntimeError):
    """A level would need more grid cells than the configured budget."""

    def __init__(self, order, level, budget):
        self.order = order
        self.level = level
        self.budget = budget
        super().__init__(
            f"level {level} of order {order} needs {order ** (2 * level)} cells "
            f"(budget {budget})"
        )


def budget_cells() -> int:
    env = os.environ.get("FRACSQ_BUDGET_CELLS")
    if env:
        return int(env)
    return DEFAULT_BUDGET_CELLS


def check_budget(order: int, level: int, budget: int | None = None) -> None:
    budget = budget_cells() if budget is None else budget
    if order ** (2 * level) > budget:
        raise BudgetExceeded(order, level, budget)


def max_level(order: int, budget: int | None = None) -> int:
    """Largest n with order**(2n) inside the budget (at least 1)."""
    budget = budget_cells() if budget is None else budget
    n = 1
    while order ** (2 * (n + 1)) <= budget:
        n += 1
    return n


@dataclass(frozen=True)
class DigitSet:
    order: int
    digits: frozenset

    def __post_init__(self):
        if self.order < 2:
            raise DigitSetError(f"order must be >= 2, got {self.order}")
        digits = frozenset((int(i), int(j)) for i, j in self.digits)
        object.__setattr__(self, "digits", digits)
        for i, j in digits:
            if not (0 <= i < self.order and 0 <= j < self.order):
                raise DigitSetError(f"digit {(i, j)} outside [0, {self.order - 1}]^2")
        if len(digits) < 2:
            raise DigitSetError("a digit set needs at least 2 digits")

    @classmethod
    def from_digits(cls, order: int, digits: Iterable) -> "DigitSet":
        digits = [tuple(d) for d in digits]
        seen = set()
        for d in digits:
            if d in seen:
                raise DigitSetError(f"duplicate digit {d}")
            seen.add(d)
        return cls(order, frozenset(digits))

    @classmethod
    def full(cls, order: int) -> "DigitSet":
        return cls(order, frozenset(product(range(order), repeat=2)))

    def __len__(self):
        return len(self.digits)

    def __contains__(self, d):
        return tuple(d) in self.digits

    def __iter__(self):
        return iter(self.sorted())

    def sorted(self) -> list:
        return sorted(self.digits)

    @property
    def is_full(self) -> bool:
        return len(self.digits) == self.order ** 2

    def mask(self) -> np.ndarray:
        """Occupancy of the first approximation, indexed [i, j]."""
        m = np.zeros((self.order, self.order), dtype=bool)
        for i, j in self.digits:
            m[i, j] = True
        return m

    def to_json(self) -> dict:
        return {"n": self.order, "digits": [list(d) for d in self.sorted()]}

    @classmethod
    def from_json(cls, obj: dict) -> "DigitSet":
        return cls.from_digits(int(obj["n"]), obj["digits"])

    def to_text(self) -> str:
        body = ",".join(f"({i},{j})" for i, j in self.sorted())
        return f"N={self.order}; D={body}"

    def to_grid(self) -> str:
        n = self.order
        rows = []
        for k in range(n):
            j = n - 1 - k
            rows.append("".join("1" if (i, j) in self.digits else "0" for i in range(n)))
        return "\n".join(rows)

    def sort_key(self) -> tuple:
        return (self.order, len(self.digits), tuple(self.sorted()))

    def __str__(self):
        return self.to_text()


_LIST_RE = re.compile(r"^\s*N\s*=\s*(\d+)\s*;\s*D\s*=\s*(.*)$", re.S)
_PAIR_RE = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


def parse_digit_set(text: str) -> DigitSet:
    """Parse either ``"N=5; D=(0,0),(1,1),..."`` or a grid of 0/1 rows.

    Grid row 0 is the top row, i.e. j = N-1; columns run i = 0.. left to right.
    """
    text = text.strip()
    m = _LIST_RE.match(text)
    if m:
        order = int(m.group(1))
        rest = m.group(2).strip().strip("{}").strip()
        pairs = _PAIR_RE.findall(rest)
        leftover = _PAIR_RE.sub("", rest).replace(",", "").strip()
        if leftover:
            raise DigitSetError(f"cannot parse digit list: {rest!r}")
        return DigitSet.from_digits(order, [(int(a), int(b)) for a, b in pairs])

    rows = [r.strip() for r in re.split(r"[\n/]", text) if r.strip()]
    if not rows:
        raise DigitSetError("empty digit-set text")
    order = len(rows)
    digits = []
    for k, row in enumerate(rows):
        if len(row) != order or set(row) - {"0", "1"}:
            raise DigitSetError(f"grid row {k} must be {order} characters of 0/1: {row!r}")
        j = order - 1 - k
        digits.extend((i, j) for i, ch in enumerate(row) if ch == "1")
    return DigitSet.from_digits(order, digits)


@dataclass(frozen=True)
class ExpandedDigits:
    level: int
    order: int
    cells: frozenset

    def __len__(self):
        return len(self.cells)


def expand_digits(D: DigitSet, n: int, budget: int | None = None) -> ExpandedDigits:
    """Digit set of the n-th approximation: D_n = D + N * D_{n-1}."""
    if n < 1:
        raise ValueError("level must be >= 1")
    check_budget(D.order, n, budget)
    N = D.order
    cells = set(D.digits)
    for _ in range(n - 1):
        cells = {(a + N * c, b + N * e) for a, b in D.digits for c, e in cells}
    return ExpandedDigits(n, N, frozenset(cells))


def level_mask(D: DigitSet, n: int, budget: int | None = None) -> np.ndarray:
    """Dense occupancy of K^(n) as an N^n x N^n boolean array indexed [i, j]."""
    if n < 1:
        raise ValueError("level must be >= 1")
    check_budget(D.order, n, budget)
    base = D.mask()
    occ = base
    for _ in range(n - 1):
        # top digit of the address is the coarse cell
        occ = np.kron(base, occ)
    return occ


@dataclass(frozen=True)
class ProductForm:
    axis: str  # "columns" or "rows"
    indices: tuple

    def digit_set(self, order: int) -> DigitSet:
        full = range(order)
        if self.axis == "columns":
            cells = [(i, j) for i in self.indices for j in full]
        else:
            cells = [(i, j) for i in full for j in self.indices]
        return DigitSet.from_digits(order, cells)


def product_form(D: DigitSet) -> ProductForm | None:
    N = D.order
    m = D.mask()
    for axis, lines in (("columns", m), ("rows", m.T)):
        full = lines.all(axis=1)
        empty = ~lines.any(axis=1)
        if np.all(full | empty):
            idx = tuple(int(k) for k in np.flatnonzero(full))
            if 2 <= len(idx) <= N - 1:
                return ProductForm(axis, idx)
    return None


def transpose(D: DigitSet) -> DigitSet:
    return DigitSet(D.order, frozenset((j, i) for i, j in D.digits))


def reflect_horizontal(D: DigitSet) -> DigitSet:
    N = D.order
    return DigitSet(N, frozenset((N - 1 - i, j) for i, j in D.digits))


@dataclass(frozen=True)
class LogRatio:
    """The number ``offset + log(count) / log(base)`` kept as integers."""

    count: int
    base: int
    offset: int = 0

    @property
    def value(self) -> float:
        return self.offset + math.log(self.count) / math.log(self.base)

    def to_json(self) -> dict:
        return {"m": self.count, "n": self.base, "offset": self.offset, "value": self.value}

    def __str__(self):
        if self.count == 1:
            return str(self.offset)
        head = f"{self.offset} + " if self.offset else ""
        return f"{head}log {self.count}/log {self.base}"


def hausdorff_dim_attractor(D: DigitSet) -> LogRatio:
    return LogRatio(len(D), D.order)
