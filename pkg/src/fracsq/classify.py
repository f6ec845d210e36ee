"""Certified classification of the range of the lambda function on K.

Rules are tried in a fixed order and the first one that fires decides.  Each
rule records a step whose ``result`` is a plain JSON value recomputable from the
digit set alone, so a verdict can be re-checked by re-running the modules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import BudgetExceeded, DigitSet, LogRatio, max_level, product_form
from .lines import all_profiles, dim_lambda1
from .topology import CASE1, beta0_sequence, beta0_stabilize, components, dichotomy_probe, rasterize

ZERO = "{0}"
ONE = "{1}"
ZERO_ONE = "{0,1}"
UNDETERMINED = "undetermined"

PROBE_CELLS = 2 ** 20


@dataclass(frozen=True)
class Limits:
    beta_depth: int
    probe_depth: int

    @classmethod
    def default(cls, order: int, budget=None) -> "Limits":
        beta = max(3, max_level(order, budget))
        probe = max_level(order, min(PROBE_CELLS, budget) if budget else PROBE_CELLS)
        return cls(beta, probe)

    def to_json(self) -> dict:
        return {"beta_depth": self.beta_depth, "probe_depth": self.probe_depth}


@dataclass
class Step:
    rule: str
    inputs: dict
    result: object
    fired: bool
    anchor: str

    def to_json(self) -> dict:
        return {"rule": self.rule, "inputs": self.inputs, "result": self.result,
                "fired": self.fired, "anchor": self.anchor}


@dataclass
class Verdict:
    digits: DigitSet
    lambda_range: str
    dim_lambda1: LogRatio | None
    certificate: list
    limits: Limits
    notes: list = field(default_factory=list)

    @property
    def rule(self) -> str | None:
        for st in self.certificate:
            if st.fired:
                return st.rule
        return None

    def to_json(self) -> dict:
        return {
            "lambda": self.lambda_range,
            "dim_lambda1": None if self.dim_lambda1 is None else {
                "m": self.dim_lambda1.count, "n": self.dim_lambda1.base,
                "value": self.dim_lambda1.value},
            "certificate": [s.to_json() for s in self.certificate],
            "depths": self.limits.to_json(),
            "notes": list(self.notes),
        }


# -- individual rules --------------------------------------------------------
# each returns (result, fired); results are JSON values

def _r1(D, lim):
    full = D.is_full
    return {"digits": len(D), "cells": D.order ** 2, "full": full}, full


def _r2(D, lim):
    pf = product_form(D)
    if pf is None:
        return None, False
    return {"axis": pf.axis, "indices": list(pf.indices)}, True


def _r3(D, lim):
    st = beta0_stabilize(D, lim.beta_depth)
    if st is None:
        return {"stabilized": False, "sequence": beta0_sequence(D, lim.beta_depth)}, False
    return {"stabilized": True, "n0": st.n0, "beta0": st.beta0, "sequence": list(st.sequence)}, True


def _line_profiles(D):
    return [p for p in all_profiles(D) if p.carries_line]


def _r4(D, lim):
    slopes = [p.slope.to_json() for p in _line_profiles(D)]
    return {"line_slopes": slopes}, not slopes


def _r5(D, lim):
    profs = _line_profiles(D)
    if len(profs) != 1:
        return {"line_slopes": len(profs)}, False
    p = profs[0]
    # only isolated intercepts whose lines lie in H enter the trichotomy;
    # otherwise the slope's lines are just the fixed lines of the cell maps
    q = p.q_lines
    if p.m <= 1 and p.m * q == 0:
        return {"profile": p.to_json(), "branch": "a", "q_lines": q}, True
    branch = "b" if p.m == 1 else "c"
    probe = dichotomy_probe(D, lim.probe_depth)
    res = {"profile": p.to_json(), "branch": branch, "probe": probe.to_json()}
    return res, probe.outcome == CASE1


def _r6(D, lim):
    profs = _line_profiles(D)
    return {"line_slopes": [p.slope.to_json() for p in profs]}, len(profs) >= 2


RULES = (
    ("R1", _r1, ZERO, "full square: K is the unit square"),
    ("R2", _r2, ONE, "product form: K is a segment times a Cantor set"),
    ("R3", _r3, ZERO, "beta0 repeats from level n0 >= 2: finitely many locally connected components"),
    ("R4", _r4, ZERO, "H contains no line: no segment components"),
    ("R5", _r5, None, "single line direction: intercept counts (m, q) decide"),
    ("R6", _r6, ZERO, "derived rule: lines in two directions rule out the segment-and-point case"),
)

_EVAL = {name: fn for name, fn, _, _ in RULES}


def classify(D: DigitSet, limits: Limits | None = None, budget=None) -> Verdict:
    lim = limits or Limits.default(D.order, budget)
    steps = []
    notes = []
    for name, fn, outcome, anchor in RULES:
        try:
            result, fired = fn(D, lim)
        except BudgetExceeded as exc:
            steps.append(Step(name, lim.to_json(), {"budget_exceeded": str(exc)}, False, anchor))
            notes.append(f"{name} skipped: {exc}")
            continue
        steps.append(Step(name, lim.to_json(), result, fired, anchor))
        if name == "R5" and result.get("branch") in ("b", "c") and not fired:
            notes.append(f"R5({result['branch']}) would give {ZERO_ONE} once a case-1 witness is found")
        if not fired:
            continue
        dim = None
        if name == "R5":
            prof = result["profile"]
            if result["branch"] == "a":
                outcome = ZERO
                notes.append("the set of points with lambda = 1 is empty")
            else:
                outcome = ZERO_ONE
                m = prof["m"]
                dim = LogRatio(1, D.order, 1) if m == 1 else dim_lambda1(m, D.order)
        return Verdict(D, outcome, dim, steps, lim, notes)
    return Verdict(D, UNDETERMINED, None, steps, lim, notes)


def explain(v: Verdict) -> str:
    lines = [f"{v.digits.to_text()}", f"lambda(K) = {v.lambda_range}"]
    if v.dim_lambda1 is not None:
        lines.append(f"dim of lambda^-1(1) = {v.dim_lambda1} = {v.dim_lambda1.value:.12f}")
    for st in v.certificate:
        mark = "fires" if st.fired else "does not apply"
        lines.append(f"  {st.rule} {mark}: {st.anchor}")
        lines.append(f"      result: {st.result}")
    for note in v.notes:
        lines.append(f"  note: {note}")
    return "\n".join(lines)


@dataclass(frozen=True)
class RecheckFailure:
    rule: str
    recorded: object
    recomputed: object


def recheck(v: Verdict, budget=None) -> list:
    """Re-run every recorded step and report mismatches (empty list means verified).

    The stabilization step is also confirmed by dense labelling of the levels it
    cites, which does not share code with the boundary recursion.
    """
    D = v.digits
    failures = []
    for st in v.certificate:
        if isinstance(st.result, dict) and "budget_exceeded" in st.result:
            continue
        again, fired = _EVAL[st.rule](D, v.limits)
        if again != st.result or fired != st.fired:
            failures.append(RecheckFailure(st.rule, st.result, again))
            continue
        if st.rule == "R3" and st.fired:
            n0 = st.result["n0"]
            try:
                dense = [components(rasterize(D, n, budget), diameters=False).count
                         for n in (n0, n0 + 1)]
            except BudgetExceeded:
                continue
            if dense != [st.result["beta0"]] * 2:
                failures.append(RecheckFailure("R3-dense", st.result, dense))
    fired = [st for st in v.certificate if st.fired]
    if v.lambda_range != UNDETERMINED and len(fired) != 1:
        failures.append(RecheckFailure("chain", v.lambda_range, [s.rule for s in fired]))
    return failures
