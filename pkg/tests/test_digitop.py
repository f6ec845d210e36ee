import math
from fractions import Fraction
from itertools import permutations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracsq.core import DigitSet, DigitSetError, parse_digit_set
from fracsq.digitop import (CONTAINED_UP_TO_DEPTH, EXCLUDED_AT, RationalLine, digit_operator,
                            example_family, intercept_orbit, line_in_H_check, parse_line)
from fracsq.lines import Slope


def oracle_cells(line, N):
    """Half-open cells of the unit square met by the line, its Z^2 translates and N-dilates.

    Points on a line are classified by floor; between consecutive grid crossings
    the floor is constant, so crossings plus midpoints settle every cell exactly.
    """
    sl = line.slope
    ints = set()
    w = line.intercept
    for _ in range(40):
        ints.add(w % sl.period)
        w = N * w
    out = set()
    for c in ints:
        for k in range(-8, 9):
            cc = c + k * sl.period
            if sl.vertical or sl.r == 0:
                if 0 <= cc < 1:
                    for t in range(N):
                        p = (cc, Fraction(t, N)) if sl.vertical else (Fraction(t, N), cc)
                        out.add((math.floor(N * p[0]), math.floor(N * p[1])))
                continue
            tau = Fraction(sl.r, sl.s)
            xs = {Fraction(i, N) for i in range(N + 1)}
            xs |= {(Fraction(j, N) - cc) / tau for j in range(N + 1)}
            xs = sorted(x for x in xs if 0 <= x <= 1)
            probe = xs + [(a + b) / 2 for a, b in zip(xs, xs[1:])]
            for x in probe:
                y = tau * x + cc
                if 0 <= x < 1 and 0 <= y < 1:
                    out.add((math.floor(N * x), math.floor(N * y)))
    return out


def test_intercept_orbits():
    assert intercept_orbit(parse_line("1/1@-1/5"), 5).sorted() == [0, Fraction(4, 5)]
    assert intercept_orbit(parse_line("0/1@2/3"), 3).sorted() == [0, Fraction(2, 3)]
    assert intercept_orbit(parse_line("1/2@0"), 3).sorted() == [0]
    assert intercept_orbit(parse_line("1/1@1/3"), 5).sorted() == [Fraction(1, 3), Fraction(2, 3)]


def test_carpet_from_two_lines():
    D = digit_operator([parse_line("1/2@0"), parse_line("0@2/3")], 3)
    assert D == parse_digit_set("111/101/111")


def test_diagonal_family():
    assert example_family(1).digits == {(i, i) for i in range(5)}
    d2 = {(i, i) for i in range(5)} | {(i + 1, i) for i in range(4)} | {(0, 4)}
    assert example_family(2).digits == d2
    assert example_family(3).digits == d2 | {(i, i + 1) for i in range(4)} | {(4, 0)}
    assert example_family(0).digits == d2 - {(0, 4)}
    with pytest.raises(ValueError):
        example_family(4)


LINES = ["1/2@0", "0@2/3", "1/1@-1/5", "1/1@1/5", "-1/1@0", "v@1/2", "2/1@1/3", "-1/2@1/4", "1/3@0"]


@pytest.mark.parametrize("text", LINES)
@pytest.mark.parametrize("N", [3, 4, 5])
def test_single_line_against_oracle(text, N):
    line = parse_line(text)
    want = oracle_cells(line, N)
    if len(want) < 2:
        with pytest.raises(DigitSetError):
            digit_operator([line], N)
    else:
        assert digit_operator([line], N).digits == want


def test_order_and_representative_independence():
    lines = [parse_line(t) for t in ("1/1@0", "1/1@-1/5", "1/1@1/5")]
    base = digit_operator(lines, 5)
    for perm in permutations(lines):
        assert digit_operator(perm, 5) == base
    shifted = [ln.shifted(k) for ln, k in zip(lines, (3, -2, 7))]
    assert digit_operator(shifted, 5) == base


@settings(max_examples=40, deadline=None)
@given(st.integers(-3, 3), st.integers(1, 3), st.integers(0, 24), st.integers(1, 25), st.sampled_from([3, 4, 5]))
def test_random_lines_against_oracle(r, s, p, q, N):
    if math.gcd(abs(r), s) != 1:
        return
    line = RationalLine(Slope.of(r, s), Fraction(p, q))
    want = oracle_cells(line, N)
    if len(want) >= 2:
        assert digit_operator([line], N).digits == want


def test_parse_line():
    assert parse_line("v@1/3") == RationalLine(Slope(1, 0), Fraction(1, 3))
    assert parse_line(" -1/2 @ 3/4 ") == RationalLine(Slope(-1, 2), Fraction(3, 4))
    assert parse_line("2/4@0").slope == Slope(1, 2)
    assert str(parse_line("v@1/3")) == "v@1/3"
    for bad in ("", "1/2", "x@0", "1/2@", "1/0@1"):
        with pytest.raises(ValueError):
            parse_line(bad)


def test_line_in_H_check(presets):
    assert line_in_H_check(presets["diag5"], parse_line("1/1@0"), 4).status == CONTAINED_UP_TO_DEPTH
    c = line_in_H_check(presets["carpet3"], parse_line("1/1@0"), 3)
    assert (c.status, c.level) == (EXCLUDED_AT, 1)
    assert line_in_H_check(presets["carpet3"], parse_line("1/2@0"), 4).status == CONTAINED_UP_TO_DEPTH
    assert c.to_json() == {"status": "excluded_at", "level": 1}


def test_operator_lines_lie_in_H():
    # every input line sits inside the periodic set built from it
    for texts, N in ((["1/2@0", "0@2/3"], 3), (["1/1@0", "1/1@-1/5"], 5), (["-1/1@0"], 4)):
        lines = [parse_line(t) for t in texts]
        D = digit_operator(lines, N)
        for ln in lines:
            assert line_in_H_check(D, ln, 3).status == CONTAINED_UP_TO_DEPTH


def test_isolated_line_round_trip(corpus):
    from fracsq.lines import all_profiles
    for D in corpus[:80]:
        for p in all_profiles(D):
            for v in p.isolated_lines:
                line = RationalLine(p.slope, p.intercept(v))
                assert line_in_H_check(D, line, 3).status == CONTAINED_UP_TO_DEPTH
