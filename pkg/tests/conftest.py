import random
from itertools import product

import pytest

from fracsq.core import DigitSet, parse_digit_set
from fracsq.digitop import example_family

CORPUS_SEED = 20240501


def random_corpus(count=200, orders=(3, 4), seed=CORPUS_SEED):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        N = rng.choice(orders)
        cells = list(product(range(N), repeat=2))
        k = rng.randint(2, N * N)
        out.append(DigitSet(N, frozenset(rng.sample(cells, k))))
    return out


def small_sets(N=3):
    cells = list(product(range(N), repeat=2))
    for mask in range(1, 1 << len(cells)):
        if bin(mask).count("1") >= 2:
            yield DigitSet(N, frozenset(c for k, c in enumerate(cells) if mask >> k & 1))


@pytest.fixture(scope="session")
def corpus():
    return random_corpus()


@pytest.fixture(scope="session")
def presets():
    return {
        "carpet3": parse_digit_set("111/101/111"),
        "vicsek3": parse_digit_set("010/111/010"),
        "ex21": parse_digit_set("N=3; D=(1,0),(0,1),(1,1),(2,1),(2,2)"),
        "diag5": example_family(1),
        "d0_5": example_family(0),
        "d2_5": example_family(2),
        "d3_5": example_family(3),
        "product32": parse_digit_set("101/101/101"),
        "corners3": DigitSet(3, frozenset({(0, 0), (2, 2)})),
        "column3": DigitSet(3, frozenset((0, j) for j in range(3))),
        "full3": DigitSet.full(3),
    }


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
