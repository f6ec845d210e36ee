from itertools import combinations

import pytest

from fracsq.core import expand_digits, parse_digit_set, transpose
from fracsq.hata import (CONNECTED, DISCONNECTED, adjacency, connected_certificate, hata_graph,
                         offset_touch)
from fracsq.core import level_mask
from fracsq.topology import beta0_sequence


def brute_touch(D, d, d2, basis):
    """Closed unit cells of N^basis * (K^(basis) + d) and the same for d2 share a point."""
    side = D.order ** basis
    cells = expand_digits(D, basis).cells
    a = {(d[0] * side + x, d[1] * side + y) for x, y in cells}
    b = {(d2[0] * side + x, d2[1] * side + y) for x, y in cells}
    return any(abs(p[0] - q[0]) <= 1 and abs(p[1] - q[1]) <= 1 for p in a for q in b)


def test_offset_touch_against_brute_force(corpus):
    for D in corpus[:60]:
        for d, d2 in combinations(sorted(D.digits), 2):
            assert adjacency(D, d, d2) == brute_touch(D, d, d2, 2)


def test_offset_touch_rejects_far_offsets():
    P = level_mask(parse_digit_set("111/101/111"), 1)
    with pytest.raises(ValueError):
        offset_touch(P, 2, 0)


def test_example_graph_is_disconnected(presets):
    D = presets["ex21"]
    g = hata_graph(D, 1)
    assert g.edges == (((0, 1), (1, 1)), ((1, 1), (2, 1)))
    assert g.components() == 3
    assert connected_certificate(D) == DISCONNECTED
    # the box test on K^(1) overstates contact and would call it connected
    assert hata_graph(D, 1, basis=1).components() == 1


def test_diagonal_is_a_path(presets):
    g = hata_graph(presets["diag5"])
    assert g.edges == tuple(((i, i), (i + 1, i + 1)) for i in range(4))
    assert connected_certificate(presets["diag5"]) == CONNECTED


def test_corners_have_no_edges(presets):
    g = hata_graph(presets["corners3"])
    assert g.edges == () and g.components() == 2


def test_carpet_ring(presets):
    g = hata_graph(presets["carpet3"])
    assert len(g.edges) == 12
    assert ((0, 1), (1, 0)) in g.edges and ((0, 0), (1, 1)) not in g.edges
    assert g.is_connected()


def test_basis_two_equals_three_and_four(corpus):
    for D in corpus:
        g2 = hata_graph(D, 1, basis=2)
        assert g2.edges == hata_graph(D, 1, basis=3).edges
        if D.order == 3:
            assert g2.edges == hata_graph(D, 1, basis=4).edges


def test_connected_beta0_agreement(corpus):
    # a connected attractor has connected approximations; a disconnected G_1
    # shows up as beta0 > 1 at some level
    for D in corpus:
        seq = beta0_sequence(D, 4)
        if connected_certificate(D) == CONNECTED:
            assert seq == [1] * 4
        else:
            assert seq[-1] > 1


def test_transpose_conjugates_graph(corpus):
    for D in corpus[:60]:
        g, h = hata_graph(D), hata_graph(transpose(D))
        swapped = sorted(tuple(sorted(((u[1], u[0]), (v[1], v[0])))) for u, v in g.edges)
        assert tuple(swapped) == h.edges


def test_level_two_graph(presets):
    g = hata_graph(presets["carpet3"], 2)
    assert len(g.vertices) == 64 and g.is_connected()
    # merging pieces can only join clusters, so refining the level cannot lower the count
    assert hata_graph(presets["ex21"], 2).components() >= hata_graph(presets["ex21"], 1).components()


def test_adjacency_errors(presets):
    D = presets["carpet3"]
    with pytest.raises(ValueError):
        adjacency(D, (0, 0), (0, 0))
    with pytest.raises(ValueError):
        adjacency(D, (0, 0), (1, 1))
    with pytest.raises(ValueError):
        hata_graph(D, 0)
