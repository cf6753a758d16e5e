import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import covering_brute, hausdorff_brute, packing_brute
from qadmit.entropy import (DenseSpace, LineGrid, MetricValidationError, NotConnectedAtScale,
                            ResolutionExceeded, SizeCapExceeded, cantor_truncation, capacity,
                            ceil_log2, connected_lower_bound_check, covering_number, entropy_profile,
                            grid, hausdorff_distance, hilbert_truncated, hyperspace_space, load_space,
                            log_rescaled_distance, product_max, product_scaled, random_space,
                            random_tree_space, rescale_log, resolution_limit)


def p2(n):
    return Fraction(1, 2 ** n)


def line_cover(npoints, reach):
    # closed balls on a line of equally spaced points cover 2*reach + 1 neighbours
    return -(-npoints // (2 * reach + 1))


GRID10_COUNTS = [line_cover(1025, 2 ** (10 - n)) for n in range(1, 9)]


def test_grid_counts_frozen():
    assert GRID10_COUNTS == [1, 2, 4, 8, 16, 32, 61, 114]
    prof = entropy_profile(grid(10), 8, n_min=1, with_capacity=False)
    assert prof.covering_lo == prof.covering_hi == GRID10_COUNTS


def test_grid_entropy_is_n_minus_one():
    prof = entropy_profile(grid(10), 8, n_min=1, with_capacity=False)
    assert [prof.eta(n)[1] for n in range(1, 9)] == [n - 1 for n in range(1, 9)]


def test_line_grid_matches_dense_grid():
    for n in range(1, 7):
        a = covering_number(grid(6), p2(n))
        b = covering_number(LineGrid(6), p2(n))
        assert (a.lo, a.hi) == (b.lo, b.hi)


def test_cantor_counts():
    C = cantor_truncation(12)
    for n in range(11):
        res = covering_number(C, p2(n))
        assert res.lo == res.hi == 2 ** n


def test_small_spaces_against_brute_force():
    rng = random.Random(0)
    for _ in range(15):
        S = random_space(rng, rng.randint(3, 9), 2, 4)
        pts = list(range(len(S)))
        for n in range(5):
            r = p2(n)
            assert covering_number(S, r).hi == covering_brute(pts, S.dist, r)
            assert capacity(S, r).hi == packing_brute(pts, S.dist, r)


def test_grid_capacity_bracketed():
    G = grid(6)
    c = capacity(G, p2(4))
    assert covering_number(G, p2(4)).hi <= c.lo and c.hi <= covering_number(G, p2(5)).hi


def test_sandwich_on_random_spaces():
    rng = random.Random(1)
    for _ in range(25):
        S = random_space(rng, rng.randint(5, 20), 2, 5)
        prof = entropy_profile(S, resolution_limit(S))
        assert prof.sandwich_violations() == []
        for i in range(len(prof.ns) - 1):
            assert prof.covering_hi[i] <= prof.capacity_lo[i] <= prof.covering_lo[i + 1]


def test_product_entropy_law():
    X, Y = grid(3), grid(4)
    P = product_max(X, Y)
    eta = lambda S, n: ceil_log2(covering_number(S, p2(n)).hi)
    for n in range(4):
        lhs = eta(X, n) + eta(Y, n)
        mid = eta(P, n + 1) + 1
        assert lhs <= mid <= eta(X, n + 1) + eta(Y, n + 1) + 1


def test_product_counts_multiply_within_slack():
    X, Y = grid(3), grid(3)
    P = product_max(X, Y)
    for n in range(4):
        cx, cp = covering_number(X, p2(n)).hi, covering_number(P, p2(n))
        assert cp.lo <= cx * cx
        assert covering_number(X, p2(n + 1)).hi ** 2 >= cp.lo


def test_scaled_product_sum_law():
    spaces = [grid(4), grid(3), grid(2)]
    P = product_scaled(spaces)
    eta = lambda S, n: ceil_log2(covering_number(S, p2(n)).hi)
    for n in range(4):
        total = sum(eta(spaces[j], n - j) for j in range(min(n + 1, len(spaces))))
        assert total <= eta(P, n + 1) + -(-n // 2)


def test_hilbert_counts():
    # the measured counts are 2^{n(n-1)/2}; see the acceptance suite for the comparison
    H = hilbert_truncated(4)
    assert [covering_number(H, p2(n)).hi for n in range(1, 5)] == [2 ** (n * (n - 1) // 2) for n in range(1, 5)]


def test_log_rescaled_distance():
    assert log_rescaled_distance(p2(3)) == Fraction(1, 4)
    assert log_rescaled_distance(Fraction(0)) == 0


def test_log_rescaled_profile():
    G = grid(8)
    L = rescale_log(G)
    for n in range(4):
        a = covering_number(L, p2(n))
        b = covering_number(G, p2(2 ** n - 1))
        assert (a.lo, a.hi) == (b.lo, b.hi)


def test_connected_bound_on_grid():
    assert connected_lower_bound_check(grid(6), 6)


def test_connected_bound_on_trees():
    rng = random.Random(2)
    for _ in range(10):
        T = random_tree_space(rng, 16, k=8, max_edge=1)
        for n in range(1, 9):
            assert connected_lower_bound_check(T, n)


def test_connected_bound_detects_gaps():
    S = DenseSpace.from_fractions(["a", "b"], [[0, Fraction(1)], [Fraction(1), 0]])
    with pytest.raises(NotConnectedAtScale):
        connected_lower_bound_check(S, 4)


def test_hyperspace_entropy_bounds():
    rng = random.Random(3)
    eta = lambda S, n: ceil_log2(covering_number(S, p2(n), 40).hi)
    for _ in range(5):
        S = random_space(rng, 5, 2, 4)
        K = hyperspace_space(S)
        for n in range(4):
            e = eta(S, n)
            assert eta(K, n) <= 2 ** e
            if e:
                assert 2 ** (e - 1) < eta(K, n + 1)


def test_hyperspace_size_cap():
    with pytest.raises(SizeCapExceeded):
        hyperspace_space(grid(4))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 16), min_size=1, max_size=6), st.lists(st.integers(0, 16), min_size=1, max_size=6))
def test_hausdorff_matches_brute(A, B):
    G = grid(4)
    assert hausdorff_distance(A, B, G) == hausdorff_brute(A, B, G.dist)


def test_resolution_guard():
    with pytest.raises(ResolutionExceeded):
        entropy_profile(grid(4), 5)
    assert resolution_limit(grid(4)) == 4


def test_json_roundtrip_and_validation():
    G = grid(3)
    S = load_space(G.to_json())
    assert [S.dist(0, j) for j in range(len(S))] == [G.dist(0, j) for j in range(len(G))]
    bad = {"labels": ["a", "b", "c"], "dist": [[0, 1, 4], [1, 0, 1], [4, 1, 0]]}
    with pytest.raises(MetricValidationError):
        load_space(json.dumps(bad))
    with pytest.raises(MetricValidationError):
        load_space('{"labels": ["a"], "dist": [["1/3"]]}')
