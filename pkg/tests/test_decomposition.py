import random
from fractions import Fraction

import pytest

from kcert import (Hypergraph, decompose_for_cover, decompose_for_refutation, gen_random,
                   validate_decomposition)
from kcert.decomposition import (Group, ceil_rational_power_half, cover_group_size,
                                 refutation_threshold)


def test_ceil_rational_power_half():
    # (16/4)^(1/2) = 2, (16/4)^(-1/2) -> 1, (9/2)^(3/2) = 9.545... -> 10
    assert ceil_rational_power_half(16, 4, 1) == 2
    assert ceil_rational_power_half(16, 4, -1) == 1
    assert ceil_rational_power_half(9, 2, 3) == 10
    assert ceil_rational_power_half(8, 2, 2) == 4
    assert ceil_rational_power_half(5, 2, 1) == 2      # sqrt(2.5) = 1.58 -> 2


def test_cover_hand_trace():
    h = Hypergraph(n=16, k=3, edges=((0, 1, 2), (0, 1, 3)))
    d = decompose_for_cover(h, 4)
    assert cover_group_size(16, 4, 3, 2) == 2
    level2 = d.groups_at(2)
    assert len(level2) == 1
    assert level2[0].center == (0, 1)
    assert level2[0].clause_indices == (0, 1)
    assert d.groups_at(1) == () and d.groups_at(0) == ()


def test_cover_disjoint_clauses_all_leftover():
    h = Hypergraph(n=12, k=3, edges=((0, 1, 2), (3, 4, 5), (6, 7, 8), (9, 10, 11)))
    d = decompose_for_cover(h, 3)
    assert d.m_t(0) == 4
    assert all(d.m_t(t) == 0 for t in range(1, 3))


def test_cover_empty_hypergraph():
    h = Hypergraph(n=5, k=3, edges=())
    d = decompose_for_cover(h, 2)
    assert all(d.m_t(t) == 0 for t in d.levels())
    assert validate_decomposition(h, d).passed


def test_refutation_threshold_multiplier():
    # ceil(4k/eps^2) with k = 3, eps = 1/2 is 48
    assert refutation_threshold(16, 4, 3, 2, Fraction(1, 2)) == 48
    assert refutation_threshold(16, 4, 3, 1, Fraction(1, 2)) == 2 * 48


def test_refutation_leftover_single_part():
    # all clauses contain vertex 0 and m is far below every threshold
    h = Hypergraph(n=20, k=3, edges=((0, 1, 2), (0, 3, 4), (0, 5, 6)))
    d = decompose_for_refutation(h, 2, Fraction(1, 4), enforce_ranges=False)
    level1 = d.groups_at(1)
    assert len(level1) == 1
    assert level1[0].center == (0,)
    assert sorted(level1[0].clause_indices) == [0, 1, 2]


def test_refutation_parameter_ranges():
    h = Hypergraph(n=12, k=3, edges=((0, 1, 2),))
    with pytest.raises(ValueError):
        decompose_for_refutation(h, 6, Fraction(1, 4))     # r > n/8
    with pytest.raises(ValueError):
        decompose_for_refutation(h, 1, Fraction(3, 4), enforce_ranges=False)   # eps out of range
    big = Hypergraph(n=80, k=3, edges=((0, 1, 2),))
    d = decompose_for_refutation(big, 8, Fraction(1, 4))
    assert d.m_t(1) == 1


def test_refutation_determinism():
    h = gen_random(10, 3, 30, seed=5, mode="hyg-multi")
    d1 = decompose_for_refutation(h, 2, Fraction(1, 4), enforce_ranges=False)
    d2 = decompose_for_refutation(h, 2, Fraction(1, 4), enforce_ranges=False)
    assert d1 == d2


def test_refutation_group_sizes():
    rng = random.Random(0)
    for trial in range(10):
        k = rng.choice([3, 5])
        n = rng.randrange(k + 2, 14)
        m = rng.randrange(5, 60)
        h = gen_random(n, k, m, seed=trial, mode="hyg-multi")
        d = decompose_for_refutation(h, 2, Fraction(2, 5), enforce_ranges=False)
        for t in range(2, k):
            for g in d.groups_at(t):
                assert len(g.clause_indices) == d.thresholds[t]
        for g in d.groups_at(1):
            assert len(g.clause_indices) <= d.thresholds[1]
        assert validate_decomposition(h, d).passed


def test_validate_passes_both_modes():
    rng = random.Random(1)
    for trial in range(10):
        k = rng.choice([3, 5])
        n = rng.randrange(k + 2, 14)
        m = rng.randrange(5, 60)
        h = gen_random(n, k, m, seed=100 + trial, mode="hyg-multi")
        dc = decompose_for_cover(h, max(1, n // 3))
        assert validate_decomposition(h, dc).passed, validate_decomposition(h, dc).failures
        dr = decompose_for_refutation(h, 2, Fraction(1, 3), enforce_ranges=False)
        assert validate_decomposition(h, dr).passed


def test_validate_detects_corruption():
    h = Hypergraph(n=16, k=3, edges=((0, 1, 2), (0, 1, 3), (4, 5, 6)))
    d = decompose_for_cover(h, 4)
    # move clause 2 into the level-2 group
    g2 = d.groups_at(2)[0]
    bad_groups = (Group(center=g2.center, clause_indices=g2.clause_indices + (2,), level=2),)
    bad = type(d)(mode=d.mode, n=d.n, k=d.k, r=d.r, eps=d.eps,
                  pieces={**d.pieces, 2: bad_groups, 0: ()}, thresholds=d.thresholds)
    rep = validate_decomposition(h, bad)
    assert not rep.passed
    assert any("size" in f or "center" in f for f in rep.failures)


def test_validate_detects_oversized_group():
    h = Hypergraph(n=16, k=3, edges=((0, 1, 2), (0, 1, 3), (0, 1, 4)))
    d = decompose_for_cover(h, 4)
    merged = (Group(center=(0, 1), clause_indices=(0, 1, 2), level=2),)
    bad = type(d)(mode=d.mode, n=d.n, k=d.k, r=d.r, eps=d.eps,
                  pieces={2: merged, 1: (), 0: ()}, thresholds=d.thresholds)
    rep = validate_decomposition(h, bad)
    assert not rep.passed
    assert any("size" in f for f in rep.failures)


def test_cover_level0_multiplicity_below_level1_threshold():
    # the "i != 0" argument at the level of the greedy rule
    rng = random.Random(7)
    for trial in range(6):
        n = rng.randrange(8, 14)
        h = gen_random(n, 3, rng.randrange(10, 50), seed=trial + 40, mode="hyg-multi")
        r = rng.randrange(1, n // 2)
        d = decompose_for_cover(h, r)
        thr1 = d.thresholds[1]
        counts = [0] * h.n
        for g in d.groups_at(0):
            for idx in g.clause_indices:
                for v in h.edges[idx]:
                    counts[v] += 1
        assert max(counts, default=0) < thr1
