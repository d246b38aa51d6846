import math
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from hrtool.bits import mask_of
from hrtool.family import SetFamily, generated_family
from hrtool.matching import (ConflictGraph, covering_number, dense_pair, find_sunflower, is_matching,
                             nu, turan_lower_bound, vi_class, vi_partition)
from oracles import as_sets, brute_cover, brute_nu, fam, families

M = mask_of


def test_nu_examples():
    F = fam(6, [1, 2, 3], [4, 5, 6], [1, 2, 4], [1, 2, 5])
    v, wit = nu(F, 2)
    assert v == 2
    assert is_matching([F.members[i] for i in wit], 2)
    assert nu(fam(5, [1, 2, 3]), 2)[0] == 1
    star = generated_family(fam(7, [1, 2]), 4)
    assert nu(star, 2)[0] == 1
    assert nu(SetFamily(4, ()), 1) == (0, [])
    assert nu(fam(4, [1], [1, 2, 3]), 2)[0] == math.inf
    assert nu(fam(4, [1], [1, 2, 3]), 2, cap=3)[0] == 4


@given(families(n_max=7, size_max=4, count_max=9), st.integers(1, 3))
def test_nu_matches_brute_force(F, t):
    v, wit = nu(F, t)
    assert v == brute_nu(as_sets(F), t)
    if v != math.inf:
        assert len(wit) == v and is_matching([F.members[i] for i in wit], t)


@given(families(n_max=7, size_max=4, count_max=9, min_size=2), st.integers(1, 2), st.integers(0, 4))
def test_nu_cap(F, t, cap):
    full = nu(F, t)[0]
    assert nu(F, t, cap=cap)[0] == min(full, cap + 1)


@given(families(n_max=7, size_max=4, count_max=9, min_size=3))
def test_nu_monotone(F):
    assert nu(F, 1)[0] <= nu(F, 2)[0] <= nu(F, 3)[0]
    sub = F.with_members(F.members[::2])
    assert nu(sub, 2)[0] <= nu(F, 2)[0]


@given(families(n_max=9, size_max=3, count_max=12, min_size=2, uniform=True), st.integers(1, 3))
def test_turan_bound_on_intersection_graph(F, s):
    t = 1
    if nu(F, t, cap=s)[0] > s:
        return
    assert ConflictGraph.of(F, t).intersecting_pairs() >= turan_lower_bound(len(F), s)


def test_turan_examples():
    assert turan_lower_bound(4, 2) == 2
    assert turan_lower_bound(6, 2) == 6
    assert turan_lower_bound(2, 3) == 0


def test_dense_pair_examples():
    F = SetFamily.complete(4, 3)          # C([t+2], t+1) with t = 2
    A, B, common = dense_pair(F, 2, 1)
    assert len(common) == len(F) - 2
    with pytest.raises(ValueError):
        dense_pair(fam(4, [1, 2], [3, 4]), 2, 2)


@given(st.integers(0, 10 ** 6))
def test_dense_pair_is_optimal_and_dense(seed):
    import random
    rng = random.Random(seed)
    n, k, t, s = 8, 3, 2, 2
    pool = [M(c) for c in combinations(range(1, n + 1), k)]
    rng.shuffle(pool)
    chosen = []
    for m in pool:
        if nu(SetFamily(n, tuple(chosen + [m])), t, cap=s)[0] <= s:
            chosen.append(m)
    F = SetFamily(n, tuple(chosen))
    A, B, common = dense_pair(F, t, s)
    best = 0
    for a, b in combinations(F.members, 2):
        c = (a & b).bit_count()
        if c >= t:
            best = max(best, sum(1 for C in F.members if C not in (a, b)
                                 and (C & a).bit_count() >= c and (C & b).bit_count() >= c))
    assert len(common) == best
    if len(F) >= 8 * s * s:
        assert 4 * s * s * len(common) >= len(F)


def test_cover_examples():
    star = generated_family(fam(5, [1]), 2)
    assert covering_number(star) == (1, M([1]))
    assert covering_number(fam(4, [1, 2], [3, 4]))[0] == 2
    assert covering_number(fam(3, [1, 2], [2, 3], [1, 3]))[0] == 2
    with pytest.raises(ValueError):
        covering_number(SetFamily(3, (0,)))


@given(families(n_max=7, size_max=3, count_max=9))
def test_cover_matches_brute_force(F):
    tau, T = covering_number(F)
    assert all(m & T for m in F.members)
    assert tau == T.bit_count() == brute_cover(as_sets(F), F.n)


def test_sunflower_examples():
    assert find_sunflower(fam(4, [1, 2], [1, 3], [1, 4]), 3).core == M([1])
    assert find_sunflower(fam(4, [1, 2], [3, 4]), 2) is None
    assert find_sunflower(fam(5, [1, 2, 3], [1, 2, 4], [1, 2, 5]), 3).core == M([1, 2])
    with pytest.raises(ValueError):
        find_sunflower(fam(4, [1, 2], [1, 2, 3]), 2)


def test_vi_partition():
    assert vi_class(M([1, 2, 3]), 5) == 1
    for r in range(3, 11):
        for k in range(1, min(r, 4) + 1):
            parts = vi_partition(r, k)
            assert sum(len(p) for p in parts) == math.comb(r, k)
            for p in parts:
                assert all((a & b).bit_count() <= k - 2 for a, b in combinations(p.members, 2))
