import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from hrtool.approx import (DriverConfig, OracleFailure, choose_dense_set, clique_generators, dense_piece,
                           density_oracle, extract_cliques, initial_schedule, iterative_driver, peel,
                           peel_checks, spread_approximate, trivial_oracle)
from hrtool.bits import k_subsets, mask_of
from hrtool.constructions import CliqueProfile, binom
from hrtool.family import SetFamily, generated_family, simplify
from hrtool.matching import nu
from oracles import fam

M = mask_of


def greedy_family(rng, n, k, t, s, tries):
    pool = [M(c) for c in combinations(range(1, n + 1), k)]
    chosen = []
    for m in rng.sample(pool, min(tries, len(pool))):
        if nu(SetFamily(n, tuple(chosen + [m])), t, cap=s)[0] <= s:
            chosen.append(m)
    return SetFamily(n, tuple(chosen))


# ---------------------------------------------------------------- peel

def test_peel_example():
    S = fam(6, [1, 2, 3], [1, 2, 4], [3, 4])
    tr = peel(S, 2, 2, 3)
    assert all(peel_checks(tr, k=3).values())
    assert tr.chain[3] == simplify(S, 2, 2)


def test_peel_of_t_sets_is_constant():
    S = fam(6, [1, 2], [3, 4])
    tr = peel(S, 2, 2, 4)
    assert all(len(W) == 0 for W in tr.layers.values())
    assert all(T == S for T in tr.chain.values())
    assert tr.phi == 4


def test_peel_rejects_large_nu():
    with pytest.raises(ValueError):
        peel(fam(6, [1, 2], [3, 4], [5, 6]), 2, 2, 3)


@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_peel_invariants_random(seed, s):
    rng = random.Random(seed)
    S = simplify(greedy_family(rng, 9, 4, 2, s, 40), 2, s)
    tr = peel(S, 2, s, 4)
    checks = peel_checks(tr, k=4)
    assert all(checks.values()), checks


# ------------------------------------------------- spread approximation

def test_small_family_goes_to_remainder():
    F = SetFamily.complete(6, 3)
    dec = spread_approximate(F, 100, binom(6, 3), 0, 0, 3, 1, trivial_oracle)
    assert len(dec.S) == 0 and dec.R == F


def test_trivial_oracle_plain_approximation():
    F = SetFamily.complete(9, 3)
    dec = spread_approximate(F, 1, binom(9, 3), 0, 0, 3, 2, trivial_oracle)
    assert dec.S.members == (0,) and len(dec.R) == 0


def test_trivial_oracle_needs_theta_C_n_k():
    F = SetFamily.complete(8, 3)
    with pytest.raises(OracleFailure):
        spread_approximate(F, 1, 1, 0, 0, 3, 2, trivial_oracle)


def test_spread_approximate_preconditions():
    F = SetFamily.complete(8, 3)
    with pytest.raises(ValueError):
        spread_approximate(F, 1, 1, 0, 0, 3, 4, trivial_oracle)   # r > (n - l1)/(k - l1)
    with pytest.raises(ValueError):
        spread_approximate(F, 1, 1, 3, 3, 3, 1, trivial_oracle)   # l1 = k


@given(st.integers(0, 10 ** 6))
def test_spread_approximate_random(seed):
    rng = random.Random(seed)
    pool = list(k_subsets((1 << 12) - 1, 4))
    F = SetFamily(12, tuple(rng.sample(pool, rng.randint(1, 150))))
    l1 = rng.randint(0, 2)
    l2 = rng.randint(l1, 3)
    q = rng.randint(l2, 4)
    r = min(Fraction(rng.randint(2, 8), 2), Fraction(12 - l1, 4 - l1))
    dec = spread_approximate(F, rng.choice([1, 4, 16]), binom(12, 4), l1, l2, q, r, density_oracle(l1, l2))
    assert sum(len(p) for p in dec.pieces.values()) + len(dec.R) == len(F)
    assert all(A.bit_count() <= q for A in dec.S.members)


# ------------------------------------------------------------ dense piece

def test_dense_piece_on_a_clique():
    t1, x = 2, 1
    Y = M([1, 2, 3, 4])
    G = SetFamily(8, tuple(k_subsets(Y, t1 + x)))
    F = generated_family(G, 4)
    dp = dense_piece(F, G, t1, 1, t1 + x, Fraction(1, 100))
    assert dp.X & ~Y == 0 and t1 <= dp.X.bit_count() <= t1 + 2 * x
    assert dp.choice.pigeonhole_ok


def test_dense_piece_threshold():
    G = fam(8, [1, 2, 3])
    F = generated_family(G, 4)
    with pytest.raises(ValueError):
        dense_piece(F, G, 2, 1, 3, 1)


@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_pigeonhole_ratio(seed, s):
    rng = random.Random(seed)
    G = greedy_family(rng, 9, 3, 2, s, 50)
    if not any((a & b).bit_count() >= 2 for a, b in combinations(G.members, 2)):
        return
    ch = choose_dense_set(G, 2, s, 3)
    assert ch.pigeonhole_ok
    assert ch.g_count == sum(1 for g in G.members if g & ch.X == ch.X)


# ---------------------------------------------------------- extraction

def test_extract_single_t_set():
    assert extract_cliques(fam(6, [1, 2]), 2, 1, 0) == [(M([1, 2]), 0)]


@given(st.integers(0, 10 ** 6))
def test_extract_round_trip(seed):
    rng = random.Random(seed)
    t, s = rng.randint(1, 3), rng.randint(1, 3)
    xs = tuple(rng.randint(0, 2) for _ in range(s))
    n = 14
    if sum(t + 2 * x for x in xs) > n:
        return
    p = CliqueProfile(n, t + max(xs), t, xs)
    K = SetFamily(n, tuple(p.generators()))
    cl = extract_cliques(K, t, s, max(xs))
    assert cl is not None and clique_generators(n, t, cl) == K
    assert sorted(x for _, x in cl) == sorted(xs)


def test_extract_on_the_14_set_family():
    S = SetFamily(6, tuple(list(k_subsets(M(range(1, 6)), 3)) + [M([5, 6, e]) for e in range(1, 5)]))
    assert len(S) == 14
    cl = extract_cliques(S, 2, 3, 1, 3)
    if cl is not None:
        assert generated_family(clique_generators(6, 2, cl), 3) != S


# -------------------------------------------------------------- driver

def test_initial_schedule():
    for t in range(1, 50):
        assert initial_schedule(t, 2, 1)[1] == t - __import__("math").ceil(t ** 0.5)


def test_driver_round_trip():
    n, k, t, s, x = 12, 4, 2, 2, 1
    p = CliqueProfile(n, k, t, (x,) * s)
    K = SetFamily(n, tuple(p.generators()))
    F = generated_family(K, k)
    res = iterative_driver(F, t, s, sigma=8, config=DriverConfig(t_prime=t, l1=t + x, l2=t + x, q=t + x))
    S = res.decomposition.S
    assert S == K and nu(S, t)[0] <= s
    cl = extract_cliques(S, t, s, x, k)
    assert sorted(x for _, x in cl) == [x] * s
    assert len(res.decomposition.R) <= res.decomposition.remainder_bound()


def test_driver_default_schedule_structural():
    rng = random.Random(3)
    F = greedy_family(rng, 10, 4, 3, 2, 80)
    res = iterative_driver(F, 3, 2, sigma=2)
    q, _ = initial_schedule(3, 2, 2)
    assert 1 <= len(res.steps) <= 15 * 3
    assert nu(res.decomposition.S, max(res.t_prime, 1), cap=2)[0] <= 2 or res.t_prime == 0
    with pytest.raises(ValueError):
        iterative_driver(fam(6, [1, 2, 3], [4, 5, 6]), 1, 1, 1)
