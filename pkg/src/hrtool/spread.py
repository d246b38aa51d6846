"""Spreadness checks, maximal spread restrictions and the spread lemma.

F is r-spread when r^|X| * |F(X)| <= |F| for every X. Only X contained in
some member can violate this, so all checks enumerate submasks of members.
r is kept as a Fraction p/q and compared as p^a * c <= q^a * |F| in integers.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bits import set_key, submasks
from .family import SetFamily, restrict


@dataclass(frozen=True)
class SpreadCertificate:
    r: Fraction
    verdict: bool
    violator: int | None = None     # X with |F(X)| > r^-|X| |F|
    count: int | None = None        # |F(X)| at the violator
    T: int | None = None            # restriction set, for (r,f)-spread checks


def _as_fraction(r) -> Fraction:
    r = Fraction(r)
    if r <= 0:
        raise ValueError("spread parameter r must be positive")
    return r


def containment_counts(members) -> Counter:
    """X -> number of members containing X, over all submasks of members."""
    cnt: Counter = Counter()
    for m in members:
        for sub in submasks(m):
            cnt[sub] += 1
    return cnt


def is_spread(F: SetFamily, r) -> SpreadCertificate:
    r = _as_fraction(r)
    if not F.members:
        raise ValueError("is_spread needs a nonempty family")
    p, q = r.numerator, r.denominator
    N = len(F)
    bad = [X for X, c in containment_counts(F.members).items()
           if X and p ** X.bit_count() * c > q ** X.bit_count() * N]
    if not bad:
        return SpreadCertificate(r, True)
    X = min(bad, key=set_key)
    return SpreadCertificate(r, False, X, sum(1 for m in F.members if m & X == X))


def find_spread_restriction(F: SetFamily, r) -> tuple[int, SetFamily]:
    """An inclusion-maximal X with |F(X)| >= r^-|X| |F|, and F(X).

    X grows one element at a time (largest |F(X+e)|, then smallest e); when no
    single element qualifies, any qualifying larger extension is taken
    (smallest first), so the final X is maximal among all supersets.
    """
    r = _as_fraction(r)
    if not F.members:
        raise ValueError("find_spread_restriction needs a nonempty family")
    p, q = r.numerator, r.denominator
    N = len(F)
    X = 0
    while True:
        FX = [m & ~X for m in F.members if m & X == X]
        cnt = containment_counts(FX)
        base = X.bit_count()

        def ok(Y: int) -> bool:
            a = base + Y.bit_count()
            return p ** a * cnt[Y] >= q ** a * N

        singles = [Y for Y in cnt if Y.bit_count() == 1 and ok(Y)]
        if singles:
            X |= min(singles, key=lambda Y: (-cnt[Y], Y))
            continue
        larger = [Y for Y in cnt if Y.bit_count() > 1 and ok(Y)]
        if larger:
            X |= min(larger, key=set_key)
            continue
        break
    FX_fam = restrict(F, X)
    cert = is_spread(FX_fam, r)
    if not cert.verdict:
        raise AssertionError(f"restriction to a maximal X is not {r}-spread")
    return X, FX_fam


def is_rf_spread(F: SetFamily, r, f: int) -> SpreadCertificate:
    """Is F(T) r-spread for every T with |T| <= f? First failing T reported."""
    r = _as_fraction(r)
    if not F.members:
        return SpreadCertificate(r, True)
    Ts = {T for m in F.members for T in submasks(m) if T.bit_count() <= f}
    for T in sorted(Ts, key=set_key):
        cert = is_spread(restrict(F, T), r)
        if not cert.verdict:
            return SpreadCertificate(r, False, cert.violator, cert.count, T)
    return SpreadCertificate(r, True)


def binary_entropy(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def spread_lemma_bounds(k: int, beta: int, delta, r) -> tuple[float, float]:
    """(classic, refined) lower bounds on Pr[W contains a member].

    classic uses 1 - (5 / log2(r delta))^beta k, refined replaces 5 by 1 + h2(delta).
    Both are -inf when log2(r delta) <= 0.
    """
    L = math.log2(float(Fraction(r) * Fraction(delta)))
    if L <= 0:
        return -math.inf, -math.inf
    d = float(delta)
    return 1 - (5 / L) ** beta * k, 1 - ((1 + binary_entropy(d)) / L) ** beta * k


@dataclass(frozen=True)
class SpreadTrial:
    estimate: float
    stderr: float
    trials: int
    p: float
    bound: float
    bound_classic: float
    bound_refined: float

    @property
    def consistent(self) -> bool:
        """estimate >= bound - 3 stderr (vacuous when the bound is not positive)."""
        return self.bound <= 0 or self.estimate >= self.bound - 3 * self.stderr


CHUNK = 4096


def spread_lemma_trial(F: SetFamily, beta: int, delta, r, trials: int, seed: int) -> SpreadTrial:
    """Monte Carlo estimate of Pr[some member lies inside a (beta*delta)-random W].

    Chunk c of trials draws from default_rng([seed, c]), so the estimate does
    not depend on how chunks are scheduled.
    """
    delta = Fraction(delta)
    if beta < 1 or delta <= 0 or beta * delta > 1:
        raise ValueError("spread_lemma_trial needs beta >= 1 and 0 < beta*delta <= 1")
    if not is_spread(F, r).verdict:
        raise ValueError(f"family is not {r}-spread")
    n = F.n
    p = float(beta * delta)
    k = F.max_size
    M = np.zeros((len(F), n), dtype=np.float32)
    for row, m in enumerate(F.members):
        for b in range(n):
            if m >> b & 1:
                M[row, b] = 1.0
    sizes = M.sum(axis=1)
    hits = 0
    done = 0
    chunk_index = 0
    while done < trials:
        size = min(CHUNK, trials - done)
        rng = np.random.default_rng([seed, chunk_index])
        W = (rng.random((size, n)) < p).astype(np.float32)
        inside = W @ M.T
        hits += int(np.count_nonzero((inside == sizes).any(axis=1)))
        done += size
        chunk_index += 1
    est = hits / trials
    stderr = math.sqrt(max(est * (1 - est), 0.0) / trials)
    classic, refined = spread_lemma_bounds(k, beta, delta, r)
    return SpreadTrial(est, stderr, trials, p, max(classic, refined), classic, refined)
