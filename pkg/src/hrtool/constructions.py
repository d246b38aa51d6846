"""Exact counts for the extremal constructions and the bounds they are compared with.

Everything here is integer arithmetic on Python ints (or Fractions where a
ratio is unavoidable); nothing goes through floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

from .bits import mask_of
from .config import enumeration_cap


def binom(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def size_D_i(n: int, k: int, t: int, i: int) -> int:
    """|D_i|: k-sets meeting a fixed (t+2i)-set in at least t+i elements."""
    if not 0 <= i <= k - t or n < t + 2 * i or t < 0:
        raise ValueError(f"size_D_i out of range: n={n} k={k} t={t} i={i}")
    y = t + 2 * i
    return sum(binom(y, a) * binom(n - y, k - a) for a in range(t + i, y + 1))


def size_AM(n: int, k: int, t: int, s: int) -> int:
    """h'(n,k,t,s) = |A[M]| for M a matching of s disjoint t-sets."""
    if n < s * t:
        raise ValueError(f"size_AM needs n >= s*t (n={n}, s={s}, t={t})")
    return sum((-1) ** (j + 1) * binom(s, j) * binom(n - j * t, k - j * t) for j in range(1, s + 1))


@dataclass(frozen=True)
class CliqueProfile:
    """Data of a union of s t-intersecting cliques C(Y_i, t+x_i), |Y_i| = t+2x_i."""

    n: int
    k: int
    t: int
    xs: tuple[int, ...]
    supports: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(self.xs))
        for x in self.xs:
            if not 0 <= x <= self.k - self.t:
                raise ValueError(f"profile entry {x} outside [0, k-t]")
        if self.supports is not None:
            sup = tuple(self.supports)
            object.__setattr__(self, "supports", sup)
            if len(sup) != len(self.xs):
                raise ValueError("one support per clique is required")
            used = 0
            for Y, x in zip(sup, self.xs):
                if Y.bit_count() != self.t + 2 * x:
                    raise ValueError("support size must be t + 2x")
                if Y & used:
                    raise ValueError("supports must be pairwise disjoint")
                if Y >> self.n:
                    raise ValueError("support outside the ground set")
                used |= Y
        elif self.footprint > self.n:
            raise ValueError(f"profile needs {self.footprint} > n={self.n} points for disjoint supports")

    @property
    def s(self) -> int:
        return len(self.xs)

    @property
    def footprint(self) -> int:
        return sum(self.t + 2 * x for x in self.xs)

    def canonical_supports(self) -> tuple[int, ...]:
        if self.supports is not None:
            return self.supports
        out, start = [], 1
        for x in self.xs:
            size = self.t + 2 * x
            out.append(mask_of(range(start, start + size)))
            start += size
        return tuple(out)

    def generators(self) -> list[int]:
        """The members of K, i.e. all (t+x_i)-subsets of each Y_i."""
        from .bits import k_subsets

        gens: list[int] = []
        for Y, x in zip(self.canonical_supports(), self.xs):
            gens.extend(k_subsets(Y, self.t + x))
        return gens


def size_AK_exact(p: CliqueProfile) -> int:
    """|A[K]| by counting the complement with a convolution over blocks.

    A k-set avoids A[K] iff it meets every Y_i in fewer than t+x_i points.
    poly[a] counts the ways to place a points inside the blocks seen so far
    while violating each block's threshold.
    """
    n, k, t = p.n, p.k, p.t
    poly = [1]
    for x in p.xs:
        size = t + 2 * x
        block = [binom(size, a) for a in range(min(t + x, size + 1))]
        new = [0] * min(len(poly) + len(block) - 1, k + 1)
        for a, ca in enumerate(poly):
            if ca == 0:
                continue
            for b, cb in enumerate(block):
                if a + b > k:
                    break
                new[a + b] += ca * cb
        poly = new
    rest = n - p.footprint
    avoid = sum(c * binom(rest, k - a) for a, c in enumerate(poly))
    return binom(n, k) - avoid


@dataclass(frozen=True)
class ProfileOptimum:
    value: int
    argmax: tuple[int, ...]
    exhaustive: bool = True


def sorted_profiles(n: int, k: int, t: int, s: int):
    """Non-increasing profiles x_1 >= ... >= x_s fitting in n points."""
    for combo in combinations_with_replacement(range(k - t, -1, -1), s):
        if sum(t + 2 * x for x in combo) <= n:
            yield combo


def h_opt(n: int, k: int, t: int, s: int, cap: int | None = None) -> ProfileOptimum:
    """h(n,k,t,s): the best disjoint-support clique profile.

    Ties go to the lexicographically largest non-increasing profile, i.e. the
    first one met in enumeration order. Past the cap, a coordinate-wise
    hill climb from the all-zero profile is used and the result is flagged
    as not exhaustive.
    """
    if n < s * t or k < t or s < 1:
        raise ValueError(f"h_opt infeasible: n={n} k={k} t={t} s={s}")
    if cap is None:
        cap = enumeration_cap()
    if math.comb(k - t + s, s) <= cap:
        best = None
        for xs in sorted_profiles(n, k, t, s):
            v = size_AK_exact(CliqueProfile(n, k, t, xs))
            if best is None or v > best[0]:
                best = (v, xs)
        return ProfileOptimum(best[0], best[1], True)
    xs = [0] * s
    val = size_AK_exact(CliqueProfile(n, k, t, tuple(xs)))
    improved = True
    while improved:
        improved = False
        for i in range(s):
            for d in (1, -1):
                ys = list(xs)
                ys[i] += d
                if not 0 <= ys[i] <= k - t or sum(t + 2 * y for y in ys) > n:
                    continue
                v = size_AK_exact(CliqueProfile(n, k, t, tuple(ys)))
                if v > val:
                    xs, val, improved = ys, v, True
    return ProfileOptimum(val, tuple(sorted(xs, reverse=True)), False)


def lemma_hypotheses(n: int, k: int, t: int, s: int, C: float = 1.0) -> bool:
    """t >= 8 and n >= k + C*sqrt(s*t)*(k-t)."""
    return t >= 8 and n >= k + C * math.sqrt(s * t) * (k - t)


def h_monotonicity_check(n: int, k: int, t: int, s: int) -> bool:
    """h(s) >= h(s-1) + (1 - 1/(10 s^3)) h(1), compared in integers."""
    if s < 2:
        raise ValueError("h_monotonicity_check needs s >= 2")
    hs = h_opt(n, k, t, s).value
    hs1 = h_opt(n, k, t, s - 1).value
    h1 = h_opt(n, k, t, 1).value
    d = 10 * s ** 3
    return d * hs >= d * hs1 + (d - 1) * h1


def emc_bound(n: int, k: int, s: int) -> int:
    if n < k * (s + 1):
        raise ValueError(f"emc_bound needs n >= k(s+1) (n={n}, k={k}, s={s})")
    return max(binom(k * s + k - 1, k), binom(n, k) - binom(n - s, k))


def ekr_bound(n: int, k: int, t: int) -> int:
    return binom(n - t, k - t)


def f_beta(i: int, t: int, m: int, beta: int, s: int, ell: int) -> int:
    if not 0 <= i <= m or beta < 0:
        raise ValueError("f_beta needs 0 <= i <= m and beta >= 0")
    return binom(t - beta, t - i) * binom(m + beta, i) ** 2 * (s * (ell + 1)) ** (m - i)


def f_beta_decay(n: int, k: int, t: int, s: int, ell: int, m: int, i: int, beta: int,
                 gamma: Fraction) -> tuple[Fraction, Fraction]:
    """(lhs, rhs) of f_beta(i) C(n-t-m, k-t-m) / |D_{i-beta}| <= (2s(l+1))^-beta gamma^-(m-i+1)."""
    lhs = Fraction(f_beta(i, t, m, beta, s, ell) * binom(n - t - m, k - t - m), size_D_i(n, k, t, i - beta))
    rhs = Fraction(1, (2 * s * (ell + 1)) ** beta) / Fraction(gamma) ** (m - i + 1)
    return lhs, rhs


def size_E_i_closed_form(n: int, k: int, t: int, s: int, i: int) -> int:
    if n < s * (t + 2 * i):
        raise ValueError("size_E_i needs n >= s(t+2i)")
    return sum((-1) ** (j + 1) * binom(s, j) * binom(n - j * (t + 2 * i), k - j * (t + i))
               for j in range(1, s + 1))


def size_E_i_exact(n: int, k: int, t: int, s: int, i: int) -> int:
    if n < s * (t + 2 * i):
        raise ValueError("size_E_i needs n >= s(t+2i)")
    return size_AK_exact(CliqueProfile(n, k, t, (i,) * s))


@dataclass(frozen=True)
class Sandwich:
    n: int
    k: int
    t: int
    s: int
    i: int
    exact: int
    unit: int           # s * C(t+2i, i) * C(n-t-i, k-t-i)
    lower_ok: bool      # 0.98 * unit <= exact
    upper_ok: bool      # exact <= unit

    @property
    def holds(self) -> bool:
        return self.lower_ok and self.upper_ok

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.exact, self.unit) if self.unit else Fraction(0)


def e_i_sandwich(n: int, k: int, t: int, s: int, i: int) -> Sandwich:
    exact = size_E_i_exact(n, k, t, s, i)
    unit = s * binom(t + 2 * i, i) * binom(n - t - i, k - t - i)
    return Sandwich(n, k, t, s, i, exact, unit, 100 * exact >= 98 * unit, exact <= unit)


def sandwich_hypotheses(n: int, k: int, t: int, s: int, i: int, ell: int, C: int = 1000) -> bool:
    """t >= 400 l^3 s, n > k + C sqrt(st)(k-t), n >= C s l^4 (k-t), i <= l."""
    return (t >= 400 * ell ** 3 * s and i <= ell
            and (n - k) ** 2 > C * C * s * t * (k - t) ** 2 and n > k
            and n >= C * s * ell ** 4 * (k - t))


