"""Linear programming upper bound for t-intersecting k-uniform families.

The family is a code in the Johnson scheme J(n, k) whose distances
k - |A & B| avoid k-t+1..k. A feasible dual vector b >= 0 with
1 + sum_i b_i Q_i(j) <= 0 for the allowed distances j = 1..k-t gives
|F| <= 1 + sum_i b_i Q_i(0). scipy finds b in floating point; the bound
is only returned after b has been made rational and checked exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .constructions import binom


def eberlein(n: int, k: int, j: int, i: int) -> int:
    return sum((-1) ** h * binom(i, h) * binom(k - i, j - h) * binom(n - k - i, j - h) for h in range(j + 1))


def dual_eigenvalue(n: int, k: int, i: int, j: int) -> Fraction:
    """Q_i(j) = m_i P_j(i) / v_j."""
    m_i = binom(n, i) - binom(n, i - 1)
    v_j = binom(k, j) * binom(n - k, j)
    return Fraction(m_i * eberlein(n, k, j, i), v_j)


def delsarte_bound(n: int, k: int, t: int) -> int | None:
    """An exact-checked integer upper bound on t-intersecting families, or None.

    Only k <= n/2 is handled (the formulas above assume it).
    """
    if not 1 <= t <= k or 2 * k > n:
        return None
    if t == k:
        return 1
    from scipy.optimize import linprog

    Q = [[dual_eigenvalue(n, k, i, j) for i in range(1, k + 1)] for j in range(1, k - t + 1)]
    m = [binom(n, i) - binom(n, i - 1) for i in range(1, k + 1)]
    res = linprog(c=[float(x) for x in m],
                  A_ub=[[float(x) for x in row] for row in Q],
                  b_ub=[-1.0] * len(Q),
                  bounds=[(0, None)] * k, method="highs")
    if res.status != 0:
        return None
    b = [max(Fraction(x).limit_denominator(10 ** 9), Fraction(0)) for x in res.x]
    lhs = [sum(bi * q for bi, q in zip(b, row)) for row in Q]
    if any(v >= 0 for v in lhs):
        return None
    scale = max(Fraction(1), max(1 / -v for v in lhs))
    b = [bi * scale for bi in b]
    if any(1 + sum(bi * q for bi, q in zip(b, row)) > 0 for row in Q):
        return None
    return math.floor(1 + sum(bi * mi for bi, mi in zip(b, m)))
