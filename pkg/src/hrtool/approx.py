"""Peeling, spread approximation, the dense-piece finder, clique extraction
and the alternating driver built from them.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .bits import k_subsets, set_key, submasks
from .constructions import binom
from .family import SetFamily, generated_family, is_antichain, restrict, simplify
from .matching import dense_pair, nu, pair_common
from .spread import find_spread_restriction, is_spread

log = logging.getLogger(__name__)

E_LOWER = Fraction(2718, 1000)


# ---------------------------------------------------------------- peeling

@dataclass(frozen=True)
class PeelingTrace:
    n: int
    t: int
    s: int
    q: int
    chain: dict[int, SetFamily]        # i -> T_i, i = q..t
    layers: dict[int, SetFamily]       # i -> W_i, i = q..t+1
    phi: int
    tstar_sets: list[tuple[int, int]]  # (U_j, f(j)); the first ell come from T_q
    ell: int

    def decomposition_targets(self) -> list[int]:
        """{U_1..U_ell} + W_i (phi < i <= q) + T_{f(j)+1}[U_j] (j > ell)."""
        out = [U for U, _ in self.tstar_sets[:self.ell]]
        for i in range(self.phi + 1, self.q + 1):
            out.extend(self.layers[i].members)
        for U, f in self.tstar_sets[self.ell:]:
            out.extend(m for m in self.chain[f + 1].members if m & U == U)
        return sorted(set(out), key=set_key)


def peel(S: SetFamily, t: int, s: int, q: int, presimplify: bool = True) -> PeelingTrace:
    """Run the peeling procedure from T_q down to T_t.

    With presimplify the top family is simplify(S); that is S itself when S
    is already maximal.
    """
    if S.max_size > q:
        raise ValueError(f"peel needs all members of size <= q={q}")
    if q < t:
        raise ValueError("peel needs q >= t")
    if nu(S, t, cap=s)[0] > s:
        raise ValueError(f"peel needs nu(S,{t}) <= {s}")
    top = simplify(S, t, s) if presimplify else S
    chain = {q: top}
    layers = {}
    for i in range(q, t, -1):
        Ti = chain[i]
        W = [m for m in Ti.members if m.bit_count() == i]
        layers[i] = Ti.with_members(W)
        chain[i - 1] = simplify(Ti.with_members(m for m in Ti.members if m.bit_count() != i), t, s)
    phi = max(i for i in range(t, q + 1) if all(m.bit_count() == t for m in chain[i].members))
    in_top = [m for m in top.members if m.bit_count() == t]
    rest = [m for m in chain[phi].members if m not in top.memberset]
    tstar = []
    for U in in_top + rest:
        f = max(i for i in range(t, q + 1) if U in chain[i].memberset)
        tstar.append((U, f))
    return PeelingTrace(S.n, t, s, q, chain, layers, phi, tstar, len(in_top))


def peel_checks(trace: PeelingTrace, k: int | None = None) -> dict[str, bool]:
    """Structural checks on a trace; k enables the enumerated inclusion check."""
    t, s, q = trace.t, trace.s, trace.q
    out = {
        "antichains": all(is_antichain(T) for T in trace.chain.values()),
        "nu_bounded": all(nu(T, t, cap=s)[0] <= s for T in trace.chain.values()),
        "sizes": all(T.max_size <= i for i, T in trace.chain.items()),
    }
    lim = s - trace.ell
    out["layer_bound"] = all(
        len(W) * E_LOWER.denominator ** (i - t) <= lim * (2 * E_LOWER.numerator * s * q) ** (i - t)
        for i, W in trace.layers.items()
    )
    targets = trace.decomposition_targets()
    out["decomposition"] = all(any(g & m == g for g in targets) for m in trace.chain[q].members)
    if k is not None:
        top = generated_family(trace.chain[q], k)
        cover = generated_family(SetFamily(trace.n, tuple(targets)), k)
        out["decomposition_enumerated"] = top.memberset <= cover.memberset
    return out


# ---------------------------------------------------- spread approximation

Oracle = Callable[[SetFamily], "int | None"]


class OracleFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class ApproxDecomposition:
    n: int
    k: int
    S: SetFamily
    R: SetFamily
    pieces: dict[int, SetFamily]    # A -> F_A (members of F containing A)
    r: Fraction
    eta: Fraction
    theta: Fraction
    l1: int
    l2: int
    q: int

    def remainder_bound(self) -> Fraction:
        n, k = self.n, self.k
        tail = self.theta * self.r ** (self.q + 1 - self.l2) * binom(n - self.q - 1, k - self.q - 1)
        return max(Fraction(self.eta), tail / binom(n - self.l2, k - self.l2))


def trivial_oracle(P: SetFamily) -> int:
    return 0


def density_oracle(l1: int, l2: int) -> Oracle:
    """X among submasks of members, l1 <= |X| <= l2, maximizing |P(X)| / C(n-|X|, k-|X|).

    Averaging over all x-sets shows this always meets the oracle contract with
    theta = C(n, k). Ties go to smaller |X|, then lexicographic X.
    """
    def oracle(P: SetFamily) -> int | None:
        k = P.uniform
        if k is None or not P.members:
            return None
        counts: dict[int, int] = {}
        for m in P.members:
            for x in range(l1, min(l2, k) + 1):
                for X in k_subsets(m, x):
                    counts[X] = counts.get(X, 0) + 1
        if not counts:
            return None
        best = None
        for X in sorted(counts, key=set_key):
            c, d = counts[X], binom(P.n - X.bit_count(), k - X.bit_count())
            if best is None or c * best[2] > best[1] * d:
                best = (X, c, d)
        return best[0]
    return oracle


def spread_approximate(F: SetFamily, eta, theta, l1: int, l2: int, q: int, r,
                       dense_oracle: Oracle) -> ApproxDecomposition:
    """Split F into pieces F[S_i] with F(S_i) r-spread plus a remainder R.

    Each round asks the oracle for a dense X, grows it to a maximal S with
    |F(S)| >= r^(|X|-|S|) |F(X)|, and removes F[S] unless |S| > q.
    The partition, the spread certificates and the remainder bound are
    asserted before returning.
    """
    r, theta, eta = Fraction(r), Fraction(theta), Fraction(eta)
    n = F.n
    k = F.uniform
    if k is None:
        if F.members:
            raise ValueError("spread_approximate needs a uniform family")
        k = l1 + 1
    if not 0 <= l1 <= l2 <= q:
        raise ValueError("need 0 <= l1 <= l2 <= q")
    if l1 >= k:
        raise ValueError("need l1 < k")
    if r * (k - l1) > n - l1:
        raise ValueError(f"need r <= (n-l1)/(k-l1) = {Fraction(n - l1, k - l1)}")
    current = list(F.members)
    pieces: dict[int, SetFamily] = {}
    while current and len(current) >= eta:
        P = SetFamily(n, tuple(current))
        X = dense_oracle(P)
        if X is None:
            raise OracleFailure(f"dense oracle returned nothing for a family of size {len(P)}")
        x = X.bit_count()
        PX = restrict(P, X)
        if not l1 <= x <= l2:
            raise OracleFailure(f"oracle set has size {x}, outside [{l1},{l2}]")
        if len(P) * binom(n - x, k - x) > theta * len(PX):
            raise OracleFailure(f"oracle set fails |P| <= theta |P(X)| / C(n-x,k-x) at |P|={len(P)}")
        Y, _ = find_spread_restriction(PX, r)
        S_i = X | Y
        if S_i.bit_count() > q:
            break
        pieces[S_i] = SetFamily(n, tuple(m for m in current if m & S_i == S_i))
        current = [m for m in current if m & S_i != S_i]
    dec = ApproxDecomposition(n, k, SetFamily(n, tuple(pieces)), SetFamily(n, tuple(current)),
                              pieces, r, eta, theta, l1, l2, q)
    checks = decomposition_checks(F, dec)
    if not all(checks.values()):
        raise AssertionError(f"spread approximation postcondition failed: {checks}")
    return dec


def decomposition_checks(F: SetFamily, dec: ApproxDecomposition) -> dict[str, bool]:
    seen: list[int] = list(dec.R.members)
    contained = True
    for A, piece in dec.pieces.items():
        contained &= all(m & A == A for m in piece.members)
        seen.extend(piece.members)
    partition = contained and len(seen) == len(set(seen)) and set(seen) == F.memberset
    spread = all(is_spread(restrict(piece, A), dec.r).verdict for A, piece in dec.pieces.items())
    return {
        "partition": partition,
        "spread": spread,
        "remainder": len(dec.R) <= dec.remainder_bound(),
    }


# ------------------------------------------------------------ dense piece

@dataclass(frozen=True)
class DenseChoice:
    X: int
    i: int
    g_count: int        # |G(X)|
    g_size: int         # |G|
    pigeonhole_ok: bool  # |G(X)|/|G| >= 1/(4 s^2 (t1+1) C(t1,i) C(l-t1,i)^2)


def choose_dense_set(G: SetFamily, t1: int, s: int, ell: int) -> DenseChoice:
    """The pigeonhole step: X = U+V+W from a dense pair of G.

    X maximizes |G(X)| * C(t1,i) C(l-t1,i)^2 (the pigeonhole normalisation),
    then |G(X)|, then comes first lexicographically.
    """
    A, B, common = dense_pair(G, t1, s)
    I = sum(sorted((1 << b for b in range(A.bit_length()) if (A & B) >> b & 1))[:t1])
    D1, D2 = A & ~B, B & ~A
    cands: dict[int, int] = {}
    for C in [A, B] + common:
        U = C & I
        i = t1 - U.bit_count()
        for V in k_subsets(C & D1, i):
            for W in k_subsets(C & D2, i):
                cands[U | V | W] = i

    def weight(i: int) -> int:
        return binom(t1, t1 - i) * binom(ell - t1, i) ** 2

    best = None
    for X in sorted(cands, key=set_key):
        g = sum(1 for m in G.members if m & X == X)
        key = (g * weight(cands[X]), g)
        if best is None or key > best[0]:
            best = (key, X, g)
    _, X, g = best
    i = cands[X]
    ok = g * 4 * s * s * (t1 + 1) * weight(i) >= len(G)
    return DenseChoice(X, i, g, len(G), ok)


@dataclass(frozen=True)
class DensePiece:
    X: int
    beta: Fraction
    choice: DenseChoice
    size_window_ok: bool
    size_bound_ok: bool


def _theory_term(n: int, k: int, t1: int, ell: int) -> float:
    return ((k - t1) * t1 * (ell - t1) ** 2 / (n - t1)) ** (1 / 3)


def dense_piece(F_on_G: SetFamily, G: SetFamily, t1: int, s: int, ell: int, lam) -> DensePiece:
    """A set X on which F[G] is dense, found from a dense pair of G."""
    lam = Fraction(lam)
    n, k = F_on_G.n, F_on_G.uniform
    if k is None:
        raise ValueError("dense_piece needs a uniform family")
    if G.max_size > ell or ell < t1:
        raise ValueError("dense_piece needs members of G of size <= ell and ell >= t1")
    if nu(G, t1, cap=s)[0] > s:
        raise ValueError(f"dense_piece needs nu(G,{t1}) <= {s}")
    if not all(any(g & m == g for g in G.members) for m in F_on_G.members):
        raise ValueError("F_on_G must lie inside A[G]")
    if len(F_on_G) <= lam * binom(n - t1, k - t1):
        raise ValueError("F_on_G is not above the lambda threshold")
    choice = choose_dense_set(G, t1, s, ell)
    X = choice.X
    x = X.bit_count()
    beta = Fraction(sum(1 for m in F_on_G.members if m & X == X), binom(n - x, k - x))
    term = _theory_term(n, k, t1, ell)
    window = t1 <= x <= t1 + 4 * term + math.log2(s * s * t1 / float(lam)) if t1 > 0 else x >= t1
    bound = len(F_on_G) <= 8 * s * s * t1 * math.exp(3 * term) * float(beta) * binom(n - t1, k - t1)
    return DensePiece(X, beta, choice, bool(window), bool(bound))


# ------------------------------------------------------- clique extraction

def extract_cliques(S: SetFamily, t: int, s: int, ell: int, k: int | None = None) -> list[tuple[int, int]] | None:
    """Greedily peel t-intersecting cliques C(Y, t+x), |Y| = t+2x, off S.

    Returns [(Y_i, x_i)] when S is exhausted using at most s cliques and the
    union of the cliques has nu <= s; None when that structure is absent.
    """
    if k is None:
        k = t + ell
    if any(not t <= m.bit_count() <= t + ell for m in S.members):
        raise ValueError(f"extract_cliques needs member sizes in [{t},{t + ell}]")
    if nu(S, t, cap=s)[0] > s:
        raise ValueError(f"extract_cliques needs nu(S,{t}) <= {s}")
    n = S.n
    cur = list(S.members)
    budget = s
    cliques: list[tuple[int, int]] = []
    while cur:
        if budget == 0:
            return None
        layers: dict[int, list[int]] = {}
        for m in cur:
            layers.setdefault(m.bit_count() - t, []).append(m)
        m_best = max(layers, key=lambda i: (len(layers[i]) * binom(n - t - i, k - t - i), i))
        W = sorted(layers[m_best], key=set_key)
        if m_best == 0:
            Y = W[0]
        else:
            best = None
            for a in range(len(W)):
                for b in range(a + 1, len(W)):
                    if (W[a] & W[b]).bit_count() != t:
                        continue
                    c = len(pair_common(W, a, b))
                    if best is None or c > best[0]:
                        best = (c, W[a] | W[b])
            if best is None:
                return None
            Y = best[1]
        x = m_best
        cur = [m for m in cur if (m & Y).bit_count() < t + x]
        budget -= 1
        cliques.append((Y, x))
        if cur and nu(SetFamily(n, tuple(cur)), t, cap=budget)[0] > budget:
            return None
    K = [g for Y, x in cliques for g in k_subsets(Y, t + x)]
    if nu(SetFamily(n, tuple(K)), t, cap=s)[0] > s:
        return None
    return cliques


def clique_generators(n: int, t: int, cliques: list[tuple[int, int]]) -> SetFamily:
    return SetFamily(n, tuple(g for Y, x in cliques for g in k_subsets(Y, t + x)))


# ------------------------------------------------------------------ driver

@dataclass
class DriverConfig:
    C: float = 1.0
    C_prime: float = 1.0
    max_steps: int | None = None
    q: int | None = None
    t_prime: int | None = None
    l1: int | None = None
    l2: int | None = None
    r: Fraction | None = None


@dataclass(frozen=True)
class DriverStep:
    index: int
    t1: int
    q: int
    l2: int
    t_prime: int
    t_prime_schedule: int
    lowered: int
    remainder: int
    remainder_accumulated: int
    pieces: int
    oracle_dense: int
    oracle_fallback: int
    theta_raised: bool


@dataclass(frozen=True)
class DriverResult:
    decomposition: ApproxDecomposition
    t_prime: int
    steps: list[DriverStep] = field(default_factory=list)


class ScheduleError(ValueError):
    pass


def initial_schedule(t: int, s: int, sigma: int) -> tuple[int, int]:
    """(q0, t'0) = (ceil(10t + t log2(st) + sigma), t - ceil(sqrt t))."""
    q0 = math.ceil(10 * t + t * math.log2(s * t) + sigma) if s * t > 0 else 10 * t + sigma
    return q0, t - math.isqrt(t - 1) - 1 if t > 0 else 0


def q_schedule(n: int, k: int, t: int, s: int, sigma: int, t1: int, q_prev: int) -> tuple[float, float]:
    """(q, l2) from the step bounds; both are real numbers before rounding."""
    L = math.log2((n - t) / (k - t))
    core = (t / s) ** (1 / 6) * (max(q_prev - t1, 0) / (100 * L)) ** (2 / 3)
    q = t1 + 2 * core + 2 * sigma + math.log2(8 * s ** 4 * t * t) + 2 * (t - t1) * L
    l2 = t + core + sigma + math.log2(s * s * t) + (t - t1) * L
    return q, l2


def t_schedule(n: int, k: int, t: int, s: int, sigma: int, t1: int, q: int, C_prime: float) -> int:
    L = math.log2((n - t) / (k - t))
    first = t - math.ceil(2 * math.log2(s)) if s > 1 else t
    denom = (C_prime / 2) * (sigma + math.sqrt(t * s) * L)
    second = t - math.floor((q - t1 + 1) / denom) if denom > 0 else t
    return min(first, second)


def iterative_driver(F: SetFamily, t: int, s: int, sigma: int,
                     config: DriverConfig | None = None) -> DriverResult:
    """Alternate spread approximation with a direct nu(S, t') <= s check.

    The q and t' schedules follow the step bounds with the configured
    constants; q is capped at k and l2 kept inside [t1, q]. When
    nu(S, t') > s the driver lowers t' one step at a time and logs it.
    """
    cfg = config or DriverConfig()
    n, k = F.n, F.uniform
    if k is None or not F.members:
        raise ValueError("iterative_driver needs a nonempty uniform family")
    if not 1 <= t < k:
        raise ValueError("iterative_driver needs 1 <= t < k")
    if nu(F, t, cap=s)[0] > s:
        raise ValueError(f"iterative_driver needs nu(F,{t}) <= {s}")
    steps_cap = cfg.max_steps or max(1, math.ceil(15 * math.log2(s * t + sigma)) if s * t + sigma > 1 else 1)
    q_prev, t_prev = initial_schedule(t, s, sigma)
    if cfg.t_prime is not None:
        t_prev = cfg.t_prime
    t_prev = max(t_prev, 0)
    G = F
    eta = Fraction(binom(n - t, k - t), 2 ** sigma)
    steps: list[DriverStep] = []
    acc = 0
    dec = None
    for index in range(1, steps_cap + 1):
        t1 = t_prev
        q_real, l2_real = q_schedule(n, k, t, s, sigma, t1, q_prev)
        q_i = cfg.q if cfg.q is not None else min(math.ceil(q_real), k)
        if q_i < t:
            raise ScheduleError(f"step {index}: q = {q_i} < t = {t}")
        l1 = cfg.l1 if cfg.l1 is not None else min(t1, k - 1)
        l2 = cfg.l2 if cfg.l2 is not None else math.ceil(l2_real)
        l2 = max(l1, min(l2, q_i, k))
        r = Fraction(cfg.r) if cfg.r is not None else Fraction(n - l1, 2 * (k - l1))
        theta_formula = _theta_formula(n, k, t, s, t1, q_prev)
        theta = max(Fraction(binom(n, k)), theta_formula)
        oracle, stats = _driver_oracle(G, t1, s, l1, l2, eta, theta)
        dec = spread_approximate(F, eta, theta, l1, l2, q_i, r, oracle)
        sched = cfg.t_prime if cfg.t_prime is not None else max(
            t_prev, min(t, t_schedule(n, k, t, s, sigma, t1, q_i, cfg.C_prime)))
        tp = sched
        while tp >= 1 and nu(dec.S, tp, cap=s)[0] > s:
            tp -= 1
        tp = max(tp, 0)
        if tp != sched:
            log.info("step %d: nu(S,%d) > %d, t' lowered to %d", index, sched, s, tp)
        acc += len(dec.R)
        steps.append(DriverStep(index, t1, q_i, l2, tp, sched, sched - tp, len(dec.R), acc,
                                len(dec.pieces), stats["dense"], stats["fallback"],
                                theta > theta_formula))
        stable = q_i == q_prev and tp == t_prev
        q_prev, t_prev, G = q_i, tp, dec.S
        if stable:
            break
    return DriverResult(dec, t_prev, steps)


def _theta_formula(n: int, k: int, t: int, s: int, t1: int, q_prev: int) -> Fraction:
    L = math.log2((n - t) / (k - t))
    expo = (t / s) ** (1 / 6) * (max(q_prev - t1, 0) / (100 * L)) ** (2 / 3)
    val = 8 * s * s * t * 2 ** expo
    return Fraction(val).limit_denominator(10 ** 6) * binom(n - t1, k - t1)


def _driver_oracle(G: SetFamily, t1: int, s: int, l1: int, l2: int, eta: Fraction, theta: Fraction):
    """Dense-piece choice from G when it meets the contract, else best density."""
    stats = {"dense": 0, "fallback": 0}
    fallback = density_oracle(l1, l2)
    X_G = None
    if G.members and t1 >= 1 and G.max_size >= t1:
        try:
            X_G = choose_dense_set(G, t1, s, max(G.max_size, t1)).X
        except ValueError:
            X_G = None

    def oracle(P: SetFamily) -> int | None:
        if X_G is not None and l1 <= X_G.bit_count() <= l2:
            PG = [m for m in P.members if any(g & m == g for g in G.members)]
            x = X_G.bit_count()
            c = sum(1 for m in P.members if m & X_G == X_G)
            if len(PG) > eta and c and len(P) * binom(P.n - x, P.uniform - x) <= theta * c:
                stats["dense"] += 1
                return X_G
        stats["fallback"] += 1
        return fallback(P)

    return oracle, stats
