"""Brute-force oracles and exhaustive extremal searches.

max_family_exhaustive is a branch and bound over subsets of C([n], k) with
nu(F, t) <= s kept as an incremental constraint. The candidate set only holds
k-sets that can still be added without creating s+1 pairwise conflicting
members, and the bound splits the candidates into conflict cliques, each of
which can contribute at most s sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .bits import all_k_sets, iter_bits, k_subsets, mask_of
from .config import CapExceeded, check_cap
from .constructions import CliqueProfile, binom, h_opt
from .family import SetFamily, generated_family, minimal_members, simplify
from .johnson import delsarte_bound
from .matching import conflict_adjacency, nu
from .spread import containment_counts

DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True)
class ExtremalResult:
    n: int
    k: int
    t: int
    s: int
    max_size: int
    witness: SetFamily
    exhaustive: bool
    nodes: int = 0
    upper_bound: int | None = None      # root bound used to stop early, if any
    optima: tuple[SetFamily, ...] | None = None

    def revalidate(self) -> bool:
        return (len(self.witness) == self.max_size
                and self.witness.uniform in (self.k, None)
                and nu(self.witness, self.t, cap=self.s)[0] <= self.s)


class _Budget(Exception):
    pass


def _has_clique(adj: list[int], mask: int, size: int) -> bool:
    """Is there a clique of the given size inside mask?"""
    if size <= 0:
        return True
    if mask.bit_count() < size:
        return False
    if size == 1:
        return True
    if size == 2:
        return any(adj[v] & mask for v in iter_bits(mask))
    while mask:
        v = mask.bit_length() - 1
        mask &= ~(1 << v)
        if _has_clique(adj, mask & adj[v], size - 1):
            return True
    return False


def seed_families(n: int, k: int, t: int, s: int) -> list[SetFamily]:
    """Known good families: the best clique profile and the largest C([m], k)."""
    seeds = []
    try:
        opt = h_opt(n, k, t, s)
        K = SetFamily(n, tuple(CliqueProfile(n, k, t, opt.argmax).generators()))
        seeds.append(generated_family(K, k))
    except ValueError:
        pass
    for m in range(n, k - 1, -1):
        F = SetFamily.complete(m, k)
        if nu(F, t, cap=s)[0] <= s:
            seeds.append(SetFamily(n, F.members))
            break
    return [F for F in seeds if nu(F, t, cap=s)[0] <= s]


def max_family_exhaustive(n: int, k: int, t: int, s: int, budget: int | None = None,
                          all_optima: bool = False, use_lp: bool = True) -> ExtremalResult:
    """Largest F in C([n], k) with nu(F, t) <= s.

    The first branch is fixed to contain {1..k}. For s = 1 the root is
    bounded by the Johnson-scheme LP, which closes the EKR range at once.
    With all_optima the symmetry fix is dropped and every maximum family is
    collected (small instances only).
    """
    if not (1 <= t <= k <= n and s >= 1):
        raise ValueError(f"bad parameters n={n} k={k} t={t} s={s}")
    N = binom(n, k)
    check_cap(N, "C(n,k)")
    budget = DEFAULT_BUDGET if budget is None else budget
    verts = list(all_k_sets(n, k))
    conf = conflict_adjacency(verts, t)
    index = {v: i for i, v in enumerate(verts)}

    best_mask, best_size = 0, 0
    for F in seed_families(n, k, t, s):
        if len(F) > best_size:
            best_size, best_mask = len(F), sum(1 << index[m] for m in F.members)
    ub = None
    if s == 1 and use_lp:
        ub = delsarte_bound(n, k, t)
    state = {"best": best_size, "mask": best_mask, "nodes": 0, "optima": []}

    def bound_order(P: int):
        """Vertices of P grouped into conflict cliques, with prefix bounds."""
        order, bounds = [], []
        total = 0
        while P:
            Q, cand = 0, P
            while cand:
                # grow the clique through the vertex with most conflicts left
                u = max(iter_bits(cand), key=lambda x: (conf[x] & cand).bit_count())
                Q |= 1 << u
                cand &= conf[u] & ~(1 << u)
            P &= ~Q
            pos = 0
            for u in iter_bits(Q):
                pos += 1
                order.append(u)
                bounds.append(total + min(pos, s))
            total += min(Q.bit_count(), s)
        return order, bounds

    def add(I: int, P: int, v: int) -> int:
        """Candidates left after adding v to I."""
        P &= ~(1 << v)
        for w in iter_bits(P & conf[v]):
            if _has_clique(conf, conf[w] & conf[v] & I, s - 1):
                P &= ~(1 << w)
        return P

    def expand(I: int, size: int, P: int):
        state["nodes"] += 1
        if state["nodes"] > budget:
            raise _Budget
        if size > state["best"]:
            state["best"], state["mask"] = size, I
            state["optima"] = []
        if all_optima and size == state["best"]:
            state["optima"].append(I)
        if ub is not None and state["best"] >= ub and not all_optima:
            raise _Budget  # proven optimal, unwind
        order, bounds = bound_order(P)
        for idx in range(len(order) - 1, -1, -1):
            limit = size + bounds[idx]
            if limit < state["best"] or (limit == state["best"] and not all_optima):
                return
            v = order[idx]
            expand(I | 1 << v, size + 1, add(I, P, v))
            P &= ~(1 << v)

    exhaustive = True
    proven_by_bound = ub is not None and state["best"] >= ub and not all_optima
    if not proven_by_bound:
        try:
            if all_optima:
                state["best"] = best_size
                expand(0, 0, (1 << N) - 1)
            else:
                expand(1, 1, add(0, (1 << N) - 1, 0))
        except _Budget:
            exhaustive = ub is not None and state["best"] >= ub
    witness = SetFamily(n, tuple(verts[i] for i in iter_bits(state["mask"])))
    optima = None
    if all_optima:
        seen = {}
        for I in state["optima"]:
            if I.bit_count() == state["best"]:
                seen[I] = SetFamily(n, tuple(verts[i] for i in iter_bits(I)))
        optima = tuple(seen[I] for I in sorted(seen))
    res = ExtremalResult(n, k, t, s, state["best"], witness, exhaustive, state["nodes"], ub, optima)
    if not res.revalidate():
        raise AssertionError("extremal witness failed revalidation")
    return res


# ------------------------------------------------------------ oracles

def brute_size_AK(p: CliqueProfile) -> int:
    """Count k-sets meeting some Y_i in at least t + x_i points, one by one."""
    check_cap(binom(p.n, p.k), "C(n,k)")
    pairs = list(zip(p.canonical_supports(), p.xs))
    return sum(1 for A in all_k_sets(p.n, p.k)
               if any((A & Y).bit_count() >= p.t + x for Y, x in pairs))


def brute_size_AM(n: int, k: int, t: int, s: int) -> int:
    check_cap(binom(n, k), "C(n,k)")
    M = [mask_of(range(j * t + 1, (j + 1) * t + 1)) for j in range(s)]
    return sum(1 for A in all_k_sets(n, k) if any(A & Q == Q for Q in M))


# ------------------------------------------------------- (k-1)-matchings

@dataclass(frozen=True)
class Kk1Report:
    n: int
    k: int
    s: int
    claimed: int                 # s(n-k+1)
    in_hypothesis: bool
    construction_size: int
    construction_ok: bool        # size s(n-k+1) and nu <= s
    search: ExtremalResult | None
    agrees: bool | None          # search value == claimed (None if not searched)


def kk1_construction(n: int, k: int, s: int) -> SetFamily:
    """k-sets containing one of Q_1..Q_s, |Q_i| = k-1, |Q_i & Q_j| = k-3."""
    if k < 3:
        raise ValueError("the construction needs k >= 3")
    if n < k - 3 + 2 * s:
        raise ValueError("the construction needs n >= k-3+2s")
    base = mask_of(range(1, k - 2))
    Qs = [base | mask_of([k - 2 + 2 * i, k - 1 + 2 * i]) for i in range(s)]
    return generated_family(SetFamily(n, tuple(Qs)), k)


def verify_kk1(n: int, k: int, s: int, budget: int | None = None, search: bool = True) -> Kk1Report:
    in_hyp = k >= 2 and n >= 2 * k + 2 * s - 4 + max(2 * s, k)
    claimed = s * (n - k + 1)
    A = kk1_construction(n, k, s)
    c_ok = len(A) == claimed and nu(A, k - 1, cap=s)[0] <= s
    res = None
    agrees = None
    if search and in_hyp:
        res = max_family_exhaustive(n, k, k - 1, s, budget)
        agrees = res.max_size == claimed if res.exhaustive else res.max_size <= claimed
    return Kk1Report(n, k, s, claimed, in_hyp, len(A), c_ok, res, agrees)


# ------------------------------------------------------- classification

@dataclass(frozen=True)
class Classification:
    construction2: bool
    cliques: list[tuple[int, int]] | None   # [(Y, x)] when found
    full_star: bool
    method: str | None                      # which route found the cliques
    exhaustive: bool                        # was every clique union tried?


def is_full_star(F: SetFamily, t: int) -> bool:
    k = F.uniform
    if k is None or not F.members:
        return False
    core = F.members[0]
    for m in F.members[1:]:
        core &= m
    return core.bit_count() >= t and len(F) == binom(F.n - t, k - t)


def minimal_generators(F: SetFamily, t: int) -> SetFamily:
    """Inclusion-minimal X, |X| >= t, whose whole upper k-shadow lies in F."""
    k = F.uniform
    cnt = containment_counts(F.members)
    full = [X for X, c in cnt.items()
            if X.bit_count() >= t and c == binom(F.n - X.bit_count(), k - X.bit_count())]
    return SetFamily(F.n, tuple(minimal_members(full)))


def _clique_block(n: int, k: int, t: int, Y: int, x: int) -> int:
    y = Y.bit_count()
    return sum(binom(y, a) * binom(n - y, k - a) for a in range(t + x, y + 1))


def clique_unions(F: SetFamily, t: int, s: int, cap: int = 200_000) -> list[tuple[int, int]] | None:
    """Search every union of at most s cliques C(Y, t+x) with A[K] = F.

    Only cliques whose own k-shadow lies inside F can take part. Raises
    CapExceeded when there are too many combinations to try.
    """
    n, k = F.n, F.uniform
    fit = []
    for x in range(k - t + 1):
        if t + 2 * x > n:
            break
        check_cap(binom(n, t + 2 * x), "clique supports")
        for Y in k_subsets((1 << n) - 1, t + 2 * x):
            inside = [m for m in F.members if (m & Y).bit_count() >= t + x]
            if len(inside) == _clique_block(n, k, t, Y, x):
                fit.append((Y, x, frozenset(inside)))
    total = sum(binom(len(fit), j) for j in range(1, s + 1))
    check_cap(total, "clique unions")
    if total > cap:
        raise CapExceeded(f"{total} clique unions exceed {cap}")
    target = F.memberset
    for j in range(1, s + 1):
        for combo in combinations(fit, j):
            if frozenset().union(*(c[2] for c in combo)) == target:
                return [(Y, x) for Y, x, _ in combo]
    return None


def classify_family(F: SetFamily, t: int, s: int, exhaustive_cap: int = 200_000) -> Classification:
    """Is F = A[K] for a union K of at most s t-intersecting cliques?

    Clique extraction is tried on the minimal generators of F and on a
    simplification of F; any clique list found is confirmed by regenerating
    F. When extraction finds nothing and the instance is small, every union
    of at most s cliques is tried, which makes a negative answer definitive.
    """
    from .approx import clique_generators, extract_cliques

    k = F.uniform
    if k is None or not F.members:
        raise ValueError("classification needs a nonempty uniform family")
    star = is_full_star(F, t)
    routes = [("generators", lambda: minimal_generators(F, t)), ("simplify", lambda: simplify(F, t, s))]
    for name, make in routes:
        T = make()
        if not T.members or any(m.bit_count() < t for m in T.members) or nu(T, t, cap=s)[0] > s:
            continue
        cl = extract_cliques(T, t, s, T.max_size - t, k)
        if cl is not None and generated_family(clique_generators(F.n, t, cl), k).members == F.members:
            return Classification(True, cl, star, name, False)
    try:
        cl = clique_unions(F, t, s, exhaustive_cap)
    except CapExceeded:
        return Classification(False, None, star, None, False)
    return Classification(cl is not None, cl, star, "exhaustive" if cl else None, True)


def verify_extremal_structure(result: ExtremalResult) -> dict:
    if not result.exhaustive:
        raise ValueError("structure is only classified for exhaustive results")
    main = classify_family(result.witness, result.t, result.s)
    out = {"construction2": main.construction2, "full_star": main.full_star,
           "cliques": main.cliques, "method": main.method, "definitive": main.construction2 or main.exhaustive}
    if result.optima is not None:
        cls = [classify_family(F, result.t, result.s) for F in result.optima]
        out["optima"] = len(cls)
        out["optima_construction2"] = sum(c.construction2 for c in cls)
    return out


# --------------------------------------------------------------- suite

def smallcases(budget: int | None = None) -> list[dict]:
    """The exact small cases: (6,3,2,2) -> 10 and (6,3,2,3) -> 14, neither of A[K] form."""
    rows = []
    for s, expected in ((2, 10), (3, 14)):
        res = max_family_exhaustive(6, 3, 2, s, budget)
        cls = verify_extremal_structure(res) if res.exhaustive else None
        rows.append({
            "n": 6, "k": 3, "t": 2, "s": s, "expected": expected,
            "max_size": res.max_size, "exhaustive": res.exhaustive,
            "h": h_opt(6, 3, 2, s).value,
            "construction2": cls["construction2"] if cls else None,
            "ok": res.exhaustive and res.max_size == expected and not cls["construction2"],
        })
    return rows
