"""t-matching number, conflict graphs, dense pairs, covers and sunflowers.

Two members conflict when they share fewer than t elements; nu(F, t) is the
clique number of that conflict graph. Sets are allowed to repeat in a
t-matching, so a member with fewer than t elements conflicts with itself and
makes nu infinite (this is why every member of a family with finite nu has at
least t elements).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .bits import iter_bits, k_subsets, set_key
from .family import SetFamily, minimal_members

INF = math.inf


class _Found(Exception):
    pass


def conflict_adjacency(members: Sequence[int], t: int) -> list[int]:
    """adj[i] is the bitmask of j with |members[i] & members[j]| < t."""
    n = len(members)
    adj = [0] * n
    for i in range(n):
        a = members[i]
        row = 0
        for j in range(i + 1, n):
            if (a & members[j]).bit_count() < t:
                row |= 1 << j
                adj[j] |= 1 << i
        adj[i] |= row
    return adj


@dataclass(frozen=True)
class ConflictGraph:
    members: tuple[int, ...]
    t: int
    adj: tuple[int, ...]

    @classmethod
    def of(cls, F: SetFamily, t: int) -> "ConflictGraph":
        return cls(F.members, t, tuple(conflict_adjacency(F.members, t)))

    def edge_count(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    def intersecting_pairs(self) -> int:
        """Pairs sharing at least t elements (edges of the complement)."""
        m = len(self.members)
        return m * (m - 1) // 2 - self.edge_count()


def max_clique(adj: Sequence[int], target: int | None = None) -> list[int]:
    """Maximum clique by branch and bound with greedy colouring bounds.

    Stops as soon as a clique of size target is found when target is given.
    """
    n = len(adj)
    if n == 0:
        return []
    order = sorted(range(n), key=lambda v: (-adj[v].bit_count(), v))
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    radj = [0] * n
    for i, v in enumerate(order):
        m = 0
        for u in iter_bits(adj[v]):
            m |= 1 << pos[u]
        radj[i] = m

    best: list[int] = []

    def colour_sort(P: int):
        verts, cols = [], []
        c = 0
        while P:
            c += 1
            Q = P
            while Q:
                b = Q & -Q
                v = b.bit_length() - 1
                Q &= ~(radj[v] | b)
                P ^= b
                verts.append(v)
                cols.append(c)
        return verts, cols

    def expand(R: list[int], P: int):
        verts, cols = colour_sort(P)
        for idx in range(len(verts) - 1, -1, -1):
            if len(R) + cols[idx] <= len(best):
                return
            v = verts[idx]
            R2 = R + [v]
            P2 = P & radj[v]
            if len(R2) > len(best):
                best[:] = R2
                if target is not None and len(best) >= target:
                    raise _Found
            if P2:
                expand(R2, P2)
            P &= ~(1 << v)

    try:
        expand([], (1 << n) - 1)
    except _Found:
        pass
    return sorted(order[i] for i in best)


def nu(F: SetFamily, t: int, cap: int | None = None) -> tuple[int | float, list[int]]:
    """(nu(F,t), witness indices into F.members).

    With cap given the search may stop early and report min(nu, cap+1).
    Returns INF (or cap+1) when some member has fewer than t elements.
    """
    if t < 1:
        raise ValueError("nu needs t >= 1")
    members = F.members
    if not members:
        return 0, []
    for i, m in enumerate(members):
        if m.bit_count() < t:
            return (INF if cap is None else cap + 1), [i]
    target = None if cap is None else cap + 1
    clique = max_clique(conflict_adjacency(members, t), target)
    if target is not None and len(clique) > target:
        clique = clique[:target]
    return len(clique), clique


def is_matching(sets: Sequence[int], t: int) -> bool:
    return all((a & b).bit_count() < t for i, a in enumerate(sets) for b in sets[i + 1:])


def extends_matching(members: Sequence[int], X: int, t: int, s: int) -> bool:
    """True iff members plus X has a t-matching of size s+1 through X.

    When nu(members, t) <= s this is exactly nu(members + [X], t) > s.
    """
    if X.bit_count() < t or s <= 0:
        return True
    nb = [m for m in members if (m & X).bit_count() < t]
    if len(nb) < s:
        return False
    if any(m.bit_count() < t for m in nb):
        return True
    return len(max_clique(conflict_adjacency(nb, t), target=s)) >= s


def turan_lower_bound(m: int, s: int) -> Fraction:
    """s * C(m/s, 2) with C(x, 2) = x(x-1)/2 for x > 1 and 0 otherwise."""
    if m < 0 or s < 1:
        raise ValueError("turan_lower_bound needs m >= 0, s >= 1")
    x = Fraction(m, s)
    if x <= 1:
        return Fraction(0)
    return s * x * (x - 1) / 2


class DensePair(NamedTuple):
    A: int
    B: int
    common: list[int]


def pair_common(members: Sequence[int], i: int, j: int) -> list[int]:
    """Members other than i, j meeting both in at least |A & B| elements."""
    a, b = members[i], members[j]
    c = (a & b).bit_count()
    return [C for idx, C in enumerate(members)
            if idx != i and idx != j and (C & a).bit_count() >= c and (C & b).bit_count() >= c]


def dense_pair(F: SetFamily, t: int, s: int) -> DensePair:
    """The pair with |A & B| >= t having the most common members.

    Ties go to the lexicographically smallest pair of member indices.
    """
    members = F.members
    if not members:
        raise ValueError("dense_pair needs a nonempty family")
    if nu(F, t, cap=s)[0] > s:
        raise ValueError(f"dense_pair needs nu(F,{t}) <= {s}")
    best = None
    best_len = -1
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            if (members[i] & members[j]).bit_count() < t:
                continue
            common = pair_common(members, i, j)
            if len(common) > best_len:
                best, best_len = (i, j, common), len(common)
    if best is None:
        raise ValueError(f"no pair of members shares {t} elements")
    i, j, common = best
    return DensePair(members[i], members[j], common)


def covering_number(F: SetFamily) -> tuple[int, int]:
    """Minimum hitting set size and one minimum hitting set (as a mask)."""
    if any(m == 0 for m in F.members):
        raise ValueError("covering number is undefined when the empty set is a member")
    sets = minimal_members(F.members)
    if not sets:
        return 0, 0
    degree: dict[int, int] = {}
    for m in sets:
        for b in iter_bits(m):
            degree[b] = degree.get(b, 0) + 1

    # greedy start
    chosen, unhit = 0, list(sets)
    while unhit:
        counts: dict[int, int] = {}
        for m in unhit:
            for b in iter_bits(m):
                counts[b] = counts.get(b, 0) + 1
        b = min(counts, key=lambda e: (-counts[e], e))
        chosen |= 1 << b
        unhit = [m for m in unhit if not m >> b & 1]
    best = [chosen.bit_count(), chosen]

    def packing_bound(unhit: list[int]) -> int:
        used, lb = 0, 0
        for m in sorted(unhit, key=lambda x: (x.bit_count(), x)):
            if not m & used:
                used |= m
                lb += 1
        return lb

    def search(chosen: int, size: int, unhit: list[int], banned: int):
        if not unhit:
            if size < best[0]:
                best[0], best[1] = size, chosen
            return
        avail = [m & ~banned for m in unhit]
        if not all(avail):
            return
        if size + packing_bound(avail) >= best[0]:
            return
        pivot = min(avail, key=lambda x: (x.bit_count(), x))
        for b in sorted(iter_bits(pivot), key=lambda e: (-degree[e], e)):
            search(chosen | 1 << b, size + 1, [m for m in unhit if not m >> b & 1], banned)
            # later branches leave b out
            banned |= 1 << b

    search(0, 0, sets, 0)
    return best[0], best[1]


class Sunflower(NamedTuple):
    core: int
    petals: list[int]


def find_sunflower(F: SetFamily, m: int) -> Sunflower | None:
    """m members with common intersection of size exactly k-1.

    petals are the member sets themselves (each is core plus one element).
    """
    if m < 1:
        raise ValueError("sunflower size must be positive")
    if not F.members:
        return None
    k = F.uniform
    if k is None:
        raise ValueError("find_sunflower needs a uniform family")
    if k == 0 or m == 1:
        return None
    groups: dict[int, list[int]] = {}
    for A in F.members:
        for core in k_subsets(A, k - 1):
            groups.setdefault(core, []).append(A)
    for core in sorted(groups, key=set_key):
        if len(groups[core]) >= m:
            return Sunflower(core, groups[core][:m])
    return None


def vi_class(mask: int, r: int) -> int:
    return sum(b + 1 for b in iter_bits(mask)) % r


def vi_partition(r: int, k: int) -> list[SetFamily]:
    """Split C([r], k) by element sum mod r; class i is entry i."""
    if not r >= k >= 1:
        raise ValueError("vi_partition needs r >= k >= 1")
    classes: list[list[int]] = [[] for _ in range(r)]
    for A in SetFamily.complete(r, k).members:
        classes[vi_class(A, r)].append(A)
    return [SetFamily(r, tuple(c)) for c in classes]
