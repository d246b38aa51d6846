"""Set families over [n] stored as sorted tuples of bitmasks.

Notation used throughout:
    restrict(F, X)  = F(X)   = {F \\ X : X <= F}
    star(F, X)      = F[X]   = {F : X <= F}
    slice(F, X, Y)  = F(X,Y) = {F \\ X : F & Y = X}
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator

from .bits import all_k_sets, elements, fmt, k_subsets, mask_of, set_key
from .config import check_cap


@dataclass(frozen=True)
class SetFamily:
    n: int
    members: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("ground set size must be nonnegative")
        full = (1 << self.n) - 1
        ms = set(self.members)
        for m in ms:
            if m < 0 or m & ~full:
                raise ValueError(f"set {fmt(m)} is not a subset of [{self.n}]")
        object.__setattr__(self, "members", tuple(sorted(ms, key=set_key)))

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        return cls(n, tuple(mask_of(s) for s in sets))

    @classmethod
    def complete(cls, n: int, k: int) -> "SetFamily":
        check_cap(comb(n, k), f"C({n},{k})")
        return cls(n, tuple(all_k_sets(n, k)))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, mask: object) -> bool:
        return mask in self.memberset

    @property
    def memberset(self) -> frozenset[int]:
        cached = self.__dict__.get("_memberset")
        if cached is None:
            cached = frozenset(self.members)
            object.__setattr__(self, "_memberset", cached)
        return cached

    @property
    def uniform(self) -> int | None:
        sizes = {m.bit_count() for m in self.members}
        return sizes.pop() if len(sizes) == 1 else None

    @property
    def max_size(self) -> int:
        return max((m.bit_count() for m in self.members), default=0)

    @property
    def support(self) -> int:
        u = 0
        for m in self.members:
            u |= m
        return u

    def sets(self) -> list[list[int]]:
        return [elements(m) for m in self.members]

    def with_members(self, members: Iterable[int]) -> "SetFamily":
        return SetFamily(self.n, tuple(members))

    def __repr__(self) -> str:
        body = ", ".join(fmt(m) for m in self.members[:8])
        more = ", ..." if len(self.members) > 8 else ""
        return f"SetFamily(n={self.n}, [{body}{more}], size={len(self)})"


def restrict(F: SetFamily, X: int) -> SetFamily:
    return F.with_members(m & ~X for m in F.members if m & X == X)


def star(F: SetFamily, X: int) -> SetFamily:
    return F.with_members(m for m in F.members if m & X == X)


def slice(F: SetFamily, X: int, Y: int, keep_X: bool = False) -> SetFamily:
    if X & ~Y:
        raise ValueError("slice requires X to be a subset of Y")
    keep = [m for m in F.members if m & Y == X]
    if not keep_X:
        keep = [m & ~X for m in keep]
    return F.with_members(keep)


def generated_family(S: SetFamily, k: int) -> SetFamily:
    """All k-subsets of [n] containing at least one member of S (upper k-shadow)."""
    if any(m.bit_count() > k for m in S.members):
        raise ValueError("generated_family needs every member of size <= k")
    check_cap(comb(S.n, k), f"C({S.n},{k})")
    gens = minimal_members(S.members)
    out = []
    for h in all_k_sets(S.n, k):
        for g in gens:
            if g & h == g:
                out.append(h)
                break
    return SetFamily(S.n, tuple(out))


def minimal_members(members: Iterable[int]) -> list[int]:
    """Inclusion-minimal members, in canonical order."""
    ms = sorted(set(members), key=set_key)
    keep: list[int] = []
    for m in ms:
        if not any(g & m == g for g in keep):
            keep.append(m)
    return keep


def is_antichain(F: SetFamily) -> bool:
    ms = F.members
    for i, a in enumerate(ms):
        for b in ms[i + 1:]:
            if a & b == a or a & b == b:
                return False
    return True


def shift(F: SetFamily, i: int, j: int) -> SetFamily:
    """S_{i<-j}: swap j for i in every member where the result is new."""
    if i == j or not (1 <= i <= F.n and 1 <= j <= F.n):
        raise ValueError("shift needs distinct elements of [n]")
    bi, bj = 1 << (i - 1), 1 << (j - 1)
    present = F.memberset
    out = []
    for m in F.members:
        if m & bj and not m & bi:
            moved = (m & ~bj) | bi
            out.append(m if moved in present else moved)
        else:
            out.append(m)
    return F.with_members(out)


def simplify(S: SetFamily, t: int, s: int) -> SetFamily:
    """A maximal simplification of S keeping nu(., t) <= s.

    Members are visited by decreasing size; for each we try its subsets one
    element smaller in lexicographic order and take the first one that keeps
    nu <= s. Smaller subsets never need trying: if X works then every Y with
    X <= Y works too, so some one-smaller subset works whenever any does.
    Passes repeat until nothing changes.
    """
    from .matching import extends_matching, nu

    if nu(S, t, cap=s)[0] > s:
        raise ValueError(f"simplify needs nu(S,{t}) <= {s}")
    members = minimal_members(S.members)
    changed = True
    while changed:
        changed = False
        order = sorted(members, key=lambda m: (-m.bit_count(), set_key(m)))
        current = set(members)
        for T in order:
            if T not in current or T.bit_count() <= t:
                continue
            others = [m for m in current if m != T]
            for X in k_subsets(T, T.bit_count() - 1):
                if not extends_matching(others, X, t, s):
                    current = {m for m in others if m & X != X}
                    current.add(X)
                    changed = True
                    break
        members = sorted(current, key=set_key)
    return SetFamily(S.n, tuple(members))


def is_maximal(T: SetFamily, t: int, s: int) -> bool:
    """True iff replacing any member by a proper subset pushes nu above s."""
    from .matching import extends_matching

    for T0 in T.members:
        if T0.bit_count() <= t:
            continue
        others = [m for m in T.members if m != T0]
        for X in k_subsets(T0, T0.bit_count() - 1):
            if not extends_matching(others, X, t, s):
                return False
    return True
