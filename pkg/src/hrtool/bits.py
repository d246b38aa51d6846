"""Bitmask helpers. Element e of [n] lives at bit e-1."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        if e < 1:
            raise ValueError(f"elements are 1-based, got {e}")
        m |= 1 << (e - 1)
    return m


def elements(mask: int) -> list[int]:
    return [b + 1 for b in iter_bits(mask)]


def popcount(mask: int) -> int:
    return mask.bit_count()


def low_bit(mask: int) -> int:
    """Index (0-based) of the lowest set bit."""
    return (mask & -mask).bit_length() - 1


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def submasks(mask: int) -> Iterator[int]:
    """All submasks of mask, including 0 and mask itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def k_subsets(mask: int, k: int) -> Iterator[int]:
    """k-element submasks of mask in lexicographic order of element lists."""
    bits = [1 << b for b in iter_bits(mask)]
    for combo in combinations(bits, k):
        yield sum(combo)


def all_k_sets(n: int, k: int) -> Iterator[int]:
    return k_subsets((1 << n) - 1, k)


def set_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Canonical order: by size, then lexicographically by sorted elements."""
    return (mask.bit_count(), tuple(elements(mask)))


def fmt(mask: int) -> str:
    return "{" + ",".join(map(str, elements(mask))) + "}"
