"""Bitset subset helpers and colexicographic ranking of fixed-size subsets."""

from __future__ import annotations

from itertools import combinations
from math import comb


def mask_from(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def vertices_from(mask: int) -> tuple[int, ...]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


def colex_rank(vertices_sorted) -> int:
    """Rank of a sorted subset among all same-size subsets, colex order."""
    return sum(comb(v, i + 1) for i, v in enumerate(vertices_sorted))


def colex_rank_mask(mask: int) -> int:
    return colex_rank(vertices_from(mask))


def colex_unrank(rank: int, r: int) -> tuple[int, ...]:
    """Inverse of colex_rank for subsets of size r."""
    out = []
    for i in range(r, 0, -1):
        # largest v with comb(v, i) <= rank
        v = i - 1
        while comb(v + 1, i) <= rank:
            v += 1
        out.append(v)
        rank -= comb(v, i)
    return tuple(reversed(out))


def all_subset_masks_colex(n: int, r: int) -> list[int]:
    """All r-subsets of range(n) as bitmasks, indexed by colex rank."""
    out = [0] * comb(n, r)
    for combo in combinations(range(n), r):
        out[colex_rank(combo)] = mask_from(combo)
    return out
