"""Core hypergraph types, exact F2 oracles, XOR evaluation and seeded generators.

All combinatorial identities here are exact (integers / fractions); vertex ids
are 0-based everywhere inside the library (files are 1-based, converted at the
I/O boundary).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Optional, Sequence

import numpy as np

from .subsets import mask_from

ORACLE_EDGE_LIMIT = 44        # meet-in-the-middle on 2^(m/2) masks
BRUTE_FORCE_VAR_LIMIT = 24    # Walsh-Hadamard scan over 2^n assignments


class KcertError(Exception):
    """Base class for library errors."""


class CapacityError(KcertError):
    """A hard size limit was exceeded; never degrade to a silently wrong answer."""


@dataclass(frozen=True)
class Hypergraph:
    """k-uniform hypergraph on vertices 0..n-1 with an ordered hyperedge list.

    Hyperedges are stored sorted; duplicates are legal (a duplicated pair is
    itself an even cover of size 2).
    """

    n: int
    k: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("vertex count must be positive")
        if self.k < 2:
            raise ValueError("uniformity k must be >= 2")
        norm = []
        for e in self.edges:
            t = tuple(sorted(e))
            if len(t) != self.k or len(set(t)) != self.k:
                raise ValueError(f"hyperedge {e!r} must have exactly {self.k} distinct vertices")
            if t[0] < 0 or t[-1] >= self.n:
                raise ValueError(f"hyperedge {e!r} has a vertex outside 0..{self.n - 1}")
            norm.append(t)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_masks(self) -> tuple[int, ...]:
        return _edge_masks(self)


@lru_cache(maxsize=256)
def _edge_masks(h: Hypergraph) -> tuple[int, ...]:
    return tuple(mask_from(e) for e in h.edges)


@dataclass(frozen=True)
class XorInstance:
    """Hypergraph plus a +/-1 sign per hyperedge."""

    hypergraph: Hypergraph
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.signs) != self.hypergraph.m:
            raise ValueError("signs length must equal the number of hyperedges")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @property
    def n(self) -> int:
        return self.hypergraph.n

    @property
    def k(self) -> int:
        return self.hypergraph.k

    @property
    def m(self) -> int:
        return self.hypergraph.m


@dataclass(frozen=True)
class EvenCover:
    """Set of hyperedge indices whose mod-2 vertex-indicator sum is zero."""

    edge_indices: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.edge_indices)


Assignment = Sequence[int]       # n entries in {-1, +1}


def _check_assignment(n: int, x: Assignment) -> None:
    if len(x) != n:
        raise ValueError(f"assignment has length {len(x)}, expected {n}")
    if any(v not in (-1, 1) for v in x):
        raise ValueError("assignment entries must be +1 or -1")


def verify_even_cover(h: Hypergraph, cover) -> bool:
    """True iff every vertex lies in an even number of the selected hyperedges.

    The empty cover verifies (it is the zero vector); callers reporting covers
    must reject it separately.
    """
    indices = cover.edge_indices if isinstance(cover, EvenCover) else frozenset(cover)
    masks = h.edge_masks()
    acc = 0
    for i in indices:
        if not 0 <= i < h.m:
            raise IndexError(f"edge index {i} out of range 0..{h.m - 1}")
        acc ^= masks[i]
    return acc == 0


def min_even_cover_oracle(h: Hypergraph, size_cap: int) -> Optional[tuple[int, EvenCover]]:
    """Smallest nonempty even cover of size <= size_cap, by exhaustive F2 search.

    Meet-in-the-middle over subsets of the edge list; exact. Returns None when
    no nonempty even cover of size <= size_cap exists.
    """
    m = h.m
    if m > ORACLE_EDGE_LIMIT:
        raise CapacityError(
            f"even-cover oracle supports at most {ORACLE_EDGE_LIMIT} hyperedges, got {m}"
        )
    if m == 0 or size_cap < 1:
        return None
    masks = h.edge_masks()
    a = m // 2
    left, right = masks[:a], masks[a:]

    # best (size, subset bitmask) per xor value over all left subsets, empty included
    best_left: dict[int, tuple[int, int]] = {}
    xors = [0] * (1 << a)
    for sub in range(1 << a):
        if sub:
            low = (sub & -sub).bit_length() - 1
            xors[sub] = xors[sub & (sub - 1)] ^ left[low]
        key = xors[sub]
        cand = (sub.bit_count(), sub)
        if key not in best_left or cand < best_left[key]:
            best_left[key] = cand

    # nonempty left subsets with xor 0 are covers on their own
    best: Optional[tuple[int, int, int]] = None   # (size, left_sub, right_sub)
    for sub in range(1, 1 << a):
        if xors[sub] == 0:
            cand = (sub.bit_count(), sub, 0)
            if best is None or cand < best:
                best = cand

    b = m - a
    rx = [0] * (1 << b)
    for sub in range(1, 1 << b):
        low = (sub & -sub).bit_length() - 1
        rx[sub] = rx[sub & (sub - 1)] ^ right[low]
        match = best_left.get(rx[sub])
        if match is not None:
            cand = (match[0] + sub.bit_count(), match[1], sub)
            if best is None or cand < best:
                best = cand

    if best is None or best[0] > size_cap:
        return None
    size, lsub, rsub = best
    idx = {i for i in range(a) if (lsub >> i) & 1}
    idx |= {a + i for i in range(b) if (rsub >> i) & 1}
    cover = EvenCover(frozenset(idx))
    assert verify_even_cover(h, cover)
    return size, cover


def graph_girth(h: Hypergraph):
    """Exact girth of a 2-uniform hypergraph (a graph); math.inf for forests.

    A repeated edge is a 2-cycle.
    """
    if h.k != 2:
        raise ValueError(f"graph_girth requires k = 2, got k = {h.k}")
    if len(set(h.edges)) != h.m:
        return 2
    adj: list[list[int]] = [[] for _ in range(h.n)]
    for u, v in h.edges:
        adj[u].append(v)
        adj[v].append(u)
    best = math.inf
    for s in range(h.n):
        dist = {s: 0}
        parent = {s: -1}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                if 2 * dist[u] + 1 >= best:
                    continue
                for v in adj[u]:
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        parent[v] = u
                        nxt.append(v)
                    elif v != parent[u]:
                        best = min(best, dist[u] + dist[v] + 1)
            frontier = nxt
        if best == 3:
            break
    return best


def eval_xor(inst: XorInstance, x: Assignment) -> Fraction:
    """Exact instance value: the signed fraction of satisfied parities, in [-1, 1]."""
    h = inst.hypergraph
    if h.m == 0:
        raise ValueError("cannot evaluate an empty instance")
    _check_assignment(h.n, x)
    total = 0
    for sign, edge in zip(inst.signs, h.edges):
        p = sign
        for v in edge:
            p *= x[v]
        total += p
    return Fraction(total, h.m)


def brute_force_max_xor(inst: XorInstance) -> Fraction:
    """Exact max of eval_xor over all 2^n assignments (Walsh-Hadamard scan)."""
    h = inst.hypergraph
    if h.n > BRUTE_FORCE_VAR_LIMIT:
        raise CapacityError(
            f"brute-force oracle supports at most {BRUTE_FORCE_VAR_LIMIT} variables, got {h.n}"
        )
    if h.m == 0:
        raise ValueError("cannot evaluate an empty instance")
    size = 1 << h.n
    g = np.zeros(size, dtype=np.int64)
    for mask, sign in zip(h.edge_masks(), inst.signs):
        g[mask] += sign
    # in-place Walsh-Hadamard transform: g[z] becomes sum_c g[c] * (-1)^{|z & c|}
    step = 1
    while step < size:
        blocks = g.reshape(-1, 2, step)
        a = blocks[:, 0, :].copy()
        b = blocks[:, 1, :].copy()
        blocks[:, 0, :] = a + b
        blocks[:, 1, :] = a - b
        step *= 2
    return Fraction(int(g.max()), h.m)


def _draw_sorted_edge(rng: random.Random, n: int, k: int) -> tuple[int, ...]:
    # partial Fisher-Yates, pinned to the rng's randrange stream
    pool = list(range(n))
    for i in range(k):
        j = rng.randrange(i, n)
        pool[i], pool[j] = pool[j], pool[i]
    return tuple(sorted(pool[:k]))


def _unrank_combination(rank: int, n: int, k: int) -> tuple[int, ...]:
    out = []
    prev = -1
    for slot in range(k):
        v = prev + 1
        while comb(n - 1 - v, k - 1 - slot) <= rank:
            rank -= comb(n - 1 - v, k - 1 - slot)
            v += 1
        out.append(v)
        prev = v
    return tuple(out)


def gen_random(n: int, k: int, m: int, seed: int, mode: str = "xor"):
    """Seeded deterministic instance generator.

    mode selects the output type and hyperedge distribution:
      "hyg"        distinct hyperedges, no signs
      "hyg-multi"  hyperedges with replacement, no signs
      "xor"        distinct hyperedges, uniform +/-1 signs
      "xor-multi"  with replacement, uniform +/-1 signs
    """
    if n < 1 or k < 2 or m < 0:
        raise ValueError("parameters must be positive (m may be zero)")
    if k > n:
        raise ValueError(f"k = {k} exceeds n = {n}")
    if mode not in ("hyg", "hyg-multi", "xor", "xor-multi"):
        raise ValueError(f"unknown mode {mode!r}")
    distinct = not mode.endswith("-multi")
    total = comb(n, k)
    if distinct and m > total:
        raise ValueError(f"cannot draw {m} distinct hyperedges from C({n},{k}) = {total}")

    rng = random.Random(seed)
    edges: list[tuple[int, ...]] = []
    if not distinct:
        edges = [_draw_sorted_edge(rng, n, k) for _ in range(m)]
    elif total <= max(100_000, 4 * m):
        # sample combination ranks without replacement (partial Fisher-Yates on ranks)
        ranks = list(range(total))
        for i in range(m):
            j = rng.randrange(i, total)
            ranks[i], ranks[j] = ranks[j], ranks[i]
        edges = [_unrank_combination(ranks[i], n, k) for i in range(m)]
    else:
        seen = set()
        while len(edges) < m:
            e = _draw_sorted_edge(rng, n, k)
            if e not in seen:
                seen.add(e)
                edges.append(e)

    h = Hypergraph(n=n, k=k, edges=tuple(edges))
    if mode.startswith("hyg"):
        return h
    signs = tuple(1 if rng.randrange(2) == 0 else -1 for _ in range(m))
    return XorInstance(hypergraph=h, signs=signs)


def random_assignment(n: int, rng: random.Random) -> tuple[int, ...]:
    return tuple(1 if rng.randrange(2) == 0 else -1 for _ in range(n))
