"""Even-arity Kikuchi graphs: explicit construction, reweighting data, signed
variant, and even-cover extraction from closed walks.

Vertices are the r-subsets S of the vertex set, indexed by colex rank; S ~ T
iff S xor T is a hyperedge, and the edge remembers which one. Every clause
contributes exactly alpha = C(k-1, k/2-1) * C(n-k, r-k/2) unordered edges.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .core import CapacityError, EvenCover, Hypergraph, XorInstance
from .subsets import all_subset_masks_colex, colex_rank


@dataclass(frozen=True)
class Caps:
    """Hard enumeration limits; exceeding them is an explicit error."""

    max_vertices: int = 5_000_000
    max_edges: int = 50_000_000


DEFAULT_CAPS = Caps()


@dataclass
class EvenKikuchiGraph:
    n: int
    k: int
    r: int
    m: int
    vertex_masks: list[int]                    # colex order
    edges: list[tuple[int, int, int]]          # (s_rank, t_rank, clause_index), s < t
    degrees: np.ndarray                        # per-vertex, edge multiplicity counted
    alpha: int                                 # unordered edges per clause
    clause_masks: tuple[int, ...]              # hyperedge bitmasks, by clause index

    @property
    def num_vertices(self) -> int:
        return len(self.vertex_masks)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def average_degree(self) -> Fraction:
        return Fraction(2 * self.num_edges, self.num_vertices)

    def gamma_diagonal(self) -> list[Fraction]:
        d = self.average_degree
        return [Fraction(int(ds)) + d for ds in self.degrees]

    def adjacency(self, signs: Optional[list[int]] = None) -> sp.csr_matrix:
        """Symmetric (signed) adjacency; parallel edges accumulate."""
        nv = self.num_vertices
        if not self.edges:
            return sp.csr_matrix((nv, nv))
        rows, cols, vals = [], [], []
        for s, t, c in self.edges:
            w = 1 if signs is None else signs[c]
            rows += [s, t]
            cols += [t, s]
            vals += [w, w]
        a = sp.coo_matrix((vals, (rows, cols)), shape=(nv, nv), dtype=np.float64)
        return a.tocsr()


@dataclass
class SignedEvenKikuchi:
    graph: EvenKikuchiGraph
    edge_signs: list[int]          # aligned with graph.edges; b of the edge's clause


def build_even_kikuchi(h: Hypergraph, r: int, caps: Caps = DEFAULT_CAPS) -> EvenKikuchiGraph:
    """Enumerate the Kikuchi graph explicitly, with per-clause edge provenance."""
    if h.k % 2 != 0:
        raise ValueError(f"k = {h.k} is odd; use the colored Kikuchi construction instead")
    half = h.k // 2
    if r < half or r > h.n:
        raise ValueError(f"level parameter must satisfy k/2 <= r <= n, got r = {r}")
    nv = comb(h.n, r)
    alpha = comb(h.k - 1, half - 1) * comb(h.n - h.k, r - half) if r - half <= h.n - h.k else 0
    if nv > caps.max_vertices:
        raise CapacityError(f"C({h.n},{r}) = {nv} vertices exceeds cap {caps.max_vertices}")
    if alpha * h.m > caps.max_edges:
        raise CapacityError(
            f"estimated {alpha * h.m} edges (alpha = {alpha}, m = {h.m}) exceeds cap {caps.max_edges}"
        )

    vertex_masks = all_subset_masks_colex(h.n, r)
    edges: list[tuple[int, int, int]] = []
    need_w = r - half
    for ci, edge in enumerate(h.edges):
        rest = [v for v in range(h.n) if v not in edge]
        if need_w > len(rest):
            continue
        v0, tail = edge[0], edge[1:]
        for half_tail in combinations(tail, half - 1):
            # unordered splits, pinned by keeping the clause minimum on one side
            half_set = (v0,) + half_tail
            other = tuple(v for v in edge if v not in half_set)
            for w in combinations(rest, need_w):
                sr = colex_rank(sorted(half_set + w))
                tr = colex_rank(sorted(other + w))
                edges.append((min(sr, tr), max(sr, tr), ci))
    edges.sort()

    degrees = np.zeros(nv, dtype=np.int64)
    per_clause = Counter()
    for s, t, c in edges:
        degrees[s] += 1
        degrees[t] += 1
        per_clause[c] += 1
    for c, cnt in per_clause.items():
        if cnt != alpha:
            raise AssertionError(f"clause {c} contributed {cnt} edges, expected alpha = {alpha}")

    return EvenKikuchiGraph(n=h.n, k=h.k, r=r, m=h.m, vertex_masks=vertex_masks,
                            edges=edges, degrees=degrees, alpha=alpha,
                            clause_masks=h.edge_masks())


def signed_even_kikuchi(inst: XorInstance, r: int, caps: Caps = DEFAULT_CAPS) -> SignedEvenKikuchi:
    g = build_even_kikuchi(inst.hypergraph, r, caps)
    return SignedEvenKikuchi(graph=g, edge_signs=[inst.signs[c] for (_, _, c) in g.edges])


def kikuchi_stats(g: EvenKikuchiGraph) -> dict:
    """Exact summary: alpha, sizes, average degree, degree histogram, Gamma diagonal."""
    d = g.average_degree
    hist = Counter(int(x) for x in g.degrees)
    return {
        "alpha": g.alpha,
        "num_vertices": g.num_vertices,
        "num_edges": g.num_edges,
        "average_degree": d,
        "degree_histogram": dict(sorted(hist.items())),
        "gamma_diagonal": g.gamma_diagonal(),
        "degenerate": g.num_edges == 0,
    }


def extract_cover_from_closed_walk(g: EvenKikuchiGraph, walk: list[int]) -> EvenCover:
    """Clause indices used an odd number of times along a closed walk.

    The walk is a vertex-rank sequence [v0, ..., v_{L-1}], closing v_{L-1} -> v0;
    each consecutive pair must be a Kikuchi edge. The result always verifies
    (possibly as the empty cover, when the walk is trivial). Steps along a
    duplicated clause resolve to the smallest matching index.
    """
    if len(walk) < 2:
        raise ValueError("walk must have at least two vertices")
    lookup: dict[int, int] = {}
    for i, mk in enumerate(g.clause_masks):
        lookup.setdefault(mk, i)
    parity: Counter = Counter()
    for i, s in enumerate(walk):
        t = walk[(i + 1) % len(walk)]
        diff = g.vertex_masks[s] ^ g.vertex_masks[t]
        ci = lookup.get(diff)
        if ci is None:
            raise ValueError(f"walk step {i}: symmetric difference is not a hyperedge")
        parity[ci] += 1
    odd = frozenset(c for c, cnt in parity.items() if cnt % 2 == 1)
    return EvenCover(odd)


def shortest_even_cover_via_kikuchi(h: Hypergraph, r: int, caps: Caps = DEFAULT_CAPS,
                                    max_len: Optional[int] = None
                                    ) -> Optional[tuple[int, EvenCover]]:
    """Search short non-trivial closed walks and extract an even cover.

    Strategy: duplicate clauses give a 2-step walk immediately; otherwise BFS
    from every vertex, and every non-tree edge closing two root paths yields a
    candidate closed walk whose odd-multiplicity clause set is tested. Returns
    (walk length, cover) for the shortest candidate with a nonempty extraction,
    or None. The walk length proves cover size <= length; minimality is the
    exhaustive oracle's job, not this routine's.
    """
    g = build_even_kikuchi(h, r, caps)
    cap = max_len if max_len is not None else g.num_vertices + 1

    by_mask: dict[int, list[int]] = {}
    for i, mk in enumerate(h.edge_masks()):
        by_mask.setdefault(mk, []).append(i)
    if g.alpha >= 1:
        for mk, idxs in by_mask.items():
            if len(idxs) >= 2 and 2 <= cap:
                cover = EvenCover(frozenset(idxs[:2]))
                return 2, cover

    adj: dict[int, list[tuple[int, int]]] = {}
    for s, t, c in g.edges:
        adj.setdefault(s, []).append((t, c))
        adj.setdefault(t, []).append((s, c))

    best: Optional[tuple[int, EvenCover]] = None
    roots = sorted(adj)
    for root in roots:
        dist = {root: 0}
        parent: dict[int, tuple[int, int]] = {}
        frontier = [root]
        limit = (best[0] if best else cap + 1)
        while frontier:
            nxt = []
            for u in frontier:
                if 2 * dist[u] + 1 >= limit:
                    continue
                for v, c in adj[u]:
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        parent[v] = (u, c)
                        nxt.append(v)
                    elif parent.get(u, (None, None))[0] != v:
                        length = dist[u] + dist[v] + 1
                        if length > cap or (best and length >= best[0]):
                            continue
                        parity: Counter = Counter([c])
                        for end in (u, v):
                            x = end
                            while x != root:
                                px, pc = parent[x]
                                parity[pc] += 1
                                x = px
                        odd = frozenset(i for i, cnt in parity.items() if cnt % 2 == 1)
                        if odd:
                            best = (length, EvenCover(odd))
                            limit = length
            frontier = nxt
    return best


def dump_even(g: EvenKikuchiGraph) -> str:
    """Text edge list: header then one 'S_rank T_rank clause_index' line per edge."""
    lines = [f"kikuchi-even {g.n} {g.r} {g.m}"]
    lines += [f"{s} {t} {c}" for (s, t, c) in g.edges]
    return "\n".join(lines) + "\n"
