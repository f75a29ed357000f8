"""Colored Kikuchi graphs for odd arity: green/blue vertex pairs, typed degrees,
the heavy-edge deletion process with parameter eta, the equalizing step, the
predicted deletion-rate bound, and the large-intersection reduction.

A vertex is a pair (S1, S2) of subsets of [n] with |S1| + |S2| = r, encoded as
an r-subset of [2n] (green bits 0..n-1, blue bits n..2n-1). For an ordered
clause pair (C, C') of a group with center U, edges connect S to
T = S xor (green C~ xor blue C~') subject to the balanced intersection rule.
Edge bookkeeping is per ordered pair; alpha is the measured per-ordered-pair
count of unordered edges (the closed form is reported, never assumed).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .core import CapacityError, EvenCover, Hypergraph
from .decomposition import Decomposition, Group
from .kikuchi_even import Caps, DEFAULT_CAPS
from .subsets import all_subset_masks_colex, mask_from, vertices_from

Edge = tuple[int, int, int, int, int]     # (s_rank, t_rank, group, green clause, blue clause)


@dataclass
class ColoredKikuchiGraph:
    n: int
    k: int
    r: int
    t: int                                   # common center size of the groups
    groups: tuple[Group, ...]
    vertex_masks: list[int]                  # colex over 2n bit positions
    edges: list[Edge]
    degrees: np.ndarray
    alpha: Optional[int]                     # measured unordered edges per ordered pair
    alpha_closed_form: int                   # per unordered pair, as displayed

    @property
    def p(self) -> int:
        return len(self.groups)

    @property
    def num_vertices(self) -> int:
        return len(self.vertex_masks)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_ordered_pairs(self) -> int:
        return sum(len(g.clause_indices) * (len(g.clause_indices) - 1) for g in self.groups)

    @property
    def average_degree(self) -> Fraction:
        return Fraction(2 * self.num_edges, self.num_vertices)

    def gamma_diagonal(self, degrees=None) -> list[Fraction]:
        deg = self.degrees if degrees is None else degrees
        total = int(np.sum(deg))
        d = Fraction(total, self.num_vertices)
        return [Fraction(int(x)) + d for x in deg]

    def adjacency(self, signs=None, keep=None) -> sp.csr_matrix:
        """Signed adjacency of (a subgraph of) the colored Kikuchi graph.

        signs: per-clause instance signs; an edge gets b_C * b_C'.
        keep:  boolean mask over self.edges selecting the subgraph.
        """
        nv = self.num_vertices
        rows, cols, vals = [], [], []
        for pos, (s, t, gi, a, b) in enumerate(self.edges):
            if keep is not None and not keep[pos]:
                continue
            w = 1.0 if signs is None else float(signs[a] * signs[b])
            rows += [s, t]
            cols += [t, s]
            vals += [w, w]
        if not rows:
            return sp.csr_matrix((nv, nv))
        return sp.coo_matrix((vals, (rows, cols)), shape=(nv, nv), dtype=np.float64).tocsr()

    def subgraph_degrees(self, keep) -> np.ndarray:
        deg = np.zeros(self.num_vertices, dtype=np.int64)
        for pos, (s, t, *_rest) in enumerate(self.edges):
            if keep[pos]:
                deg[s] += 1
                deg[t] += 1
        return deg

    def clause_type_degree(self, h: Hypergraph, vertex_mask: int, gi: int) -> int:
        """Typed degree d_{S,i}: clauses of group gi whose reduced set meets the
        green or blue side of S in one of the two balanced sizes."""
        grp = self.groups[gi]
        umask = mask_from(grp.center)
        kt = self.k - self.t
        hb, lb = (kt + 1) // 2, kt // 2
        green = vertex_mask & ((1 << self.n) - 1)
        blue = vertex_mask >> self.n
        cnt = 0
        for c in grp.clause_indices:
            ct = h.edge_masks()[c] ^ umask
            g1 = (ct & green).bit_count()
            g2 = (ct & blue).bit_count()
            if g1 in (hb, lb) or g2 in (hb, lb):
                cnt += 1
        return cnt


def build_colored_kikuchi(h: Hypergraph, decomp: Decomposition, level: int, r: int,
                          caps: Caps = DEFAULT_CAPS) -> ColoredKikuchiGraph:
    """Enumerate the colored Kikuchi graph of the level's groups explicitly."""
    groups = decomp.groups_at(level)
    if level > h.k - 1 or level < 1:
        raise ValueError(f"level must lie in 1..k-1, got {level}")
    for g in groups:
        if len(g.center) != level:
            raise ValueError(f"group center {g.center} does not have size {level}")
        for c in g.clause_indices:
            if not set(g.center).issubset(h.edges[c]):
                raise ValueError(f"clause {c} does not contain its group center")

    kt = h.k - level
    hb, lb = (kt + 1) // 2, kt // 2
    nv = comb(2 * h.n, r)
    if nv > caps.max_vertices:
        raise CapacityError(f"C({2 * h.n},{r}) = {nv} vertices exceeds cap {caps.max_vertices}")
    wneed = r - kt
    free_count = 2 * h.n - 2 * kt
    if 0 <= wneed <= free_count:
        closed = comb(kt, lb) * comb(kt, hb) * comb(free_count, wneed) * (2 if kt % 2 else 1)
    else:
        closed = 0
    pairs = sum(comb(len(g.clause_indices), 2) for g in groups)
    if pairs * closed > caps.max_edges:
        raise CapacityError(
            f"estimated {pairs * closed} edges ({pairs} pairs, alpha_t = {closed}) "
            f"exceeds cap {caps.max_edges}"
        )

    vertex_masks = all_subset_masks_colex(2 * h.n, r)
    rank_of: dict[int, int] = {mk: i for i, mk in enumerate(vertex_masks)}
    masks = h.edge_masks()
    edges: list[Edge] = []
    per_pair: dict[tuple[int, int, int], int] = {}
    for gi, grp in enumerate(groups):
        umask = mask_from(grp.center)
        for a in grp.clause_indices:
            for b in grp.clause_indices:
                if a == b:
                    continue
                per_pair[(gi, a, b)] = 0
                if wneed < 0 or wneed > free_count:
                    continue
                ct = vertices_from(masks[a] ^ umask)       # C~  (green side)
                cpt = vertices_from(masks[b] ^ umask)      # C~' (blue side)
                diff = mask_from(ct) | (mask_from(cpt) << h.n)
                free = [pos for pos in range(2 * h.n) if not (diff >> pos) & 1]
                # for even k-t the two balanced splits coincide, so each unordered
                # edge would be produced from both sides; pinning min(C~) to the
                # green S-side half keeps exactly one representative
                if kt % 2 == 0:
                    a_choices = [(ct[0],) + rest for rest in combinations(ct[1:], hb - 1)]
                else:
                    a_choices = list(combinations(ct, hb))
                cnt = 0
                for aset in a_choices:
                    for bset in combinations(cpt, lb):
                        base = mask_from(aset) | (mask_from(bset) << h.n)
                        for w in combinations(free, wneed):
                            smask = base | mask_from(w)
                            tmask = smask ^ diff
                            sr = rank_of[smask]
                            tr = rank_of[tmask]
                            edges.append((min(sr, tr), max(sr, tr), gi, a, b))
                            cnt += 1
                per_pair[(gi, a, b)] = cnt
    edges.sort()

    alpha: Optional[int] = None
    if per_pair:
        values = set(per_pair.values())
        if len(values) != 1:
            raise AssertionError(f"per-ordered-pair edge counts are not constant: {sorted(values)}")
        alpha = values.pop()

    degrees = np.zeros(nv, dtype=np.int64)
    for s, t, *_rest in edges:
        degrees[s] += 1
        degrees[t] += 1

    return ColoredKikuchiGraph(n=h.n, k=h.k, r=r, t=level, groups=groups,
                               vertex_masks=vertex_masks, edges=edges, degrees=degrees,
                               alpha=alpha, alpha_closed_form=closed)


@dataclass
class DeletionResult:
    surviving: np.ndarray                    # boolean over graph.edges
    per_pair_survival: dict[tuple[int, int, int], int]
    eta: float
    equalized: bool
    kappa: Optional[int] = None
    rho: Optional[Fraction] = None
    degenerate: bool = False

    @property
    def num_surviving(self) -> int:
        return int(np.sum(self.surviving))


def delete_heavy_edges(g: ColoredKikuchiGraph, eta) -> DeletionResult:
    """One-shot deletion: drop every edge {S,T} from pair (C,C') such that S or T
    is incident (within the same group) to more than eta edges involving C or C'.

    eta = math.inf is the no-op sentinel. Surviving per-vertex per-clause
    incidence is <= eta afterwards.
    """
    if eta != math.inf and eta < 1:
        raise ValueError("eta must be >= 1 (or math.inf)")
    nedges = g.num_edges
    surviving = np.ones(nedges, dtype=bool)
    if eta != math.inf and nedges:
        inc = Counter()
        for s, t, gi, a, b in g.edges:
            inc[(s, gi, a)] += 1
            inc[(s, gi, b)] += 1
            inc[(t, gi, a)] += 1
            inc[(t, gi, b)] += 1
        for pos, (s, t, gi, a, b) in enumerate(g.edges):
            if (inc[(s, gi, a)] > eta or inc[(s, gi, b)] > eta
                    or inc[(t, gi, a)] > eta or inc[(t, gi, b)] > eta):
                surviving[pos] = False
    per_pair: dict[tuple[int, int, int], int] = {}
    for grp_i, grp in enumerate(g.groups):
        for a in grp.clause_indices:
            for b in grp.clause_indices:
                if a != b:
                    per_pair[(grp_i, a, b)] = 0
    for pos, (s, t, gi, a, b) in enumerate(g.edges):
        if surviving[pos]:
            per_pair[(gi, a, b)] += 1
    return DeletionResult(surviving=surviving, per_pair_survival=per_pair,
                          eta=eta, equalized=False)


def equalize_deletion(g: ColoredKikuchiGraph, pre: DeletionResult) -> DeletionResult:
    """Cut every ordered pair down to kappa = min survival, dropping the
    lexicographically largest surviving edges; rho = 1 - kappa/alpha.

    The resulting quadratic form satisfies x' A_hat x = (1 - rho) x' A x for
    every assignment-induced x, exactly.
    """
    if pre.equalized:
        raise ValueError("deletion result is already equalized")
    if g.alpha is None or not g.edges:
        return DeletionResult(surviving=pre.surviving.copy(), per_pair_survival=dict(pre.per_pair_survival),
                              eta=pre.eta, equalized=True, kappa=None, rho=Fraction(0),
                              degenerate=True)
    kappa = min(pre.per_pair_survival.values())
    surviving = pre.surviving.copy()
    by_pair: dict[tuple[int, int, int], list[int]] = {}
    for pos, (s, t, gi, a, b) in enumerate(g.edges):
        if surviving[pos]:
            by_pair.setdefault((gi, a, b), []).append(pos)
    for key, positions in by_pair.items():
        excess = len(positions) - kappa
        if excess > 0:
            # edges are stored sorted, so trailing positions are lexicographically largest
            for pos in positions[-excess:]:
                surviving[pos] = False
    per_pair = {key: min(cnt, kappa) for key, cnt in pre.per_pair_survival.items()}
    rho = 1 - Fraction(kappa, g.alpha)
    return DeletionResult(surviving=surviving, per_pair_survival=per_pair, eta=pre.eta,
                          equalized=True, kappa=kappa, rho=rho, degenerate=(kappa == 0))


def predicted_deletion_fraction(k: int, n: int, r: int, level: int, eta,
                                thresholds: Optional[dict[int, int]] = None,
                                h: Optional[Hypergraph] = None,
                                groups: Optional[tuple[Group, ...]] = None) -> Fraction:
    """Upper bound on the per-pair deletion fraction.

    Refutation form (thresholds given):
        (4^k / eta) * sum_{s=level}^{floor((k+level)/2)} tau_s * (r/n)^{floor((k+level)/2) - s}
    Cover form (groups given): the finite sum with the measured intersection
    counts of each clause substituted for the caps,
        (4 * 2^k / eta) * max_{j, C} sum_s cnt_{j,C,s} * (r/n)^{floor((k-level)/2) - s + level}.
    """
    if eta != math.inf and eta < 1:
        raise ValueError("eta must be >= 1")
    if eta == math.inf:
        return Fraction(0)
    if thresholds is not None:
        top = (k + level) // 2
        total = Fraction(0)
        for s in range(level, top + 1):
            tau = thresholds.get(s)
            if tau is None:
                raise ValueError(f"threshold tau_{s} missing")
            total += tau * Fraction(r, n) ** (top - s)
        return Fraction(4**k, 1) / eta * total
    if h is None or groups is None:
        raise ValueError("provide thresholds (refutation) or h and groups (cover)")
    masks = h.edge_masks()
    worst = Fraction(0)
    e0 = (k - level) // 2
    for grp in groups:
        for a in grp.clause_indices:
            val = Fraction(0)
            for b in grp.clause_indices:
                if b == a:
                    continue
                s = (masks[a] & masks[b]).bit_count()
                val += Fraction(r, n) ** (e0 - s + level)
            worst = max(worst, val)
    return Fraction(4 * 2**k, 1) / eta * worst


def measured_deletion_fractions(g: ColoredKikuchiGraph, result: DeletionResult) -> dict:
    """Per ordered pair, the fraction of its edges deleted."""
    if g.alpha in (None, 0):
        return {}
    return {key: 1 - Fraction(cnt, g.alpha) for key, cnt in result.per_pair_survival.items()}


def reduce_large_intersection(h: Hypergraph, groups) -> tuple[Hypergraph, list[tuple[int, int]]]:
    """Chain each group into consecutive symmetric differences.

    Requires every pair inside a group to intersect exactly at the group center;
    emits |group| - 1 hyperedges of size 2(k - t) per group. Returns the reduced
    hypergraph and the per-edge source pair (clause indices) for the back-map.
    """
    groups = tuple(groups)
    if not groups:
        raise ValueError("need at least one group")
    level = len(groups[0].center)
    masks = h.edge_masks()
    new_edges = []
    back_map: list[tuple[int, int]] = []
    for gi, grp in enumerate(groups):
        umask = mask_from(grp.center)
        idx = sorted(grp.clause_indices)
        for a in idx:
            for b in idx:
                if a < b and (masks[a] & masks[b]) != umask:
                    raise ValueError(
                        f"clauses {a} and {b} in group {gi} intersect beyond the center"
                    )
        for a, b in zip(idx, idx[1:]):
            diff = masks[a] ^ masks[b]
            new_edges.append(vertices_from(diff))
            back_map.append((a, b))
    hhat = Hypergraph(n=h.n, k=2 * (h.k - level), edges=tuple(new_edges))
    return hhat, back_map


def map_reduced_cover_back(back_map: list[tuple[int, int]], cover) -> EvenCover:
    """Pull an even cover of the reduced hypergraph back to the original:
    sources appearing an odd number of times across the selected chain edges."""
    indices = cover.edge_indices if isinstance(cover, EvenCover) else frozenset(cover)
    parity: Counter = Counter()
    for i in indices:
        a, b = back_map[i]
        parity[a] += 1
        parity[b] += 1
    return EvenCover(frozenset(c for c, cnt in parity.items() if cnt % 2 == 1))


def dump_colored(g: ColoredKikuchiGraph) -> str:
    """Text edge list: header then 'S_rank T_rank group C_index C'_index' lines."""
    lines = [f"kikuchi-odd {g.n} {g.r} {g.t} {g.p}"]
    lines += [f"{s} {t} {gi} {a} {b}" for (s, t, gi, a, b) in g.edges]
    return "\n".join(lines) + "\n"
