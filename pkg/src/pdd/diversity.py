"""Solver parameterized by the diversity threshold D.

Edges get color SETS: edge e_j receives the colors of its block of weight
units [W_{j-1}+1 .. W_j] under a function f: [W] -> [D], so a set of taxa
whose root-path edges cover all D colors has diversity >= D.  Taxa separately
get single colors (injectivity bounds the solution size by k).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import Instance, PhyloTree, Solution, is_viable, pd, \
    viability_certificate
from .errors import PreconditionError
from .colorcoding import VERIFY_BUDGET, build_perfect_hash_family
from .preprocess import rr_heavy_edge_accept, rr_reachability_prune, \
    single_source_transform


@dataclass(frozen=True)
class EdgeColorAssignment:
    edge_order: tuple[str, ...]           # child vertices, preorder
    prefix_weights: tuple[int, ...]       # W_0 .. W_{|E|}
    edge_colors: dict[str, frozenset[int]]
    taxon_color: dict[str, int]           # the hat-coloring
    taxon_cover: dict[str, frozenset[int]]  # union of root-path edge colors

    @property
    def total_weight(self) -> int:
        return self.prefix_weights[-1]


def build_edge_color_assignment(tree: PhyloTree, f: Sequence[int],
                                g: Sequence[int]) -> EdgeColorAssignment:
    """f maps weight units 1..W to edge colors (given 0-indexed), g maps the
    name-sorted taxa to taxon colors."""
    order = []
    prefix = [0]
    colors: dict[str, frozenset[int]] = {}
    for _, v, w in tree.edges():
        lo = prefix[-1]
        prefix.append(lo + w)
        order.append(v)
        # the color set can be smaller than the weight when f repeats a
        # color inside the block; coverage stays sound, only the existence
        # argument needs block-injective f somewhere in the family
        colors[v] = frozenset(f[i] for i in range(lo, lo + w))
    if len(f) != prefix[-1]:
        raise PreconditionError("f must be total on the weight units")
    taxa = sorted(tree.taxa)
    if len(g) != len(taxa):
        raise PreconditionError("g must be total on the taxa")
    taxon_color = {x: g[j] for j, x in enumerate(taxa)}
    cover: dict[str, frozenset[int]] = {}
    for x in taxa:
        acc: set[int] = set()
        for v in tree.root_path(x)[:-1]:
            acc |= colors[v]
        cover[x] = frozenset(acc)
    return EdgeColorAssignment(tuple(order), tuple(prefix), colors,
                               taxon_color, cover)


def solve_d_colored_pdd(inst: Instance, asg: EdgeColorAssignment
                        ) -> Optional[Solution]:
    """Find a viable set whose root-path edges cover every color in [D] and
    whose taxon colors are pairwise distinct.

    State per taxon: achievable (covered edge-color set, used taxon-color
    set) pairs with one witness each, combined along web arcs by disjoint
    taxon-color union.  This is the sparse form of the boolean color-subset
    tables: coverage is downward closed, so only maximal covered sets are
    kept.
    """
    sources = sorted(inst.web.sources)
    if len(sources) != 1:
        raise PreconditionError("web must have a single source")
    if inst.tree.max_weight >= inst.D:
        raise PreconditionError("heavy edges must be handled before the DP")
    dmask_full = (1 << inst.D) - 1

    def to_mask(colors: frozenset[int]) -> int:
        m = 0
        for c in colors:
            m |= 1 << (c - 1)
        return m

    cover = {x: to_mask(asg.taxon_cover[x]) for x in inst.web.taxa}
    hat = {x: 1 << (asg.taxon_color[x] - 1) for x in inst.web.taxa}

    tables: dict[str, dict[tuple[int, int], frozenset[str]]] = {}
    order = inst.web.topological_order()
    for x in reversed(order):
        cur: dict[tuple[int, int], frozenset[str]] = {
            (cover[x], hat[x]): frozenset([x])}
        for y in sorted(inst.web.pred[x]):
            new = dict(cur)
            for (u1, c1), s1 in cur.items():
                for (u2, c2), s2 in tables[y].items():
                    if c1 & c2:
                        continue
                    key = (u1 | u2, c1 | c2)
                    if key not in new:
                        new[key] = s1 | s2
            # drop states dominated by a larger cover with the same colors
            pruned: dict[tuple[int, int], frozenset[str]] = {}
            for (u, c), s in new.items():
                dominated = any(
                    c2 == c and u2 | u == u2 and u2 != u
                    for (u2, c2) in new)
                if not dominated:
                    pruned[(u, c)] = s
            cur = pruned
        tables[x] = cur
    for (u, _c), s in tables[sources[0]].items():
        if u & dmask_full == dmask_full:
            return Solution(s, pd(inst.tree, s),
                            viability_certificate(inst.web, s))
    return None


def solve_pdd_by_d(inst: Instance, mode: str = "exact", seed: int = 0,
                   epsilon: float = 0.1,
                   budget: int = VERIFY_BUDGET) -> Optional[Solution]:
    """Pipeline: reachability prune, heavy-edge accept, single-source
    transform (unit star edge), then one DP run per (f, g) color grid cell."""
    if inst.D <= 0:
        return Solution(frozenset(), 0, {})
    reduced = rr_reachability_prune(inst)
    witness = rr_heavy_edge_accept(reduced)
    if witness is not None:
        return witness
    if reduced.k == 0 or not reduced.web.taxa:
        return None
    if reduced.tree.total_weight < reduced.D:
        return None
    k_eff = min(reduced.k, len(reduced.web.taxa))
    transformed, star = single_source_transform(
        reduced.with_params(k=k_eff), star_weight=1)
    dp_inst = transformed  # D' = D+1, k' = k_eff+1
    W = transformed.tree.total_weight
    Dp = transformed.D
    orig_taxa = sorted(reduced.web.taxa)
    f_family = build_perfect_hash_family(W, Dp, mode=mode, seed=seed,
                                         epsilon=epsilon / 2, budget=budget)
    g_family = build_perfect_hash_family(len(orig_taxa), k_eff, mode=mode,
                                         seed=seed + 1, epsilon=epsilon / 2,
                                         budget=budget)
    taxa_t = sorted(transformed.web.taxa)
    orig_index = {x: j for j, x in enumerate(orig_taxa)}
    for f in f_family.functions:
        for g in g_family.functions:
            g_full = tuple(k_eff + 1 if x == star else g[orig_index[x]]
                           for x in taxa_t)
            asg = build_edge_color_assignment(transformed.tree, f, g_full)
            found = solve_d_colored_pdd(dp_inst, asg)
            if found is None:
                continue
            cand = found.taxa - {star}
            value = pd(inst.tree, cand)
            if (len(cand) <= inst.k and value >= inst.D
                    and is_viable(inst.web, cand)):
                return Solution(cand, value,
                                viability_certificate(inst.web, cand))
    return None
