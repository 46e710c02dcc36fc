"""Instance transformations and reduction rules.

* single_source_transform: add a super-source taxon so the web has exactly
  one source; solutions of the transformed instance are the originals plus
  the new taxon.
* rr_reachability_prune: drop taxa that no budget-k viable set can reach.
* rr_heavy_edge_accept: if some edge alone meets the threshold, answer yes.
* rr_redundant_prey: drop arcs made redundant by a prey-superset feeder.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .core import (FoodWeb, Instance, PhyloTree, Solution, is_viable, pd,
                   viability_certificate)
from .errors import PreconditionError


def remove_taxa(inst: Instance, removed) -> Instance:
    """Sub-instance on the surviving taxa (k, D unchanged).

    Internal vertices left without offspring disappear; unary vertices are
    kept, so the tree may be non-strict afterwards.
    """
    removed = frozenset(removed)
    tree = inst.tree
    keep_taxa = tree.taxa - removed
    keep: set[str] = {tree.root}
    for x in keep_taxa:
        for v in tree.root_path(x):
            if v in keep:
                break
            keep.add(v)
    parent = {v: tree.parent[v] for v in keep if v != tree.root}
    weight = {v: tree.weight[v] for v in keep if v != tree.root}
    new_tree = PhyloTree(tree.root, parent, weight, strict=False)
    return Instance(new_tree, inst.web.restrict(keep_taxa), inst.k, inst.D)


def source_distances(web: FoodWeb) -> dict[str, int]:
    """Hop distance from the nearest source (sources are at 0)."""
    dist = {x: 0 for x in web.sources}
    queue = deque(sorted(web.sources))
    while queue:
        x = queue.popleft()
        for y in sorted(web.pred[x]):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def single_source_transform(inst: Instance, star_weight: Optional[int] = None
                            ) -> tuple[Instance, str]:
    """Add a taxon feeding every source, as a star child of the root.

    With the default weight D+1 the new parameters are k+1 and 2D+1; a
    solution of the original corresponds to the same set plus the new taxon.
    """
    w = inst.D + 1 if star_weight is None else star_weight
    if w < 1:
        raise PreconditionError("star edge weight must be positive")
    star = "*"
    while star in inst.tree.vertices:
        star += "*"
    tree = inst.tree
    parent = dict(tree.parent)
    weight = dict(tree.weight)
    parent[star] = tree.root
    weight[star] = w
    new_tree = PhyloTree(tree.root, parent, weight, strict=False)
    prey = {x: set(p) for x, p in inst.web.prey.items()}
    for s in inst.web.sources:
        prey[s] = {star}
    prey[star] = set()
    new_web = FoodWeb(inst.web.taxa | {star}, prey)
    return Instance(new_tree, new_web, inst.k + 1, inst.D + w), star


def rr_reachability_prune(inst: Instance) -> Instance:
    """Remove taxa at hop distance >= k from every source (one exhaustive
    pass; unreachable taxa count as infinitely far)."""
    dist = source_distances(inst.web)
    removed = {x for x in inst.web.taxa if dist.get(x, inst.k) >= inst.k}
    if not removed:
        return inst
    return remove_taxa(inst, removed)


def _is_rr1_fixpoint(inst: Instance) -> bool:
    dist = source_distances(inst.web)
    return all(dist.get(x, inst.k) < inst.k for x in inst.web.taxa)


def rr_heavy_edge_accept(inst: Instance) -> Optional[Solution]:
    """After the reachability prune: a single edge of weight >= D yields a
    yes-witness (shortest source path to one of its offspring)."""
    if not _is_rr1_fixpoint(inst):
        raise PreconditionError("reachability prune must be exhaustive first")
    if inst.D < 1:
        empty = frozenset()
        return Solution(empty, 0, {})
    heavy = None
    for u, v, w in inst.tree.edges():
        if w >= inst.D:
            heavy = v
            break
    if heavy is None:
        return None
    dist = source_distances(inst.web)
    x = min(inst.tree.offspring(heavy), key=lambda t: (dist[t], t))
    # walk back along BFS distances to a source
    path = [x]
    while dist[path[-1]] > 0:
        cur = path[-1]
        prev = min((p for p in inst.web.prey[cur]
                    if dist.get(p, -1) == dist[cur] - 1))
        path.append(prev)
    witness = frozenset(path)
    assert len(witness) <= inst.k and is_viable(inst.web, witness)
    return Solution(witness, pd(inst.tree, witness),
                    viability_certificate(inst.web, witness))


def rr_redundant_prey(inst: Instance) -> Instance:
    """Drop arc v->w when v is not a source and every prey of v also feeds w.
    Applied to a fixpoint; turns cluster-graph webs into out-stars."""
    prey = {x: set(p) for x, p in inst.web.prey.items()}
    sources = inst.web.sources
    changed = True
    while changed:
        changed = False
        for w in sorted(prey):
            for v in sorted(prey[w]):
                if v in sources:
                    continue
                if prey[v] and all(u in prey[w] for u in prey[v]):
                    prey[w].discard(v)
                    changed = True
    web = FoodWeb(inst.web.taxa, prey)
    return Instance(inst.tree, web, inst.k, inst.D)


@dataclass
class PreprocessResult:
    instance: Instance
    decided: Optional[Solution]  # a yes-witness, when RR2 fires


def preprocess(inst: Instance, redundant_prey: bool = False
               ) -> PreprocessResult:
    """RR pipeline in the canonical order: reachability prune, heavy-edge
    accept, optionally redundant-prey arc removal."""
    reduced = rr_reachability_prune(inst)
    witness = rr_heavy_edge_accept(reduced)
    if witness is not None:
        return PreprocessResult(reduced, witness)
    if redundant_prey:
        reduced = rr_redundant_prey(reduced)
    return PreprocessResult(reduced, None)
