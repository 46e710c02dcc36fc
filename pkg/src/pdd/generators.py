"""Instance generators.

The three constructive reductions double as certified generators: each
returns the instance together with an equivalence contract (payload + the
claimed iff), and the tests re-check the contract by brute force on both
sides.  gen_random produces seeded instances for fuzzing.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import FoodWeb, Instance, PhyloTree
from .errors import DomainError


@dataclass(frozen=True)
class EquivalenceContract:
    family: str
    payload: dict = field(compare=False)
    claim: str = ""


def gen_from_vertex_cover(vertices: Iterable[str],
                          edges: Iterable[tuple[str, str]], k: int,
                          N: Optional[int] = None
                          ) -> tuple[Instance, EquivalenceContract]:
    """Cubic-graph vertex cover -> PDD.

    Per graph vertex v a leaf v (weight 1); per graph edge e = {u, v} a tree
    vertex e with leaves [u,e], [v,e] below it (weights 1) and a heavy edge
    rho-e of weight N-1; arcs u -> [u,e] and v -> [v,e].  A cover of size
    <= k exists iff a viable set of size k+|E| reaches diversity N|E|+k.
    """
    vertices = sorted(set(vertices))
    edges = sorted({tuple(sorted(e)) for e in edges})
    deg = {v: 0 for v in vertices}
    for u, v in edges:
        if u == v or u not in deg or v not in deg:
            raise DomainError(f"bad edge ({u}, {v})")
        deg[u] += 1
        deg[v] += 1
    if any(d != 3 for d in deg.values()):
        raise DomainError("graph must be cubic")
    n_taxa = len(vertices) + 2 * len(edges)
    if N is None:
        N = n_taxa + 2
    tree_edges: list[tuple[str, str, int]] = []
    arcs: list[tuple[str, str]] = []
    for v in vertices:
        tree_edges.append(("rho", v, 1))
    for u, v in edges:
        ename = f"e({u},{v})"
        tree_edges.append(("rho", ename, N - 1))
        for w in (u, v):
            leaf = f"[{w},{ename}]"
            tree_edges.append((ename, leaf, 1))
            arcs.append((w, leaf))
    tree = PhyloTree.from_edges("rho", tree_edges)
    web = FoodWeb.from_arcs(tree.taxa, arcs)
    inst = Instance(tree, web, len(edges) + k, N * len(edges) + k)
    contract = EquivalenceContract(
        "vertex-cover",
        {"vertices": vertices, "edges": edges, "k": k, "N": N},
        "G has a vertex cover of size <= k iff the instance is a yes")
    return inst, contract


def gen_from_red_blue_nonblocker(red: Iterable[str], blue: Iterable[str],
                                 edges: Iterable[tuple[str, str]], k: int
                                 ) -> tuple[Instance, EquivalenceContract]:
    """Red-blue non-blocker -> s-PDD.

    Star tree, weight 1 on red taxa and 2 on blue; each graph edge becomes
    an arc red -> blue (reds are the sources; the blues must keep a red
    neighbor alive).  Non-blocker of size >= k iff viable set of size
    |V|-k reaches 2|blue|+|red|-k.
    """
    red = sorted(set(red))
    blue = sorted(set(blue))
    if set(red) & set(blue):
        raise DomainError("red and blue overlap")
    norm = []
    for u, v in edges:
        if u in red and v in blue:
            norm.append((u, v))
        elif v in red and u in blue:
            norm.append((v, u))
        else:
            raise DomainError(f"edge ({u}, {v}) is not red-blue")
    weights = {v: 1 for v in red}
    weights.update({v: 2 for v in blue})
    tree = PhyloTree.star(weights)
    web = FoodWeb.from_arcs(tree.taxa, norm)
    n = len(red) + len(blue)
    inst = Instance(tree, web, n - k, 2 * len(blue) + len(red) - k)
    contract = EquivalenceContract(
        "red-blue-nonblocker",
        {"red": red, "blue": blue, "edges": sorted(set(norm)), "k": k},
        "G has a red non-blocker of size >= k iff the instance is a yes")
    return inst, contract


def gen_from_set_cover(family: dict[str, Iterable[str]],
                       universe: Iterable[str], k: int
                       ) -> tuple[Instance, EquivalenceContract]:
    """Set cover -> s-PDD: star with weight-1 leaves per family set and
    weight-2 leaves per element; arcs set -> element for membership."""
    universe = sorted(set(universe))
    family = {q: frozenset(m) for q, m in family.items()}
    if set(family) & set(universe):
        raise DomainError("family names collide with universe elements")
    covered: set[str] = set()
    for q, members in family.items():
        if not members <= set(universe):
            raise DomainError(f"set {q!r} leaves the universe")
        covered |= members
    if covered != set(universe):
        raise DomainError("family does not cover the universe")
    weights = {q: 1 for q in family}
    weights.update({u: 2 for u in universe})
    tree = PhyloTree.star(weights)
    arcs = [(q, u) for q, members in family.items() for u in members]
    web = FoodWeb.from_arcs(tree.taxa, arcs)
    inst = Instance(tree, web, k + len(universe), k + 2 * len(universe))
    contract = EquivalenceContract(
        "set-cover",
        {"family": {q: sorted(m) for q, m in family.items()},
         "universe": universe, "k": k},
        "a cover of size <= k exists iff the instance is a yes")
    return inst, contract


def random_tree(taxa: list[str], shape: str, weights: tuple[int, int],
                rng: random.Random) -> PhyloTree:
    lo, hi = weights

    def w() -> int:
        return rng.randint(lo, hi)

    if shape == "star" or len(taxa) <= 2:
        return PhyloTree.star({x: w() for x in taxa})
    if shape == "caterpillar":
        edges = []
        spine = "rho"
        for i, x in enumerate(taxa[:-2]):
            nxt = f"s{i}"
            edges.append((spine, x, w()))
            edges.append((spine, nxt, w()))
            spine = nxt
        edges.append((spine, taxa[-2], w()))
        edges.append((spine, taxa[-1], w()))
        return PhyloTree.from_edges("rho", edges)
    if shape == "random":
        # recursive random partition into 2-3 blocks per internal vertex
        edges: list[tuple[str, str, int]] = []
        fresh = itertools.count()

        def build(group: list[str], parent: str) -> None:
            if len(group) == 1:
                edges.append((parent, group[0], w()))
                return
            name = f"i{next(fresh)}"
            if parent is not None:
                edges.append((parent, name, w()))
            parts = min(len(group), rng.choice((2, 2, 3)))
            shuffled = group[:]
            rng.shuffle(shuffled)
            cuts = sorted(rng.sample(range(1, len(group)), parts - 1))
            blocks = [shuffled[a:b] for a, b in
                      zip([0] + cuts, cuts + [len(group)])]
            for block in blocks:
                build(block, name)

        name_root = "rho"
        parts = min(len(taxa), rng.choice((2, 2, 3)))
        shuffled = taxa[:]
        rng.shuffle(shuffled)
        cuts = sorted(rng.sample(range(1, len(taxa)), parts - 1))
        for a, b in zip([0] + cuts, cuts + [len(taxa)]):
            build(shuffled[a:b], name_root)
        return PhyloTree.from_edges("rho", edges)
    raise DomainError(f"unknown tree shape {shape!r}")


def gen_random(n: int, density: float = 0.3, weights: tuple[int, int] = (1, 8),
               shape: str = "random", k_fraction: float = 0.5,
               d_fraction: float = 0.6, seed: int = 0) -> Instance:
    """Seeded random instance; arcs respect a random topological order so
    the web is acyclic by construction."""
    if n < 1:
        raise DomainError("need at least one taxon")
    if shape not in ("star", "caterpillar", "random"):
        raise DomainError(f"unknown tree shape {shape!r}")
    rng = random.Random(seed)
    taxa = [f"x{i}" for i in range(n)]
    tree = random_tree(list(taxa), shape, weights, rng)
    order = list(taxa)
    rng.shuffle(order)
    arcs = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                arcs.append((order[i], order[j]))
    web = FoodWeb.from_arcs(taxa, arcs)
    k = max(0, min(n, round(k_fraction * n)))
    D = max(0, min(tree.total_weight + 1,
                   round(d_fraction * tree.total_weight)))
    return Instance(tree, web, k, D)


# -- tiny source-problem brute forces used by the certification tests --------


def min_vertex_cover_size(vertices: list[str],
                          edges: list[tuple[str, str]]) -> int:
    for size in range(len(vertices) + 1):
        for cand in itertools.combinations(sorted(vertices), size):
            cover = set(cand)
            if all(u in cover or v in cover for u, v in edges):
                return size
    return len(vertices)


def max_red_nonblocker_size(red: list[str], blue: list[str],
                            edges: list[tuple[str, str]]) -> int:
    """Largest S subseteq red such that every blue vertex keeps a neighbor
    outside S (and S-vertices... per the problem: N(V_r \\ S) = V_b)."""
    best = 0
    adj: dict[str, set[str]] = {b: set() for b in blue}
    for r, b in edges:
        adj[b].add(r)
    for size in range(len(red), -1, -1):
        for cand in itertools.combinations(sorted(red), size):
            s = set(cand)
            if all(a - s for a in adj.values()):
                return size
    return best


def min_set_cover_size(family: dict[str, frozenset[str]],
                       universe: set[str]) -> Optional[int]:
    names = sorted(family)
    for size in range(len(names) + 1):
        for cand in itertools.combinations(names, size):
            covered: set[str] = set()
            for q in cand:
                covered |= family[q]
            if covered >= universe:
                return size
    return None
