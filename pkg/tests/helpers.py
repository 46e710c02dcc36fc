"""Shared builders for the test suite: seeded instance families that hit
each solver's preconditions, plus small-graph enumeration for the
generator certification tests."""

import itertools
import random

import numpy as np

from pdd.core import FoodWeb, Instance, PhyloTree
from pdd.generators import random_tree

SHAPES = ("random", "star", "caterpillar")


def small_random_instance(seed, n_max=10):
    """Mixed-shape seeded instance, n <= n_max."""
    rng = random.Random(seed)
    n = rng.randint(2, n_max)
    from pdd.generators import gen_random
    return gen_random(n, density=rng.choice((0.15, 0.3, 0.5)),
                      weights=(1, 9), shape=SHAPES[seed % 3],
                      k_fraction=rng.choice((0.3, 0.5, 0.8)),
                      d_fraction=rng.choice((0.3, 0.6, 0.9)), seed=seed)


def _params(rng, tree, n):
    k = rng.randint(0, n)
    total = tree.total_weight
    D = rng.randint(0, total)
    return k, D


def _random_web(rng, taxa, density):
    order = list(taxa)
    rng.shuffle(order)
    arcs = []
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if rng.random() < density:
                arcs.append((order[i], order[j]))
    return FoodWeb.from_arcs(taxa, arcs)


def star_instance(seed, n_max=9, density=0.3, weights=(1, 9)):
    rng = random.Random(seed)
    n = rng.randint(2, n_max)
    taxa = [f"x{i}" for i in range(n)]
    tree = PhyloTree.star({x: rng.randint(*weights) for x in taxa})
    web = _random_web(rng, taxa, density)
    k, D = _params(rng, tree, n)
    return Instance(tree, web, k, D)


def height2_instance(seed):
    """Tree of height <= 2, k <= 3, small n."""
    rng = random.Random(seed)
    n = rng.randint(3, 6)
    taxa = [f"x{i}" for i in range(n)]
    edges = []
    groups = {}
    n_internal = rng.randint(0, 2)
    internals = [f"i{j}" for j in range(n_internal)]
    for u in internals:
        edges.append(("rho", u, rng.randint(1, 9)))
        groups[u] = []
    for x in taxa:
        p = rng.choice(internals + ["rho"]) if internals else "rho"
        edges.append((p, x, rng.randint(1, 9)))
        if p != "rho":
            groups[p].append(x)
    # internal vertices need >= 2 children; drop the ones that came up short
    for u in internals:
        if len(groups[u]) < 2:
            edges = [(a, b, w) if a != u else ("rho", b, w)
                     for a, b, w in edges if b != u]
    tree = PhyloTree.from_edges("rho", edges)
    web = _random_web(rng, taxa, 0.3)
    k = rng.randint(0, 3)
    D = rng.randint(0, tree.total_weight)
    return Instance(tree, web, k, D)


def low_diversity_instance(seed):
    """Total tree weight (= maximum diversity) at most 14."""
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    taxa = [f"x{i}" for i in range(n)]
    tree = PhyloTree.star({x: rng.randint(1, 2) for x in taxa})
    web = _random_web(rng, taxa, 0.35)
    k = rng.randint(0, n)
    D = rng.randint(0, tree.total_weight)
    assert tree.total_weight <= 14
    return Instance(tree, web, k, D)


def cluster_modulator_instance(seed, d_max=3):
    """Star tree; food web = transitively-oriented cliques plus at most
    d_max modulator vertices with arbitrary arcs."""
    rng = random.Random(seed)
    sizes = [rng.randint(1, 3) for _ in range(rng.randint(1, 3))]
    taxa = []
    arcs = []
    for ci, size in enumerate(sizes):
        members = [f"c{ci}_{j}" for j in range(size)]
        taxa += members
        for a, b in itertools.combinations(members, 2):
            arcs.append((a, b))
    d = rng.randint(0, d_max)
    mods = [f"y{j}" for j in range(d)]
    order = mods + taxa
    for y in mods:
        for x in taxa + [m for m in mods if m != y]:
            if rng.random() < 0.35:
                a, b = sorted((y, x), key=order.index)
                arcs.append((a, b))
    taxa += mods
    tree = PhyloTree.star({x: rng.randint(1, 9) for x in taxa})
    web = FoodWeb.from_arcs(taxa, sorted(set(arcs)))
    k, D = _params(rng, tree, len(taxa))
    return Instance(tree, web, k, D)


def cocluster_modulator_instance(seed, d_max=2):
    """Food web whose underlying graph is complete multipartite plus at
    most d_max modulator vertices; mixed tree shapes."""
    rng = random.Random(seed)
    sizes = [rng.randint(1, 3) for _ in range(rng.randint(2, 3))]
    parts = []
    taxa = []
    for pi, size in enumerate(sizes):
        members = [f"p{pi}_{j}" for j in range(size)]
        parts.append(members)
        taxa += members
    arcs = []
    order = list(taxa)
    rng.shuffle(order)
    for a, b in itertools.combinations(taxa, 2):
        if any(a in part and b in part for part in parts):
            continue
        arcs.append(tuple(sorted((a, b), key=order.index)))
    d = rng.randint(0, d_max)
    mods = [f"y{j}" for j in range(d)]
    for y in mods:
        for x in taxa:
            if rng.random() < 0.4:
                arcs.append((y, x) if rng.random() < 0.5 else (x, y))
    # orient modulator arcs acyclically by a global order
    order = mods + order
    arcs = sorted({tuple(sorted(e, key=order.index)) for e in arcs})
    taxa += mods
    tree = random_tree(list(taxa), SHAPES[seed % 3], (1, 9), rng)
    web = FoodWeb.from_arcs(taxa, arcs)
    k, D = _params(rng, tree, len(taxa))
    return Instance(tree, web, k, D)


def outforest_instance(seed, n_max=9):
    """Every taxon has at most one prey."""
    rng = random.Random(seed)
    n = rng.randint(2, n_max)
    taxa = [f"x{i}" for i in range(n)]
    order = list(taxa)
    rng.shuffle(order)
    arcs = []
    for i in range(1, n):
        if rng.random() < 0.7:
            arcs.append((order[rng.randint(0, i - 1)], order[i]))
    tree = random_tree(list(taxa), SHAPES[seed % 3], (1, 9), rng)
    web = FoodWeb.from_arcs(taxa, arcs)
    k, D = _params(rng, tree, n)
    return Instance(tree, web, k, D)


def source_separating_instance(seed, n_src=None, n_pred=None, weights=(1, 9)):
    """Sources and predators live in disjoint subtrees under the root and
    the arcs form a partial matching (prey used by at most one predator)."""
    rng = random.Random(seed)
    if n_src is None:
        n_src = rng.randint(2, 5)
    if n_pred is None:
        n_pred = rng.randint(2, min(n_src, 4))
    srcs = [f"s{i}" for i in range(n_src)]
    preds = [f"q{i}" for i in range(n_pred)]
    edges = [("rho", "ps", rng.randint(1, 9)), ("rho", "pq", rng.randint(1, 9))]
    for x in srcs:
        edges.append(("ps", x, rng.randint(*weights)))
    for x in preds:
        edges.append(("pq", x, rng.randint(*weights)))
    tree = PhyloTree.from_edges("rho", edges)
    fed = rng.sample(srcs, n_pred)
    arcs = list(zip(fed, preds))
    web = FoodWeb.from_arcs(tree.taxa, arcs)
    n = n_src + n_pred
    k, D = _params(rng, tree, n)
    return Instance(tree, web, k, D)


# -- small-graph enumeration for generator certification ---------------------

def labeled_cubic_graphs(n):
    """All labeled 3-regular graphs on vertex set range(n)."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    suffix = [[0] * n for _ in range(len(pairs) + 1)]
    for idx in range(len(pairs) - 1, -1, -1):
        i, j = pairs[idx]
        row = suffix[idx + 1][:]
        row[i] += 1
        row[j] += 1
        suffix[idx] = row
    out = []
    deg = [0] * n
    chosen = []

    def rec(idx):
        if idx == len(pairs):
            if all(d == 3 for d in deg):
                out.append(frozenset(chosen))
            return
        if any(deg[v] + suffix[idx][v] < 3 for v in range(n)):
            return
        i, j = pairs[idx]
        rec(idx + 1)
        if deg[i] < 3 and deg[j] < 3:
            deg[i] += 1
            deg[j] += 1
            chosen.append((i, j))
            rec(idx + 1)
            chosen.pop()
            deg[i] -= 1
            deg[j] -= 1

    rec(0)
    return out


def graph_signature(n, edges):
    """Isomorphism-invariant certificate: adjacency spectrum plus the
    sorted per-vertex triangle counts."""
    a = np.zeros((n, n))
    for i, j in edges:
        a[i, j] = a[j, i] = 1
    spectrum = tuple(round(x, 6) for x in sorted(np.linalg.eigvalsh(a)))
    cubes = np.linalg.matrix_power(a, 3)
    return spectrum, tuple(sorted(int(cubes[i, i]) for i in range(n)))


def cubic_graph_classes(n):
    """One representative per isomorphism class of cubic graphs on n
    vertices, keyed by signature."""
    reps = {}
    for g in labeled_cubic_graphs(n):
        reps.setdefault(graph_signature(n, g), g)
    return list(reps.values())
