"""Core model: weighted rooted trees over taxa, food webs, problem instances.

Conventions used throughout the package:

* tree vertices and taxa are strings; the taxa are exactly the tree leaves
* every tree edge is keyed by its child vertex (each non-root has one parent)
* food-web arcs run from prey to predator
* a set A is viable (wrt a base set Z, default all taxa) when every taxon
  that has no prey inside A is a source of the web restricted to Z
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional

from .errors import DomainError, PreconditionError, checked_weight


class PhyloTree:
    """Rooted tree with positive integer edge weights; leaves are the taxa.

    ``strict=True`` additionally demands out-degree >= 2 for internal
    vertices (the phylogenetic X-tree shape).  Reduction rules and edge
    contractions can produce unary vertices, so algorithm-internal trees are
    built with ``strict=False``.
    """

    def __init__(self, root: str, parent: Mapping[str, str],
                 weight: Mapping[str, int], strict: bool = True):
        self.root = root
        self.parent = dict(parent)
        self.weight = {v: checked_weight(w) for v, w in weight.items()}
        if root in self.parent:
            raise DomainError("root must not have a parent")
        if set(self.parent) != set(self.weight):
            raise DomainError("parent and weight must cover the same vertices")
        children: dict[str, list[str]] = {root: []}
        for v, p in self.parent.items():
            children.setdefault(v, [])
            children.setdefault(p, []).append(v)
        if set(children) - set(self.parent) != {root}:
            raise DomainError("exactly the root may lack a parent")
        self.children = {v: tuple(sorted(cs)) for v, cs in children.items()}
        # check connectivity / acyclicity by walking down from the root
        seen = set()
        stack = [root]
        while stack:
            v = stack.pop()
            if v in seen:
                raise DomainError("tree contains a cycle")
            seen.add(v)
            stack.extend(self.children[v])
        if seen != set(children):
            raise DomainError("tree is not connected")
        for v, w in self.weight.items():
            if w < 1:
                raise DomainError(f"edge weight at {v!r} must be >= 1, got {w}")
        if strict:
            for v, cs in self.children.items():
                if cs and len(cs) < 2 and v != root:
                    raise DomainError(f"internal vertex {v!r} has out-degree 1")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def star(cls, weights: Mapping[str, int], root: str = "rho") -> "PhyloTree":
        if root in weights:
            raise DomainError("root name collides with a taxon")
        return cls(root, {x: root for x in weights}, dict(weights))

    @classmethod
    def from_edges(cls, root: str, edges: Iterable[tuple[str, str, int]],
                   strict: bool = True) -> "PhyloTree":
        parent, weight = {}, {}
        for u, v, w in edges:
            if v in parent:
                raise DomainError(f"vertex {v!r} has two parents")
            parent[v] = u
            weight[v] = w
        return cls(root, parent, weight, strict=strict)

    # -- derived structure ----------------------------------------------------

    @cached_property
    def vertices(self) -> frozenset[str]:
        return frozenset(self.children)

    @cached_property
    def taxa(self) -> frozenset[str]:
        return frozenset(v for v, cs in self.children.items()
                         if not cs and v != self.root)

    @cached_property
    def offspring_map(self) -> dict[str, frozenset[str]]:
        """Vertex -> taxa below it (a leaf maps to itself)."""
        off: dict[str, frozenset[str]] = {}
        for v in self.postorder():
            if not self.children[v]:
                off[v] = frozenset() if v == self.root else frozenset([v])
            else:
                acc: set[str] = set()
                for c in self.children[v]:
                    acc |= off[c]
                off[v] = frozenset(acc)
        return off

    def offspring(self, v: str) -> frozenset[str]:
        return self.offspring_map[v]

    def postorder(self) -> list[str]:
        out, stack = [], [(self.root, False)]
        while stack:
            v, done = stack.pop()
            if done:
                out.append(v)
            else:
                stack.append((v, True))
                for c in self.children[v]:
                    stack.append((c, False))
        return out

    def preorder(self) -> list[str]:
        out, stack = [], [self.root]
        while stack:
            v = stack.pop()
            out.append(v)
            for c in reversed(self.children[v]):
                stack.append(c)
        return out

    def edges(self) -> Iterator[tuple[str, str, int]]:
        """(parent, child, weight) in deterministic preorder."""
        for v in self.preorder():
            if v != self.root:
                yield self.parent[v], v, self.weight[v]

    @cached_property
    def total_weight(self) -> int:
        return sum(self.weight.values())

    @cached_property
    def max_weight(self) -> int:
        return max(self.weight.values(), default=0)

    @cached_property
    def height(self) -> int:
        depth = {self.root: 0}
        h = 0
        for v in self.preorder():
            if v != self.root:
                depth[v] = depth[self.parent[v]] + 1
                h = max(h, depth[v])
        return h

    def is_star(self) -> bool:
        return all(self.parent[x] == self.root for x in self.taxa)

    def root_path(self, v: str) -> list[str]:
        """Vertices from v up to (and including) the root."""
        path = [v]
        while path[-1] != self.root:
            path.append(self.parent[path[-1]])
        return path

    def __repr__(self) -> str:
        return f"PhyloTree(root={self.root!r}, n={len(self.taxa)})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, PhyloTree) and self.root == other.root
                and self.parent == other.parent and self.weight == other.weight)

    def __hash__(self) -> int:
        return hash((self.root, frozenset(self.parent.items()),
                     frozenset(self.weight.items())))


class FoodWeb:
    """DAG over the taxa; an arc x -> y means y feeds on x."""

    def __init__(self, taxa: Iterable[str], prey: Mapping[str, Iterable[str]]):
        self.taxa = frozenset(taxa)
        self.prey = {x: frozenset(prey.get(x, ())) for x in self.taxa}
        for x in prey:
            if x not in self.taxa:
                raise DomainError(f"prey map mentions unknown taxon {x!r}")
        pred: dict[str, set[str]] = {x: set() for x in self.taxa}
        for y, ps in self.prey.items():
            for x in ps:
                if x not in self.taxa:
                    raise DomainError(f"unknown prey {x!r} of {y!r}")
                if x == y:
                    raise DomainError(f"self-loop at {x!r}")
                pred[x].add(y)
        self.pred = {x: frozenset(s) for x, s in pred.items()}
        self.topological_order()  # raises on cycles

    @classmethod
    def from_arcs(cls, taxa: Iterable[str],
                  arcs: Iterable[tuple[str, str]]) -> "FoodWeb":
        prey: dict[str, set[str]] = {}
        for x, y in arcs:
            prey.setdefault(y, set()).add(x)
        return cls(taxa, prey)

    @cached_property
    def sources(self) -> frozenset[str]:
        return frozenset(x for x in self.taxa if not self.prey[x])

    def arcs(self) -> Iterator[tuple[str, str]]:
        for y in sorted(self.taxa):
            for x in sorted(self.prey[y]):
                yield x, y

    def num_arcs(self) -> int:
        return sum(len(p) for p in self.prey.values())

    def topological_order(self) -> list[str]:
        """Deterministic (lexicographic Kahn) prey-before-predator order."""
        import heapq
        indeg = {x: len(self.prey[x]) for x in self.taxa}
        heap = sorted(x for x in self.taxa if indeg[x] == 0)
        heapq.heapify(heap)
        out = []
        while heap:
            x = heapq.heappop(heap)
            out.append(x)
            for y in self.pred[x]:
                indeg[y] -= 1
                if indeg[y] == 0:
                    heapq.heappush(heap, y)
        if len(out) != len(self.taxa):
            raise DomainError("food web contains a cycle")
        return out

    def restrict(self, keep: Iterable[str]) -> "FoodWeb":
        keep = frozenset(keep)
        if not keep <= self.taxa:
            raise DomainError("restriction set contains unknown taxa")
        return FoodWeb(keep, {x: self.prey[x] & keep for x in keep})

    def underlying_adjacency(self) -> dict[str, frozenset[str]]:
        adj: dict[str, set[str]] = {x: set() for x in self.taxa}
        for x, y in self.arcs():
            adj[x].add(y)
            adj[y].add(x)
        return {x: frozenset(s) for x, s in adj.items()}

    def __eq__(self, other) -> bool:
        return (isinstance(other, FoodWeb) and self.taxa == other.taxa
                and self.prey == other.prey)

    def __hash__(self) -> int:
        return hash((self.taxa, frozenset(self.prey.items())))

    def __repr__(self) -> str:
        return f"FoodWeb(n={len(self.taxa)}, m={self.num_arcs()})"


@dataclass(frozen=True)
class Instance:
    tree: PhyloTree
    web: FoodWeb
    k: int
    D: int

    def __post_init__(self):
        if self.tree.taxa != self.web.taxa:
            raise DomainError("tree leaves and web vertices differ")
        if self.k < 0:
            raise DomainError("k must be non-negative")

    @property
    def n(self) -> int:
        return len(self.web.taxa)

    @property
    def kbar(self) -> int:
        return self.n - self.k

    @property
    def dbar(self) -> int:
        return self.tree.total_weight - self.D

    def with_params(self, k: Optional[int] = None,
                    D: Optional[int] = None) -> "Instance":
        return Instance(self.tree, self.web,
                        self.k if k is None else k,
                        self.D if D is None else D)


@dataclass(frozen=True)
class Solution:
    taxa: frozenset[str]
    value: int
    certificate: Optional[dict[str, str]] = field(default=None, compare=False)


def pd(tree: PhyloTree, taxa: Iterable[str]) -> int:
    """Total weight of edges with at least one offspring taxon in the set."""
    subset = frozenset(taxa)
    unknown = subset - tree.taxa
    if unknown:
        raise DomainError(f"unknown taxa {sorted(unknown)}")
    off = tree.offspring_map
    return sum(w for _, v, w in tree.edges() if off[v] & subset)


def is_viable(web: FoodWeb, taxa: Iterable[str],
              base: Optional[Iterable[str]] = None) -> bool:
    """Is every member either fed inside the set or a source of web[base]?"""
    subset = frozenset(taxa)
    if not subset <= web.taxa:
        raise DomainError("viability query mentions unknown taxa")
    if base is None:
        base_sources = web.sources
    else:
        base_set = frozenset(base)
        base_sources = frozenset(x for x in base_set
                                 if not web.prey[x] & base_set)
    for x in subset:
        if not web.prey[x] & subset and x not in base_sources:
            return False
    return True


def viability_certificate(web: FoodWeb,
                          taxa: Iterable[str]) -> Optional[dict[str, str]]:
    """Map each non-source member to a feeding prey inside the set, forming
    in-trees rooted at web sources; None when the set is not viable."""
    subset = frozenset(taxa)
    if not subset <= web.taxa:
        raise DomainError("certificate query mentions unknown taxa")
    reached = set(x for x in subset if x in web.sources)
    cert: dict[str, str] = {}
    frontier = sorted(reached)
    while frontier:
        nxt = []
        for x in frontier:
            for y in sorted(web.pred[x]):
                if y in subset and y not in reached:
                    reached.add(y)
                    cert[y] = x
                    nxt.append(y)
        frontier = nxt
    if reached != subset:
        return None
    return cert


def extend_to_size_k(tree: PhyloTree, web: FoodWeb,
                     taxa: Iterable[str], k: int) -> frozenset[str]:
    """Pad a viable set to size min(k, n), staying viable at every step.

    Tie-break: maximum marginal diversity gain, then smallest taxon name.
    """
    current = set(taxa)
    if len(current) > k:
        raise PreconditionError("set already larger than k")
    if not is_viable(web, current):
        raise PreconditionError("set is not viable")
    off = tree.offspring_map
    # incremental marginal gains: an edge pays out once, when first covered
    covered = set()
    for _, v, _ in tree.edges():
        if off[v] & current:
            covered.add(v)

    def gain(x: str) -> int:
        g = 0
        for v in tree.root_path(x)[:-1]:
            if v not in covered:
                g += tree.weight[v]
        return g

    while len(current) < min(k, len(web.taxa)):
        addable = set(web.sources) - current
        for x in current:
            addable |= web.pred[x] - current
        if not addable:
            break
        best = max(sorted(addable), key=lambda x: (gain(x), ),
                   default=None)
        # max() keeps the first maximum of the sorted candidates, i.e. the
        # smallest name among the top-gain taxa
        current.add(best)
        for v in tree.root_path(best)[:-1]:
            covered.add(v)
    return frozenset(current)


def spanning_subtree(tree: PhyloTree, vertices: Iterable[str]) -> PhyloTree:
    """Minimal subtree connecting the given vertices, weights preserved.

    The result is rooted at the topmost vertex of the union of paths; unary
    vertices are kept (strict=False).
    """
    targets = frozenset(vertices)
    if not targets:
        raise DomainError("spanning_subtree of the empty set")
    unknown = targets - tree.vertices
    if unknown:
        raise DomainError(f"unknown vertices {sorted(unknown)}")
    keep: set[str] = set()
    for v in targets:
        for u in tree.root_path(v):
            if u in keep:
                break
            keep.add(u)
    # trim the root-side chain that only leads to a single branch and is not
    # itself a target
    top = tree.root
    while top not in targets:
        kids = [c for c in tree.children[top] if c in keep]
        if len(kids) != 1:
            break
        keep.discard(top)
        top = kids[0]
    parent = {v: tree.parent[v] for v in keep if v != top}
    weight = {v: tree.weight[v] for v in keep if v != top}
    return PhyloTree(top, parent, weight, strict=False)
