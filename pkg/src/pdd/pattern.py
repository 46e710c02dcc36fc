"""Solver parameterized by k * tree-height, via colored pattern trees.

A candidate solution S is matched through the spanning tree of S + {rho}:
for a guessed coloring of the tree vertices and a guessed pattern tree, the
reduction rules cut the instance down until both the phylogenetic tree and
the pattern are stars, and the star solver finishes the job.

The tree and the food web deliberately fall out of sync during RR 5/6: only
tree vertices are deleted there, the web keeps all taxa so that viability is
unchanged.  RR 7 then removes exactly the web vertices that lost every
source path, which re-synchronizes the two without inventing new sources.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional

from .core import FoodWeb, Instance, PhyloTree, Solution, is_viable, pd, \
    viability_certificate
from .errors import BudgetExceededError, DomainError, PreconditionError
from .colorcoding import build_perfect_hash_family, solve_spdd_by_k

ENUM_BUDGET = 10 ** 6


@dataclass(frozen=True)
class PatternTree:
    root: str
    parent: dict[str, str]
    colors: dict[str, int]

    def __post_init__(self):
        if set(self.parent) | {self.root} != set(self.colors):
            raise DomainError("pattern coloring must be total")

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        kids: dict[str, list[str]] = {v: [] for v in self.colors}
        for v, p in self.parent.items():
            kids[p].append(v)
        return {v: tuple(sorted(c)) for v, c in kids.items()}

    @cached_property
    def color_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((self.colors[p], self.colors[v])
                         for v, p in self.parent.items())

    def is_star(self) -> bool:
        return all(p == self.root for p in self.parent.values())

    def without(self, gone: str, rehang_to: str) -> "PatternTree":
        parent = {v: (rehang_to if p == gone else p)
                  for v, p in self.parent.items() if v != gone}
        colors = {v: c for v, c in self.colors.items() if v != gone}
        return PatternTree(self.root, parent, colors)


@dataclass
class ReductionState:
    """Instance mid-reduction; tree taxa may be a subset of web taxa."""
    tree: Optional[PhyloTree]  # None encodes "no pattern-respecting solution"
    web: FoodWeb
    k: int
    D: int
    pattern: PatternTree
    coloring: dict[str, int]

    @classmethod
    def start(cls, inst: Instance, pattern: PatternTree,
              coloring: dict[str, int]) -> "ReductionState":
        if set(coloring) != set(inst.tree.vertices):
            raise PreconditionError("coloring must be total on tree vertices")
        return cls(inst.tree, inst.web, inst.k, inst.D, pattern, dict(coloring))

    @property
    def infeasible(self) -> bool:
        return self.tree is None


def _tree_without_taxa(tree: PhyloTree, doomed) -> PhyloTree:
    """Drop the given taxa and every internal vertex left without offspring."""
    keep_taxa = tree.taxa - frozenset(doomed)
    keep: set[str] = {tree.root}
    for x in keep_taxa:
        for v in tree.root_path(x):
            if v in keep:
                break
            keep.add(v)
    parent = {v: tree.parent[v] for v in keep if v != tree.root}
    weight = {v: tree.weight[v] for v in keep if v != tree.root}
    return PhyloTree(tree.root, parent, weight, strict=False)


def _trim_coloring(state: ReductionState) -> None:
    state.coloring = {v: c for v, c in state.coloring.items()
                      if v in state.tree.vertices}


def rr_pattern_edge_original(state: ReductionState) -> ReductionState:
    """RR: a tree edge whose color pair has no pattern counterpart cannot be
    spanned; drop the subtree below it."""
    if state.infeasible:
        return state
    while True:
        tree, c = state.tree, state.coloring
        doomed: set[str] = set()
        for u, v, _ in tree.edges():
            if (c[u], c[v]) not in state.pattern.color_pairs:
                doomed |= tree.offspring(v)
        if not doomed:
            return state
        state.tree = _tree_without_taxa(tree, doomed)
        _trim_coloring(state)


def rr_pattern_edge_required(state: ReductionState) -> ReductionState:
    """RR: a tree vertex carrying a pattern color must offer a child of each
    pattern-child color, else nothing below it can realize the pattern."""
    if state.infeasible:
        return state
    changed = True
    while changed and not state.infeasible:
        changed = False
        tree, c = state.tree, state.coloring
        pcolors = state.pattern.colors
        for v_p, u_p in sorted(state.pattern.parent.items()):
            a, b = pcolors[u_p], pcolors[v_p]
            for u in sorted(tree.vertices):
                if c[u] != a:
                    continue
                if any(c[ch] == b for ch in tree.children[u]):
                    continue
                if u == tree.root:
                    state.tree = None
                    return state
                state.tree = _tree_without_taxa(tree, tree.offspring(u))
                _trim_coloring(state)
                changed = True
                break
            if changed:
                break
    return state


def rr_restrict_food_web(state: ReductionState) -> ReductionState:
    """RR: drop web vertices whose every source path leaves the current tree
    leaf set; this re-syncs the web with the tree without minting sources."""
    if state.infeasible:
        return state
    while True:
        leaves = state.tree.taxa
        alive = {x for x in state.web.sources if x in leaves}
        frontier = sorted(alive)
        while frontier:
            nxt = []
            for x in frontier:
                for y in state.web.pred[x]:
                    if y in leaves and y not in alive:
                        alive.add(y)
                        nxt.append(y)
            frontier = sorted(nxt)
        if alive == state.web.taxa:
            return state
        state.web = state.web.restrict(alive)
        state.tree = _tree_without_taxa(state.tree, leaves - alive)
        _trim_coloring(state)
        if state.web.taxa == state.tree.taxa:
            return state


def rr_contract_internal(state: ReductionState) -> ReductionState:
    """RR: pick a grand-child v' of the pattern root with parent u'; every
    tree vertex matching u's color gets dissolved, its children re-hung onto
    the tree root.  The child matching v's color inherits the dissolved
    parent-edge weight, so pattern-respecting diversity is preserved."""
    if state.infeasible or state.pattern.is_star():
        return state
    pat = state.pattern
    u_p = next(v for v in sorted(pat.parent)
               if pat.parent[v] == pat.root and pat.children[v])
    v_p = pat.children[u_p][0]
    a, b = pat.colors[u_p], pat.colors[v_p]
    tree = state.tree
    matched = [u for u in sorted(tree.vertices)
               if state.coloring[u] == a and u != tree.root]
    parent = dict(tree.parent)
    weight = dict(tree.weight)
    for u in matched:
        w_up = weight[u]
        for ch in tree.children[u]:
            parent[ch] = tree.root
            if state.coloring[ch] == b:
                weight[ch] = weight[ch] + w_up
        del parent[u], weight[u]
    state.tree = PhyloTree(tree.root, parent, weight, strict=False)
    state.pattern = pat.without(u_p, pat.root)
    _trim_coloring(state)
    return state


def solve_pdd_pattern(inst: Instance, pattern: PatternTree,
                      coloring: dict[str, int], mode: str = "exact",
                      seed: int = 0, epsilon: float = 0.1
                      ) -> Optional[Solution]:
    """Reduce to a star instance under the pattern and finish with the
    star solver; any returned witness is re-verified against the input."""
    pat_colors = set(pattern.colors.values())
    if not pat_colors <= set(coloring.values()):
        return None
    if coloring[inst.tree.root] != pattern.colors[pattern.root]:
        return None
    if inst.D <= 0:
        return Solution(frozenset(), 0, {})
    if len(pattern.colors) == 1:
        return None  # only the empty set spans a single-vertex pattern
    state = ReductionState.start(inst, pattern, coloring)
    for _ in range(len(pattern.colors) + 2):
        state = rr_pattern_edge_original(state)
        state = rr_pattern_edge_required(state)
        state = rr_restrict_food_web(state)
        if state.infeasible:
            return None
        if state.pattern.is_star() and state.tree.is_star():
            break
        state = rr_contract_internal(state)
    if state.infeasible or not state.tree.taxa:
        return None
    if not (state.pattern.is_star() and state.tree.is_star()):
        raise PreconditionError("reduction failed to reach star form")
    reduced = Instance(state.tree, state.web, state.k, state.D)
    found = solve_spdd_by_k(reduced, mode=mode, seed=seed, epsilon=epsilon)
    if found is None:
        return None
    cand = found.taxa
    value = pd(inst.tree, cand)
    if (len(cand) <= inst.k and value >= inst.D
            and is_viable(inst.web, cand)):
        return Solution(cand, value, viability_certificate(inst.web, cand))
    return None


def unconstrained_max_pd(tree: PhyloTree, k: int) -> int:
    """Best diversity of any k taxa with viability ignored; greedy on
    marginal gains is exact for the pure budget problem."""
    covered: set[str] = set()
    chosen: set[str] = set()
    total = 0
    for _ in range(min(k, len(tree.taxa))):
        best, best_gain = None, -1
        for x in sorted(tree.taxa - chosen):
            gain = sum(tree.weight[v] for v in tree.root_path(x)[:-1]
                       if v not in covered)
            if gain > best_gain:
                best, best_gain = x, gain
        chosen.add(best)
        total += best_gain
        covered.update(tree.root_path(best)[:-1])
    return total


def enumerate_labeled_rooted_trees(i: int, budget: int = ENUM_BUDGET
                                   ) -> Iterator[PatternTree]:
    """All i^(i-1) labeled rooted trees on labels 1..i (colors = labels):
    Pruefer decoding of the unrooted trees crossed with every root choice."""
    if i < 1:
        raise PreconditionError("need i >= 1")
    if i ** max(i - 1, 0) > budget:
        raise BudgetExceededError(f"{i}^{i-1} trees exceed budget {budget}")
    if i == 1:
        yield PatternTree("p1", {}, {"p1": 1})
        return
    labels = list(range(1, i + 1))
    for seq in itertools.product(labels, repeat=i - 2):
        degree = {v: 1 for v in labels}
        for s in seq:
            degree[s] += 1
        ready = [v for v in labels if degree[v] == 1]
        heapq.heapify(ready)
        edges = []
        for s in seq:
            v = heapq.heappop(ready)
            edges.append((v, s))
            degree[s] -= 1
            if degree[s] == 1:
                heapq.heappush(ready, s)
        last = sorted(ready)
        edges.append((last[0], last[1]))
        adj: dict[int, list[int]] = {v: [] for v in labels}
        for x, y in edges:
            adj[x].append(y)
            adj[y].append(x)
        for root in labels:
            parent: dict[str, str] = {}
            stack = [root]
            seen = {root}
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        parent[f"p{y}"] = f"p{x}"
                        stack.append(y)
            colors = {f"p{v}": v for v in labels}
            yield PatternTree(f"p{root}", parent, colors)


def solve_pdd_by_k_height(inst: Instance, mode: str = "exact", seed: int = 0,
                          epsilon: float = 0.1,
                          budget: int = ENUM_BUDGET) -> Optional[Solution]:
    """Driver: guess the spanning-tree size i, a coloring of the tree
    vertices, and a pattern; prune pairs whose pattern color pairs cannot
    all occur, then run the pattern solver."""
    if inst.D <= 0:
        return Solution(frozenset(), 0, {})
    if unconstrained_max_pd(inst.tree, inst.k) < inst.D:
        return None  # even ignoring viability no k taxa reach D
    # the spanning tree of S + {rho} has at most k*height + 1 vertices
    # (the root is shared among the k root paths)
    K = inst.k * inst.tree.height + 1
    vertices = sorted(inst.tree.vertices)
    upper = min(K, len(vertices))
    for i in range(2, upper + 1):
        patterns = list(enumerate_labeled_rooted_trees(i, budget))
        family = build_perfect_hash_family(len(vertices), i, mode=mode,
                                           seed=seed + i, epsilon=epsilon)
        for f in family.functions:
            coloring = {v: f[j] for j, v in enumerate(vertices)}
            tree_pairs = {(coloring[u], coloring[v])
                          for u, v, _ in inst.tree.edges()}
            root_color = coloring[inst.tree.root]
            for pat in patterns:
                if pat.colors[pat.root] != root_color:
                    continue
                if not pat.color_pairs <= tree_pairs:
                    continue
                found = solve_pdd_pattern(inst, pat, coloring, mode=mode,
                                          seed=seed, epsilon=epsilon)
                if found is not None:
                    return found
    return None
