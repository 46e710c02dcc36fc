"""Exhaustive reference solvers.

These are the ground truth the clever solvers are tested against.  They
enumerate candidate sets on the cheaper of the two sides (choose-k versus
choose-(n-k) removals) and refuse to run past an explicit subset budget.
"""

from __future__ import annotations

import itertools
from math import comb
from typing import Iterator, Optional

from .core import (FoodWeb, Instance, Solution, is_viable, pd,
                   viability_certificate)
from .errors import BudgetExceededError, DomainError

DEFAULT_BUDGET = 10_000_000


def enumerate_viable_sets(web: FoodWeb, size: int,
                          budget: int = DEFAULT_BUDGET
                          ) -> Iterator[frozenset[str]]:
    """All viable sets of exactly the given size, lexicographically.

    Backtracking over name-sorted taxa; a branch dies as soon as some chosen
    non-source taxon can no longer receive prey (all its prey precede the
    extension frontier and none was chosen).
    """
    if size < 0:
        raise DomainError("size must be non-negative")
    taxa = sorted(web.taxa)
    n = len(taxa)
    if size > n:
        return
    if comb(n, size) > budget:
        raise BudgetExceededError(
            f"C({n},{size}) exceeds enumeration budget {budget}")
    if size == 0:
        yield frozenset()
        return
    sources = web.sources
    chosen: list[str] = []

    def fixable(last: str) -> bool:
        # every chosen taxon must be a source, fed by a chosen prey, or
        # still reachable by a prey that sorts after the frontier
        cs = set(chosen)
        for x in chosen:
            if x in sources or web.prey[x] & cs:
                continue
            if not any(p > last for p in web.prey[x]):
                return False
        return True

    def rec(start: int) -> Iterator[frozenset[str]]:
        if len(chosen) == size:
            cand = frozenset(chosen)
            if is_viable(web, cand):
                yield cand
            return
        # not enough taxa left to finish
        for i in range(start, n - (size - len(chosen)) + 1):
            chosen.append(taxa[i])
            if fixable(taxa[i]):
                yield from rec(i + 1)
            chosen.pop()

    yield from rec(0)


def _complement_viable_sets(web: FoodWeb, remove: int,
                            budget: int) -> Iterator[frozenset[str]]:
    taxa = sorted(web.taxa)
    if comb(len(taxa), remove) > budget:
        raise BudgetExceededError(
            f"C({len(taxa)},{remove}) exceeds enumeration budget {budget}")
    full = frozenset(taxa)
    for gone in itertools.combinations(taxa, remove):
        cand = full - frozenset(gone)
        if is_viable(web, cand):
            yield cand


def _candidates(inst: Instance, budget: int) -> Iterator[frozenset[str]]:
    size = min(inst.k, inst.n)
    if comb(inst.n, size) <= comb(inst.n, inst.n - size):
        return enumerate_viable_sets(inst.web, size, budget)
    return _complement_viable_sets(inst.web, inst.n - size, budget)


def brute_force_optimum(inst: Instance,
                        budget: int = DEFAULT_BUDGET) -> Solution:
    """Maximum diversity over viable sets of size at most k.

    The maximum is attained at size exactly min(k, n): any smaller viable set
    extends by a source or a predator of a member without losing diversity.
    """
    best: Optional[frozenset[str]] = None
    best_val = -1
    for cand in _candidates(inst, budget):
        val = pd(inst.tree, cand)
        if val > best_val:
            best, best_val = cand, val
    if best is None:  # only possible when k == 0
        best, best_val = frozenset(), 0
    return Solution(best, best_val, viability_certificate(inst.web, best))


def brute_force_decide(inst: Instance,
                       budget: int = DEFAULT_BUDGET) -> Optional[Solution]:
    """First viable set with diversity >= D, or None."""
    if inst.D <= 0:
        return Solution(frozenset(), 0, {})
    for cand in _candidates(inst, budget):
        val = pd(inst.tree, cand)
        if val >= inst.D:
            return Solution(cand, val, viability_certificate(inst.web, cand))
    return None


def branch_and_bound_decide(inst: Instance,
                            node_budget: int = 50_000_000
                            ) -> Optional[Solution]:
    """Complete include/exclude search with admissible pruning.

    Same answer as brute_force_decide, but prunes branches whose optimistic
    diversity bound falls below D or whose chosen taxa can no longer be fed.
    Taxa are branched heaviest-root-path first so the bound bites early.
    """
    if inst.D <= 0:
        return Solution(frozenset(), 0, {})
    tree, web = inst.tree, inst.web
    size = min(inst.k, inst.n)
    if size == 0:
        return None
    # static per-taxon root-path weight, an upper bound on its solo gain
    path_w = {}
    for x in tree.taxa:
        path_w[x] = sum(tree.weight[v] for v in tree.root_path(x)
                        if v != tree.root)
    order = sorted(tree.taxa, key=lambda x: (-path_w[x], x))
    sources = web.sources
    edges = [v for v in tree.vertices if v != tree.root]
    off = tree.offspring_map
    cover = {v: 0 for v in edges}  # chosen offspring count per edge
    value = 0
    chosen: list[str] = []
    nodes = 0

    def gain(x):
        return sum(tree.weight[v] for v in tree.root_path(x)
                   if v != tree.root and not cover[v])

    def rec(i):
        nonlocal value, nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceededError("search node budget exhausted")
        if value >= inst.D and is_viable(web, chosen):
            return frozenset(chosen)
        slots = size - len(chosen)
        if slots == 0 or i == len(order):
            return None
        rest = set(order[i:])
        # every chosen non-source needs a chosen or still-available prey; a
        # single remaining candidate prey is a forced future pick
        cs = set(chosen)
        forced: set[str] = set()
        for x in chosen:
            if x in sources or web.prey[x] & cs:
                continue
            avail = web.prey[x] & rest
            if not avail:
                return None
            if len(avail) == 1:
                forced |= avail
        if len(forced) > slots:
            return None
        free = sorted((gain(x) for x in rest - forced),
                      reverse=True)[:slots - len(forced)]
        if value + sum(gain(f) for f in forced) + sum(free) < inst.D:
            return None
        x = order[i]
        # include x
        chosen.append(x)
        delta = []
        for v in tree.root_path(x):
            if v != tree.root:
                if not cover[v]:
                    delta.append(v)
                cover[v] += 1
        value += sum(tree.weight[v] for v in delta)
        found = rec(i + 1)
        value -= sum(tree.weight[v] for v in delta)
        for v in tree.root_path(x):
            if v != tree.root:
                cover[v] -= 1
        chosen.pop()
        if found is not None:
            return found
        # exclude x
        return rec(i + 1)

    hit = rec(0)
    if hit is None:
        return None
    return Solution(hit, pd(tree, hit), viability_certificate(web, hit))
