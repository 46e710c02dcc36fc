"""Color-coding machinery and the star-tree solver parameterized by k.

Hash families map taxa positions to colors so that any small solution is
colorful under at least one member; the colored dynamic program then finds
the best colorful viable set in a single pass over the web.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .core import Instance, Solution, is_viable, pd, viability_certificate
from .errors import BudgetExceededError, PreconditionError
from .preprocess import single_source_transform

VERIFY_BUDGET = 10 ** 6


@dataclass(frozen=True)
class HashFamily:
    n: int
    k: int
    functions: tuple[tuple[int, ...], ...]  # each maps position j to a color
    exact: bool
    epsilon: float = 0.0


@dataclass(frozen=True)
class UniversalSet:
    n: int
    k: int
    subsets: tuple[int, ...]  # bitmasks over positions 0..n-1
    exact: bool
    epsilon: float = 0.0


def build_perfect_hash_family(n: int, k: int, mode: str = "exact",
                              seed: int = 0, epsilon: float = 0.1,
                              budget: int = VERIFY_BUDGET) -> HashFamily:
    """(n, k)-family: every k-subset of positions is rainbow-colored by some
    member.  Exact mode certifies this by enumeration; monte-carlo mode draws
    ceil(e^k * k * ln(1/eps)) uniform colorings (one-sided failure <= eps)."""
    if not 1 <= k <= n:
        raise PreconditionError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = random.Random(seed)
    if mode == "monte-carlo":
        trials = math.ceil(math.exp(k) * k * math.log(1 / epsilon))
        fns = tuple(tuple(rng.randrange(1, k + 1) for _ in range(n))
                    for _ in range(trials))
        return HashFamily(n, k, fns, exact=False, epsilon=epsilon)
    if mode != "exact":
        raise PreconditionError(f"unknown mode {mode!r}")
    if math.comb(n, k) > budget:
        raise BudgetExceededError(
            f"C({n},{k}) exceeds exactness verification budget {budget}")
    uncovered = set(combinations(range(n), k))
    fns: list[tuple[int, ...]] = []
    while uncovered:
        target = min(uncovered)
        f = [rng.randrange(1, k + 1) for _ in range(n)]
        for color, j in enumerate(target, start=1):
            f[j] = color
        f = tuple(f)
        newly = {s for s in uncovered if len({f[j] for j in s}) == k}
        uncovered -= newly
        fns.append(f)
    return HashFamily(n, k, tuple(fns), exact=True)


def build_universal_set(n: int, k: int, mode: str = "exact", seed: int = 0,
                        epsilon: float = 0.1,
                        budget: int = VERIFY_BUDGET) -> UniversalSet:
    """(n, k)-universal family: for every k-subset S of positions, the traces
    A cap S realize all 2^k subsets of S."""
    if not 0 <= k <= n:
        raise PreconditionError(f"need 0 <= k <= n, got k={k}, n={n}")
    if k == 0:
        return UniversalSet(n, 0, (0,), exact=(mode == "exact"),
                            epsilon=0.0 if mode == "exact" else epsilon)
    rng = random.Random(seed)
    if mode == "monte-carlo":
        trials = math.ceil((2 ** k) * math.log(1 / epsilon)) + 1
        subs = tuple(rng.getrandbits(n) for _ in range(trials))
        return UniversalSet(n, k, subs, exact=False, epsilon=epsilon)
    if mode != "exact":
        raise PreconditionError(f"unknown mode {mode!r}")
    if math.comb(n, k) * (2 ** k) > budget:
        raise BudgetExceededError(
            f"C({n},{k})*2^{k} exceeds verification budget {budget}")
    uncovered = {(s, t) for s in combinations(range(n), k)
                 for t in range(2 ** k)}
    subs: list[int] = []
    while uncovered:
        s, t = min(uncovered)
        a = rng.getrandbits(n)
        for bit, j in enumerate(s):
            if t >> bit & 1:
                a |= 1 << j
            else:
                a &= ~(1 << j)
        newly = set()
        for s2, t2 in uncovered:
            trace = 0
            for bit, j in enumerate(s2):
                if a >> j & 1:
                    trace |= 1 << bit
            if trace == t2:
                newly.add((s2, t2))
        uncovered -= newly
        subs.append(a)
    return UniversalSet(n, k, tuple(subs), exact=True)


# -- the k-colored star dynamic program --------------------------------------


def _check_star_single_source(inst: Instance) -> str:
    if not inst.tree.is_star():
        raise PreconditionError("tree must be a star")
    sources = sorted(inst.web.sources)
    if len(sources) != 1:
        raise PreconditionError(f"web must have one source, has {len(sources)}")
    return sources[0]


def k_colored_tables(inst: Instance, coloring: dict[str, int]
                     ) -> dict[str, dict[int, tuple[int, frozenset[str]]]]:
    """Per taxon x: color-mask -> (best PD, witness) over viable sets inside
    the part of the web reachable from x, using each color exactly once.

    Every nonempty viable set there contains x, so entries carry x's own
    star-edge weight; the empty set (value 0) is implicit.
    """
    _check_star_single_source(inst)
    tables: dict[str, dict[int, tuple[int, frozenset[str]]]] = {}
    order = inst.web.topological_order()
    for x in reversed(order):
        cmask = 1 << (coloring[x] - 1)
        cur = {cmask: (inst.tree.weight[x], frozenset([x]))}
        for y in sorted(inst.web.pred[x]):
            table_y = tables[y]
            new = dict(cur)
            for m1, (v1, s1) in cur.items():
                for m2, (v2, s2) in table_y.items():
                    if m1 & m2:
                        continue
                    m = m1 | m2
                    v = v1 + v2
                    if m not in new or new[m][0] < v:
                        new[m] = (v, s1 | s2)
            cur = new
        tables[x] = cur
    return tables


def solve_k_colored_spdd(inst: Instance, coloring: dict[str, int]
                         ) -> Optional[tuple[int, frozenset[str]]]:
    """Best diversity over nonempty colorful viable sets of a single-source
    star instance, with a witness."""
    source = _check_star_single_source(inst)
    table = k_colored_tables(inst, coloring)[source]
    if not table:
        return None
    return max(table.values(), key=lambda e: (e[0], ))


def solve_spdd_by_k(inst: Instance, mode: str = "exact", seed: int = 0,
                    epsilon: float = 0.1,
                    budget: int = VERIFY_BUDGET) -> Optional[Solution]:
    """Star-tree solver: single-source transform, then one colored DP run per
    hash-family member.  The added source keeps a reserved color k+1."""
    if not inst.tree.is_star():
        raise PreconditionError("tree must be a star")
    if inst.D <= 0:
        return Solution(frozenset(), 0, {})
    k = min(inst.k, inst.n)
    if k == 0:
        return None
    transformed, star = single_source_transform(inst.with_params(k=k))
    taxa = sorted(inst.web.taxa)
    family = build_perfect_hash_family(len(taxa), k, mode=mode, seed=seed,
                                       epsilon=epsilon, budget=budget)
    for f in family.functions:
        coloring = {x: f[j] for j, x in enumerate(taxa)}
        coloring[star] = k + 1
        best = solve_k_colored_spdd(transformed, coloring)
        if best is None or best[0] < transformed.D:
            continue
        witness = best[1] - {star}
        value = pd(inst.tree, witness)
        if (len(witness) <= inst.k and value >= inst.D
                and is_viable(inst.web, witness)):
            return Solution(witness, value,
                            viability_certificate(inst.web, witness))
    return None
