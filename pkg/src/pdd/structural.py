"""Solvers parameterized by food-web structure.

Four families: cluster-modulator DP, co-cluster reduction to hitting
set with tree profits, treewidth DP over a nice decomposition, and the
out-forest solver driven by the number of extinctions.  The flow-based
solver lives in `flow` and is re-exported here.
"""

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (Instance, PhyloTree, FoodWeb, Solution, pd, is_viable,
                   spanning_subtree)
from .colorcoding import build_universal_set
from .decomposition import NiceTreeDecomposition, build_nice_tree_decomposition
from .errors import (DomainError, PreconditionError, BudgetExceededError)
from .flow import (FlowNetwork, min_cost_flow, is_source_separating,
                   solve_pdd_source_separating_flow)
from .preprocess import remove_taxa

NEG = -(1 << 60)


# ---------------------------------------------------------------------------
# graph-class checks and modulators

def is_cluster_graph(adj):
    """True when every connected component is a clique (no induced P3)."""
    seen = set()
    for r in adj:
        if r in seen:
            continue
        comp = {r}
        stack = [r]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        for u in comp:
            if len(set(adj[u]) & comp) != len(comp) - 1:
                return False
    return True


def complement_adjacency(adj):
    verts = sorted(adj)
    return {u: {w for w in verts if w != u and w not in adj[u]} for u in verts}


def is_cocluster_graph(adj):
    """True when the complement is a cluster graph (complete multipartite)."""
    return is_cluster_graph(complement_adjacency(adj))


def _components(adj, subset=None):
    verts = sorted(adj) if subset is None else sorted(subset)
    vs = set(verts)
    seen = set()
    comps = []
    for r in verts:
        if r in seen:
            continue
        comp = {r}
        stack = [r]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in vs and w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(frozenset(comp))
    return comps


@dataclass(frozen=True)
class Modulator:
    """Deletion set whose removal leaves the web in the declared class."""
    y: frozenset
    target: str  # "cluster" | "co-cluster"
    witness: tuple  # cliques (cluster) or independent classes (co-cluster)

    def __post_init__(self):
        if self.target not in ("cluster", "co-cluster"):
            raise DomainError(f"unknown modulator target {self.target!r}")


def _find_p3(adj, subset):
    """First induced path a-b-c (edges ab, bc, non-edge ac), or None."""
    verts = sorted(subset)
    vs = set(verts)
    for b in verts:
        nb = sorted(set(adj[b]) & vs)
        for i in range(len(nb)):
            for j in range(i + 1, len(nb)):
                a, c = nb[i], nb[j]
                if c not in adj[a]:
                    return (a, b, c)
    return None


def find_modulator(web_or_adj, target, d_max):
    """Smallest deletion set (size <= d_max) into the target class.

    Bounded 3-way branching on an offending induced path; iterative
    deepening gives a minimum-size witness.  Returns None when no set
    within the budget exists.
    """
    if hasattr(web_or_adj, "underlying_adjacency"):
        adj = {u: set(s) for u, s in web_or_adj.underlying_adjacency().items()}
    else:
        adj = {u: set(s) for u, s in web_or_adj.items()}
    if target == "co-cluster":
        work = complement_adjacency(adj)
    elif target == "cluster":
        work = adj
    else:
        raise DomainError(f"unknown modulator target {target!r}")
    all_v = frozenset(work)

    def branch(subset, budget):
        p3 = _find_p3(work, subset)
        if p3 is None:
            return frozenset()
        if budget == 0:
            return None
        for v in p3:
            got = branch(subset - {v}, budget - 1)
            if got is not None:
                return got | {v}
        return None

    for d in range(max(d_max, 0) + 1):
        y = branch(all_v, d)
        if y is not None:
            rest = all_v - y
            if target == "cluster":
                witness = tuple(sorted(_components(adj, rest)))
            else:
                witness = tuple(sorted(_components(complement_adjacency(adj), rest)))
            return Modulator(frozenset(y), target, witness)
    return None


def _check_modulator(inst, y, target):
    rest = {x: set(s) - set(y) for x, s in
            inst.web.underlying_adjacency().items() if x not in y}
    ok = is_cluster_graph(rest) if target == "cluster" else is_cocluster_graph(rest)
    if not ok:
        raise PreconditionError(f"deletion set is not a {target} modulator")
    return rest


# ---------------------------------------------------------------------------
# cluster modulator solver

def _viability_prune(inst, forbidden):
    """Remove every taxon unreachable from the sources once `forbidden`
    taxa are unavailable.  Returns the reduced instance or None when a
    forbidden-free survivor set cannot include some required taxon."""
    web = inst.web
    alive = set()
    frontier = [x for x in sorted(web.taxa)
                if x not in forbidden and not web.prey[x]]
    alive.update(frontier)
    while frontier:
        nxt = []
        for x in frontier:
            for y in web.pred[x]:
                if y not in alive and y not in forbidden:
                    alive.add(y)
                    nxt.append(y)
        frontier = nxt
    removed = web.taxa - alive
    if not removed:
        return inst
    return remove_taxa(inst, removed)


def solve_spdd_cluster_fixed_Z(inst, y, z):
    """Best (PD, witness) over viable S with S & Y = Z and Z fully saved.

    Star tree; the web minus Y must be a cluster graph.  Returns None
    when no such S exists within the size bound.
    """
    if not inst.tree.is_star():
        raise PreconditionError("cluster solver needs a star tree")
    y = frozenset(y)
    z = frozenset(z)
    if not z <= y:
        raise DomainError("Z must be a subset of Y")
    _check_modulator(inst, y, "cluster")
    if len(z) > inst.k:
        return None
    sub = _viability_prune(inst, y - z)
    if sub is None or not z <= sub.web.taxa:
        return None
    web = sub.web
    tree = sub.tree
    # Z members are all saved; one fed by another inside Z needs nothing
    # more, likewise sources.  The rest must get a selected prey.
    def self_ok(q):
        return not web.prey[q] or (web.prey[q] & z)
    needy = frozenset(q for q in z if not self_ok(q))
    outside = sorted(web.taxa - y)
    comps = _components({x: set(web.underlying_adjacency()[x]) - y
                         for x in outside})
    budget = min(inst.k - len(z), len(outside))
    # per-component tables: (size used, fed Z-members) -> (value, witness)
    def component_table(comp):
        # acyclic tournament on a clique is transitive; sort topologically
        order = [x for x in web.topological_order() if x in comp]
        table = {(0, frozenset()): (0, frozenset())}
        for x in order:
            ext = not web.prey[x] or (web.prey[x] & z)
            w = tree.weight[x]
            fed = web.pred[x] & needy
            items = list(table.items())
            for (used, zf), (val, wit) in items:
                if used >= budget:
                    continue
                if used == 0 and not ext:
                    continue  # first pick must be a source or fed by Z
                key = (used + 1, zf | fed)
                cand = (val + w, wit | {x})
                if key not in table or table[key][0] < cand[0]:
                    table[key] = cand
        return table

    total = {(0, frozenset()): (0, frozenset())}
    for comp in comps:
        ct = component_table(comp)
        merged = {}
        for (u1, f1), (v1, w1) in total.items():
            for (u2, f2), (v2, w2) in ct.items():
                if u1 + u2 > budget:
                    continue
                key = (u1 + u2, f1 | f2)
                cand = (v1 + v2, w1 | w2)
                if key not in merged or merged[key][0] < cand[0]:
                    merged[key] = cand
        total = merged
    base = sum(tree.weight[q] for q in z)
    best = None
    for (used, zf), (val, wit) in total.items():
        if needy <= zf:
            cand = (base + val, z | wit)
            if best is None or cand[0] > best[0]:
                best = cand
    if best is None:
        return None
    value, taxa = best
    if not is_viable(inst.web, taxa):
        raise DomainError("internal error: cluster witness not viable")
    return value, frozenset(taxa)


def solve_spdd_by_cluster_modulator(inst, y):
    """Decide the instance by iterating saved subsets Z of the modulator."""
    if not inst.tree.is_star():
        raise PreconditionError("cluster solver needs a star tree")
    y = frozenset(y)
    _check_modulator(inst, y, "cluster")
    if inst.D <= 0:
        return Solution(frozenset(), 0, {"method": "cluster", "trivial": True})
    ys = sorted(y)
    for r in range(len(ys) + 1):
        for zt in itertools.combinations(ys, r):
            z = frozenset(zt)
            got = solve_spdd_cluster_fixed_Z(inst, y, z)
            if got is not None and got[0] >= inst.D:
                value, taxa = got
                return Solution(taxa, pd(inst.tree, taxa),
                                {"method": "cluster", "z": ",".join(sorted(z))})
    return None


# ---------------------------------------------------------------------------
# hitting set with tree profits

@dataclass(frozen=True)
class HittingSetTreeProfitsInstance:
    universe: frozenset
    family: tuple  # frozensets, each nonempty subset of the universe
    tree: PhyloTree
    k: int
    D: int

    def __post_init__(self):
        if not self.universe <= self.tree.taxa:
            raise DomainError("universe must be a subset of the tree's taxa")
        for w in self.family:
            if not w or not frozenset(w) <= self.universe:
                raise DomainError("family members must be nonempty universe subsets")


def solve_hitting_set_tree_profits(hs, budget=3 ** 20):
    """Find S within the universe, |S| <= k, PD(S) >= D, S hitting every
    family member; returns the witness frozenset or None."""
    m = len(hs.family)
    if 3 ** m * max(len(hs.tree.vertices), 1) > budget:
        raise BudgetExceededError("hitting-set family too large")
    if hs.k < 0:
        return None
    full = (1 << m) - 1
    member_mask = {}
    for u in hs.universe:
        mask = 0
        for i, w in enumerate(hs.family):
            if u in w:
                mask |= 1 << i
        member_mask[u] = mask
    tree = hs.tree
    kcap = min(hs.k, len(hs.universe))

    # state per vertex: (count, nonempty flag, hit mask) -> (value, witness);
    # value counts edges strictly below the vertex
    def table_of(v):
        kids = tree.children.get(v, ())
        if not kids:
            t = {(0, 0, 0): (0, frozenset())}
            if v in hs.universe and kcap >= 1:
                t[(1, 1, member_mask[v])] = (0, frozenset((v,)))
            return t
        acc = {(0, 0, 0): (0, frozenset())}
        for c in kids:
            tc = table_of(c)
            wc = tree.weight[c]
            merged = {}
            for (n1, b1, m1), (v1, s1) in acc.items():
                for (n2, b2, m2), (v2, s2) in tc.items():
                    if n1 + n2 > kcap:
                        continue
                    key = (n1 + n2, b1 | b2, m1 | m2)
                    cand = (v1 + v2 + (wc if b2 else 0), s1 | s2)
                    if key not in merged or merged[key][0] < cand[0]:
                        merged[key] = cand
            acc = merged
        return acc

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 2 * len(tree.vertices) + 100))
    try:
        top = table_of(tree.root)
    finally:
        sys.setrecursionlimit(old)
    best = None
    for (cnt, b, mask), (val, wit) in top.items():
        if mask == full and val >= hs.D:
            if best is None or val > best[0]:
                best = (val, wit)
    if best is None:
        return None
    return best[1]


# ---------------------------------------------------------------------------
# co-cluster modulator solver

def contract_tree_into_root(tree, saved):
    """Contract every edge whose offspring meet `saved` into the root.

    Surviving subtrees keep their weights; the result's taxa are exactly
    the original taxa minus `saved`, and for any S disjoint from saved,
    PD'(S) = PD(S | saved) - PD(saved).
    """
    saved = frozenset(saved)
    off = tree.offspring_map
    parent = {}
    weight = {}
    for child, par in tree.parent.items():
        if off[child] & saved:
            continue  # this edge is contracted away
        new_par = par
        while new_par != tree.root and (off[new_par] & saved):
            new_par = tree.parent[new_par]
        parent[child] = new_par
        weight[child] = tree.weight[child]
    return PhyloTree(tree.root, parent, weight, strict=False)


def solve_pdd_by_cocluster_modulator(inst, y):
    """Decide the instance given a co-cluster modulator Y."""
    y = frozenset(y)
    _check_modulator(inst, y, "co-cluster")
    web = inst.web
    tree = inst.tree
    if inst.D <= 0:
        return Solution(frozenset(), 0, {"method": "co-cluster", "trivial": True})
    rest = sorted(web.taxa - y)
    comp_adj = complement_adjacency(
        {x: set(web.underlying_adjacency()[x]) - y for x in rest})
    classes = _components(comp_adj) if rest else []
    class_of = {}
    for cl in classes:
        for x in cl:
            class_of[x] = cl
    order = web.topological_order()
    pos = {x: i for i, x in enumerate(order)}

    def finish(taxa):
        taxa = frozenset(taxa)
        if len(taxa) <= inst.k and is_viable(web, taxa):
            val = pd(tree, taxa)
            if val >= inst.D:
                return Solution(taxa, val, {"method": "co-cluster"})
        return None

    ys = sorted(y)
    for r in range(len(ys) + 1):
        for zt in itertools.combinations(ys, r):
            z = frozenset(zt)
            if len(z) > inst.k:
                continue
            pdz = pd(tree, z) if z else 0

            def self_ok(q):
                return not web.prey[q] or (web.prey[q] & z)

            needy = [q for q in sorted(z) if not self_ok(q)]
            # survivors exactly Z
            if not needy:
                got = finish(z)
                if got is not None:
                    return got
            # survivors within Z and a single class I
            for cl in classes:
                universe = frozenset(x for x in cl
                                     if not web.prey[x] or (web.prey[x] & z))
                if not universe:
                    continue
                fam = []
                feasible = True
                for q in needy:
                    w = web.prey[q] & universe
                    if not w:
                        feasible = False
                        break
                    fam.append(w)
                if not feasible:
                    continue
                ctree = contract_tree_into_root(tree, z) if z else tree
                hs = HittingSetTreeProfitsInstance(
                    universe, tuple(fam), ctree, inst.k - len(z),
                    inst.D - pdz)
                wit = solve_hitting_set_tree_profits(hs)
                if wit is not None:
                    got = finish(z | wit)
                    if got is not None:
                        return got
            # general case: first survivor x_i, first survivor x_j outside
            # x_i's class; everyone later is fed by one of them
            if inst.k - len(z) < 2:
                continue
            starters = [x for x in rest
                        if not web.prey[x] or (web.prey[x] & z)]
            for xi in starters:
                cli = class_of[xi]
                for xj in rest:
                    if pos[xj] <= pos[xi] or xj in cli:
                        continue
                    base = z | {xi, xj}
                    pdb = pd(tree, base)
                    mid = frozenset(
                        x for x in cli
                        if pos[xi] < pos[x] < pos[xj]
                        and (not web.prey[x] or (web.prey[x] & z)))
                    late = frozenset(x for x in rest if pos[x] > pos[xj])
                    universe = mid | late
                    fam = []
                    feasible = True
                    for q in needy:
                        if web.prey[q] & {xi, xj}:
                            continue
                        w = web.prey[q] & universe
                        if not w:
                            feasible = False
                            break
                        fam.append(w)
                    if not feasible:
                        continue
                    ctree = contract_tree_into_root(tree, base)
                    hs = HittingSetTreeProfitsInstance(
                        universe & ctree.taxa, tuple(fam), ctree,
                        inst.k - len(z) - 2, inst.D - pdb)
                    try:
                        wit = solve_hitting_set_tree_profits(hs)
                    except DomainError:
                        continue
                    if wit is not None:
                        got = finish(base | wit)
                        if got is not None:
                            return got
    return None


# ---------------------------------------------------------------------------
# treewidth solver (star tree)

def qualified_join_color(c1, c2):
    """Combined state of a bag vertex across the two join branches:
    green wins, then red, then black."""
    for c in (c1, c2):
        if c not in ("R", "G", "B"):
            raise DomainError(f"unknown color {c!r}")
    if "G" in (c1, c2):
        return "G"
    if "R" in (c1, c2):
        return "R"
    return "B"


def _tw_tables(inst, dec, kcap, want_tables=False):
    """Bottom-up DP over the nice decomposition.

    Per node: dict (R frozenset, G frozenset) -> numpy vector over the
    number of saved taxa so far (index s), holding max total weight.
    Red = saved but neither a source nor fed by anything saved yet;
    green = saved and justified; rest of the bag unsaved.
    """
    web = inst.web
    w = inst.tree.weight
    tabs = {}
    keep = {} if want_tables else None
    for t in dec.postorder():
        kind = dec.kind[t]
        kids = dec.children[t]
        if kind == "leaf":
            vec = np.full(1, NEG, dtype=np.int64)
            vec[0] = 0
            cur = {(frozenset(), frozenset()): vec}
        elif kind == "introduce":
            v = dec.vertex[t]
            child = tabs[kids[0]]
            is_src = not web.prey[v]
            preds_v = web.pred[v]
            prey_v = web.prey[v]
            cur = {}
            for (rc, gc), vec in child.items():
                # v unsaved: copy
                _tw_put(cur, (rc, gc), vec, 0)
                # v saved: bag predators of v become justified by it, and v
                # itself is green exactly when a source or fed by the bag
                moved = preds_v & rc
                justified = is_src or bool(prey_v & (rc | gc))
                if justified:
                    key = (rc - moved, gc | moved | {v})
                else:
                    key = ((rc - moved) | {v}, gc | moved)
                _tw_put(cur, key, vec, w[v], shift=1, cap=kcap)
        elif kind == "forget":
            v = dec.vertex[t]
            child = tabs[kids[0]]
            cur = {}
            for (r, g), vec in child.items():
                if v in r:
                    continue  # forgetting an unjustified saved vertex
                key = (r, g - {v})
                _tw_put(cur, key, vec, 0)
        else:  # join
            left = tabs[kids[0]]
            right = tabs[kids[1]]
            cur = {}
            for (r1, g1), v1 in left.items():
                sel = r1 | g1
                selw = sum(w[x] for x in sel)
                for (r2, g2), v2 in right.items():
                    if r2 | g2 != sel:
                        continue
                    key = (r1 & r2, g1 | g2)
                    merged = _maxplus(v1, v2, len(sel), selw, kcap)
                    _tw_put(cur, key, merged, 0)
        tabs[t] = cur
        if want_tables:
            keep[t] = cur
        for c in kids:
            if not want_tables:
                tabs.pop(c, None)
    return keep if want_tables else tabs[dec.root]


def _tw_put(table, key, vec, add, shift=0, cap=None):
    src = vec
    if shift or add:
        out = np.full(min(len(src) + shift, (cap + 1) if cap is not None else len(src) + shift),
                      NEG, dtype=np.int64)
        hi = len(out) - shift
        if hi <= 0:
            return
        seg = src[:hi]
        out[shift:shift + len(seg)] = np.where(seg <= NEG // 2, NEG, seg + add)
        src = out
    # stored vectors are never mutated in place, so aliasing is fine
    old = table.get(key)
    if old is None:
        table[key] = src
        return
    if len(old) < len(src):
        old = np.concatenate([old, np.full(len(src) - len(old), NEG, dtype=np.int64)])
    elif len(src) < len(old):
        src = np.concatenate([src, np.full(len(old) - len(src), NEG, dtype=np.int64)])
    table[key] = np.maximum(old, src)


def _maxplus(a, b, overlap, selw, cap):
    """c[s] = max over s1+s2-overlap = s of a[s1]+b[s2] - selw."""
    la, lb = len(a), len(b)
    out_len = min(la + lb - 1 - overlap, cap + 1)
    if out_len <= 0:
        return np.full(0, NEG, dtype=np.int64)
    if la == 1 or lb == 1:
        short, other = (a, b) if la == 1 else (b, a)
        out = other + (int(short[0]) - selw)
        out[out <= NEG // 2] = NEG
        return out[overlap:overlap + out_len]
    # scatter the pair sums onto anti-diagonals (row s1 shifted right by s1
    # via a spare column), then take column maxima; re-normalizing to NEG
    # keeps the sentinel from overflowing through repeated joins
    mat = a[:, None] + (b - selw)
    mat[mat <= NEG // 2] = NEG
    cols = la + lb - 1
    buf = np.full((la, cols + 1), NEG, dtype=np.int64)
    buf[:, :lb] = mat
    diag_max = buf.ravel()[:la * cols].reshape(la, cols).max(axis=0)
    return diag_max[overlap:overlap + out_len]


def solve_spdd_by_treewidth(inst, decomposition=None, budget=10 ** 8):
    """Decide the instance by dynamic programming over a nice tree
    decomposition of the web's underlying graph (star tree only)."""
    if not inst.tree.is_star():
        raise PreconditionError("treewidth solver needs a star tree")
    if inst.D <= 0:
        return Solution(frozenset(), 0, {"method": "treewidth", "trivial": True})
    dec = decomposition
    if dec is None:
        dec = build_nice_tree_decomposition(inst.web)
    kcap = min(inst.k, inst.n)
    if kcap <= 0:
        return None
    if (9 ** max(dec.width, 0)) * len(dec) * (kcap + 1) > budget:
        raise BudgetExceededError(
            f"treewidth DP too large (width {dec.width})")
    tables = _tw_tables(inst, dec, kcap, want_tables=True)
    root_tab = tables[dec.root]
    vec = root_tab.get((frozenset(), frozenset()))
    if vec is None:
        return None
    best_s = None
    for s in range(min(len(vec) - 1, kcap), -1, -1):
        if vec[s] >= inst.D:
            best_s = s
            break
    if best_s is None:
        return None
    taxa = _tw_traceback(inst, dec, kcap, best_s, tables)
    if taxa is None or not is_viable(inst.web, taxa) or pd(inst.tree, taxa) < inst.D:
        raise DomainError("internal error: treewidth witness extraction failed")
    return Solution(frozenset(taxa), pd(inst.tree, taxa),
                    {"method": "treewidth", "width": str(dec.width)})


def _tw_traceback(inst, dec, kcap, s_target, tables=None):
    """Walk the tables top-down choosing any maximizer; saved taxa are
    collected at their introduce nodes."""
    if tables is None:
        tables = _tw_tables(inst, dec, kcap, want_tables=True)
    web = inst.web
    w = inst.tree.weight

    def get(t, key, s):
        vec = tables[t].get(key)
        if vec is None or not 0 <= s < len(vec):
            return NEG
        return int(vec[s])

    chosen = set()
    stack = [(dec.root, (frozenset(), frozenset()), s_target)]
    while stack:
        t, (r, g), s = stack.pop()
        target = get(t, (r, g), s)
        if target <= NEG // 2:
            return None
        kind = dec.kind[t]
        kids = dec.children[t]
        if kind == "leaf":
            continue
        if kind == "forget":
            v = dec.vertex[t]
            for key in ((r, g | {v}), (r, g)):
                if get(kids[0], key, s) == target:
                    if v in key[1]:
                        pass
                    stack.append((kids[0], key, s))
                    break
            else:
                return None
            continue
        if kind == "introduce":
            v = dec.vertex[t]
            if v not in r and v not in g:
                if get(kids[0], (r, g), s) == target:
                    stack.append((kids[0], (r, g), s))
                    continue
                return None
            chosen.add(v)
            base_r, base_g = (r - {v}), (g - {v})
            movable = sorted(web.pred[v] & base_g)
            found = False
            for a_size in range(len(movable) + 1):
                for a in itertools.combinations(movable, a_size):
                    a = frozenset(a)
                    key = (base_r | a, base_g - a)
                    if get(kids[0], key, s - 1) + w[v] == target:
                        stack.append((kids[0], key, s - 1))
                        found = True
                        break
                if found:
                    break
            if not found:
                return None
            continue
        # join
        sel = r | g
        selw = sum(w[x] for x in sel)
        found = False
        for (r1, g1) in tables[kids[0]]:
            if r1 | g1 != sel:
                continue
            for (r2, g2) in tables[kids[1]]:
                if r2 | g2 != sel or (r1 & r2, g1 | g2) != (r, g):
                    continue
                for s1 in range(s + len(sel) + 1):
                    s2 = s + len(sel) - s1
                    a = get(kids[0], (r1, g1), s1)
                    b = get(kids[1], (r2, g2), s2)
                    if a <= NEG // 2 or b <= NEG // 2:
                        continue
                    if a + b - selw == target:
                        stack.append((kids[0], (r1, g1), s1))
                        stack.append((kids[1], (r2, g2), s2))
                        found = True
                        break
                if found:
                    break
            if found:
                break
        if not found:
            return None
    return chosen


def treewidth_tables(inst, decomposition=None):
    """Expose the full DP tables for auditing: dict node -> dict
    (R, G, B) -> dict s -> value (unreachable states omitted)."""
    if not inst.tree.is_star():
        raise PreconditionError("treewidth solver needs a star tree")
    dec = decomposition
    if dec is None:
        dec = build_nice_tree_decomposition(inst.web)
    kcap = min(inst.k, inst.n)
    raw = _tw_tables(inst, dec, max(kcap, 0), want_tables=True)
    out = {}
    for t, tab in raw.items():
        node = {}
        for (r, g), vec in tab.items():
            b = dec.bag[t] - r - g
            entry = {}
            for s in range(len(vec)):
                if vec[s] > NEG // 2:
                    entry[s] = int(vec[s])
            if entry:
                node[(r, g, frozenset(b))] = entry
        out[t] = node
    return out, dec


# ---------------------------------------------------------------------------
# out-forest solver (few extinctions)

def knapsack_decide(items, budget, demand):
    """Items are (cost, value) pairs with nonnegative integers.  Returns
    indices of a selection with total cost <= budget and total value >=
    demand, or None."""
    demand = max(demand, 0)
    best = [None] * (demand + 1)  # value level -> (min cost, selection)
    best[0] = (0, ())
    for i, (c, v) in enumerate(items):
        if c < 0 or v < 0:
            raise DomainError("knapsack items need nonnegative cost and value")
        for d in range(demand, -1, -1):
            if best[d] is None:
                continue
            nd = min(d + v, demand)
            nc = best[d][0] + c
            if (best[nd] is None or nc < best[nd][0]) and i not in best[d][1]:
                best[nd] = (nc, best[d][1] + (i,))
    if best[demand] is None or best[demand][0] > budget:
        return None
    return sorted(best[demand][1])


def solve_pdd_outforest_by_kbar(inst, mode="exact", seed=0, epsilon=0.1):
    """Decide the instance when every taxon has at most one prey.

    Works from the extinction side: choose which complete prey-subtrees
    of the web to give up, paying their diversity, until at most k taxa
    remain.  Color-coding isolates candidate phylogenetic subtrees."""
    web = inst.web
    tree = inst.tree
    for x in web.taxa:
        if len(web.prey[x]) > 1:
            raise PreconditionError("out-forest solver needs at most one prey per taxon")
    n = inst.n
    total = pd(tree, web.taxa)
    if inst.D <= 0:
        return Solution(frozenset(), 0, {"method": "out-forest", "trivial": True})
    if total < inst.D:
        return None
    kbar = n - inst.k
    if kbar <= 0:
        return Solution(frozenset(web.taxa), total, {"method": "out-forest"})
    slack = total - inst.D  # diversity we may give up
    names = sorted(web.taxa)
    idx = {x: i for i, x in enumerate(names)}
    t = min(3 * kbar, n)
    uni = build_universal_set(n, t, mode=mode, seed=seed, epsilon=epsilon)
    off = tree.offspring_map
    # subtree weight below each vertex
    sub_w = {}
    for v in tree.postorder():
        kids = tree.children.get(v, ())
        sub_w[v] = sum(sub_w[c] + tree.weight[c] for c in kids)
    # food-web descendants (iterated predators)
    for trace in uni.subsets:
        color = {x: (trace >> idx[x]) & 1 for x in names}
        zero = frozenset(x for x in names if color[x] == 0)
        if not zero:
            continue
        # maximal all-zero phylogenetic subtrees with a kept cousin
        items_taxa = []
        stack = [tree.root]
        while stack:
            u = stack.pop()
            for c in tree.children.get(u, ()):
                leaves = off[c]
                if leaves and leaves <= zero:
                    items_taxa.append((c, leaves))
                else:
                    stack.append(c)
        # each such subtree is maximal (its parent keeps a non-zero
        # offspring, or is the root with a kept taxon elsewhere)
        kept_exists = len(zero) < n
        usable = [(c, leaves) for c, leaves in items_taxa
                  if tree.parent[c] != tree.root or kept_exists]
        if not usable:
            continue
        # group subtrees whose taxa interact in the web; a group is
        # all-or-nothing because extinctions propagate to predators
        parent_of = list(range(len(usable)))

        def find(i):
            while parent_of[i] != i:
                parent_of[i] = parent_of[parent_of[i]]
                i = parent_of[i]
            return i

        def union(i, j):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent_of[ri] = rj

        owner = {}
        for i, (c, leaves) in enumerate(usable):
            for x in leaves:
                owner[x] = i
        adj = web.underlying_adjacency()
        ok_item = [True] * len(usable)
        for i, (c, leaves) in enumerate(usable):
            for x in leaves:
                for y in web.pred[x]:
                    # predators of an extinct taxon with no other prey die too
                    if y in owner:
                        union(i, owner[y])
                    else:
                        ok_item[i] = False
        groups = {}
        for i in range(len(usable)):
            groups.setdefault(find(i), []).append(i)
        items = []
        members = []
        for root_i, idxs in sorted(groups.items()):
            if not all(ok_item[i] for i in idxs):
                continue
            taxa = frozenset().union(*(usable[i][1] for i in idxs))
            cost = sum(tree.weight[usable[i][0]] + sub_w[usable[i][0]]
                       for i in idxs)
            items.append((cost, len(taxa)))
            members.append(taxa)
        sel = knapsack_decide(items, slack, kbar)
        if sel is None:
            continue
        extinct = frozenset().union(*(members[i] for i in sel))
        survivors = web.taxa - extinct
        if (len(survivors) <= inst.k and is_viable(web, survivors)
                and pd(tree, survivors) >= inst.D):
            return Solution(frozenset(survivors), pd(tree, survivors),
                            {"method": "out-forest"})
    return None
