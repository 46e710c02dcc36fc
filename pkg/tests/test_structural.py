import itertools
import random

import pytest

from helpers import (cluster_modulator_instance, cocluster_modulator_instance,
                     outforest_instance, small_random_instance, star_instance)
from pdd.core import FoodWeb, PhyloTree, is_viable, pd
from pdd.errors import PreconditionError
from pdd.oracle import brute_force_decide
from pdd.structural import (HittingSetTreeProfitsInstance,
                            complement_adjacency, contract_tree_into_root,
                            find_modulator, is_cluster_graph,
                            is_cocluster_graph, knapsack_decide,
                            qualified_join_color,
                            solve_hitting_set_tree_profits,
                            solve_pdd_by_cocluster_modulator,
                            solve_pdd_outforest_by_kbar,
                            solve_spdd_by_cluster_modulator,
                            solve_spdd_by_treewidth)


def test_graph_class_recognizers():
    clique = {"a": {"b", "c"}, "b": {"a", "c"}, "c": {"a", "b"}}
    path = {"a": {"b"}, "b": {"a", "c"}, "c": {"b"}}
    assert is_cluster_graph(clique)
    assert not is_cluster_graph(path)
    assert is_cocluster_graph(complement_adjacency(clique))
    assert not is_cocluster_graph(complement_adjacency(path))


def test_find_modulator_is_minimum():
    for seed in range(60):
        rng = random.Random(seed)
        n = rng.randint(3, 6)
        verts = [f"v{i}" for i in range(n)]
        adj = {v: set() for v in verts}
        for a, b in itertools.combinations(verts, 2):
            if rng.random() < 0.45:
                adj[a].add(b)
                adj[b].add(a)
        for target, check in (("cluster", is_cluster_graph),
                              ("co-cluster", is_cocluster_graph)):
            got = find_modulator(adj, target, n)
            assert got is not None
            rest = {v: adj[v] - got.y for v in adj if v not in got.y}
            assert check(rest)
            # no strictly smaller deletion set works
            for size in range(len(got.y)):
                for cand in itertools.combinations(verts, size):
                    rest2 = {v: adj[v] - set(cand)
                             for v in adj if v not in cand}
                    assert not check(rest2), (seed, target, cand)


def test_find_modulator_respects_budget():
    path5 = {f"v{i}": set() for i in range(5)}
    for i in range(4):
        path5[f"v{i}"].add(f"v{i+1}")
        path5[f"v{i+1}"].add(f"v{i}")
    assert find_modulator(path5, "cluster", 0) is None


def test_cluster_solver_matches_oracle():
    for seed in range(120):
        inst = cluster_modulator_instance(seed)
        mod = find_modulator(inst.web, "cluster", 3)
        assert mod is not None
        got = solve_spdd_by_cluster_modulator(inst, mod.y)
        want = brute_force_decide(inst)
        assert (got is None) == (want is None), seed
        if got is not None:
            assert len(got.taxa) <= inst.k
            assert is_viable(inst.web, got.taxa)
            assert pd(inst.tree, got.taxa) >= inst.D


def test_cocluster_solver_matches_oracle():
    for seed in range(120):
        inst = cocluster_modulator_instance(seed)
        mod = find_modulator(inst.web, "co-cluster", 2)
        assert mod is not None
        got = solve_pdd_by_cocluster_modulator(inst, mod.y)
        want = brute_force_decide(inst)
        assert (got is None) == (want is None), seed
        if got is not None:
            assert len(got.taxa) <= inst.k
            assert is_viable(inst.web, got.taxa)
            assert pd(inst.tree, got.taxa) >= inst.D


def test_hitting_set_tree_profits():
    tree = PhyloTree.star({"a": 5, "b": 3, "c": 2, "d": 1})
    uni = frozenset({"a", "b", "c", "d"})
    fam = (frozenset({"a", "b"}), frozenset({"c", "d"}))
    hs = HittingSetTreeProfitsInstance(uni, fam, tree, 2, 7)
    got = solve_hitting_set_tree_profits(hs)
    assert got is not None
    assert all(got & w for w in fam)
    assert pd(tree, got) >= 7
    # infeasible profit demand
    hs2 = HittingSetTreeProfitsInstance(uni, fam, tree, 1, 7)
    assert solve_hitting_set_tree_profits(hs2) is None
    # exhaustive cross-check on random draws
    rng = random.Random(7)
    for _ in range(40):
        names = ["a", "b", "c", "d", "e"][:rng.randint(2, 5)]
        tree = PhyloTree.star({x: rng.randint(1, 6) for x in names})
        uni = frozenset(names)
        fam = tuple(frozenset(rng.sample(names, rng.randint(1, len(names))))
                    for _ in range(rng.randint(0, 3)))
        k = rng.randint(0, len(names))
        D = rng.randint(0, tree.total_weight)
        hs = HittingSetTreeProfitsInstance(uni, fam, tree, k, D)
        got = solve_hitting_set_tree_profits(hs)
        best = None
        for size in range(k + 1):
            for cand in itertools.combinations(sorted(names), size):
                s = frozenset(cand)
                if all(s & w for w in fam) and pd(tree, s) >= D:
                    best = s
                    break
            if best is not None:
                break
        assert (got is None) == (best is None)
        if got is not None:
            assert all(got & w for w in fam) and pd(tree, got) >= D
            assert len(got) <= k


def test_contract_tree_into_root():
    tree = PhyloTree.from_edges("r", [
        ("r", "u", 1), ("u", "a", 4), ("u", "b", 2), ("r", "c", 7)])
    contracted = contract_tree_into_root(tree, {"a"})
    # edges already paid for by the saved set contribute nothing extra
    for s in ({"b"}, {"c"}, {"b", "c"}):
        assert pd(contracted, s) == pd(tree, s | {"a"}) - pd(tree, {"a"})


def test_qualified_join_color_matrix():
    cases = {
        ("G", "G"): "G", ("G", "R"): "G", ("G", "B"): "G",
        ("R", "G"): "G", ("R", "R"): "R", ("R", "B"): "R",
        ("B", "G"): "G", ("B", "R"): "R", ("B", "B"): "B",
    }
    for (c1, c2), want in cases.items():
        assert qualified_join_color(c1, c2) == want, (c1, c2)


def test_treewidth_solver_matches_oracle():
    for seed in range(120):
        inst = star_instance(seed, n_max=8)
        got = solve_spdd_by_treewidth(inst)
        want = brute_force_decide(inst)
        assert (got is None) == (want is None), seed
        if got is not None:
            assert len(got.taxa) <= inst.k
            assert is_viable(inst.web, got.taxa)
            assert pd(inst.tree, got.taxa) >= inst.D


def test_treewidth_solver_rejects_non_star():
    from pdd.generators import gen_random
    inst = gen_random(6, shape="caterpillar", seed=1)
    with pytest.raises(PreconditionError):
        solve_spdd_by_treewidth(inst)


def test_knapsack_decide_against_enumeration():
    rng = random.Random(11)
    for _ in range(120):
        m = rng.randint(0, 6)
        items = [(rng.randint(0, 6), rng.randint(0, 4)) for _ in range(m)]
        budget = rng.randint(0, 12)
        demand = rng.randint(0, 10)
        got = knapsack_decide(items, budget, demand)
        want = None
        for size in range(m + 1):
            for cand in itertools.combinations(range(m), size):
                cost = sum(items[i][0] for i in cand)
                val = sum(items[i][1] for i in cand)
                if cost <= budget and val >= demand:
                    want = cand
                    break
            if want is not None:
                break
        assert (got is None) == (want is None)
        if got is not None:
            assert sum(items[i][0] for i in got) <= budget
            assert sum(items[i][1] for i in got) >= demand
            assert len(set(got)) == len(got)


def test_outforest_solver_matches_oracle():
    for seed in range(150):
        inst = outforest_instance(seed)
        got = solve_pdd_outforest_by_kbar(inst)
        want = brute_force_decide(inst)
        assert (got is None) == (want is None), seed
        if got is not None:
            assert len(got.taxa) <= inst.k
            assert is_viable(inst.web, got.taxa)
            assert pd(inst.tree, got.taxa) >= inst.D
