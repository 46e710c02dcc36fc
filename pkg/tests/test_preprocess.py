from helpers import small_random_instance
from pdd.core import is_viable, pd
from pdd.oracle import brute_force_decide, brute_force_optimum
from pdd.preprocess import (preprocess, rr_heavy_edge_accept,
                            rr_reachability_prune, rr_redundant_prey,
                            single_source_transform, source_distances)


def test_source_distances():
    inst = small_random_instance(1)
    dist = source_distances(inst.web)
    for s in inst.web.sources:
        assert dist[s] == 0
    for x, d in dist.items():
        if d > 0:
            assert any(dist.get(p, 10 ** 9) == d - 1 for p in inst.web.prey[x])


def test_reachability_prune_preserves_optimum():
    for seed in range(80):
        inst = small_random_instance(seed, n_max=8)
        reduced = rr_reachability_prune(inst)
        assert reduced.web.taxa <= inst.web.taxa
        assert brute_force_optimum(reduced).value == \
            brute_force_optimum(inst).value


def test_redundant_prey_preserves_optimum():
    for seed in range(80):
        inst = small_random_instance(seed, n_max=8)
        reduced = rr_redundant_prey(inst)
        assert reduced.web.num_arcs() <= inst.web.num_arcs()
        assert brute_force_optimum(reduced).value == \
            brute_force_optimum(inst).value


def test_heavy_edge_accept_emits_verified_witnesses():
    fired = 0
    for seed in range(120):
        inst = small_random_instance(seed, n_max=8)
        if inst.tree.max_weight < 1:
            continue
        probe = inst.with_params(D=max(1, inst.tree.max_weight))
        probe = rr_reachability_prune(probe)
        sol = rr_heavy_edge_accept(probe)
        if sol is None:
            continue
        fired += 1
        assert len(sol.taxa) <= probe.k
        assert is_viable(probe.web, sol.taxa)
        assert pd(probe.tree, sol.taxa) >= probe.D
    assert fired >= 20


def test_single_source_transform_shape():
    inst = small_random_instance(5)
    out, star = single_source_transform(inst)
    assert out.web.sources == frozenset({star})
    assert out.k == inst.k + 1
    assert out.D == inst.D + inst.D + 1
    assert star in out.tree.taxa
    assert out.tree.parent[star] == out.tree.root


def test_single_source_transform_decision_roundtrip():
    for seed in range(60):
        inst = small_random_instance(seed, n_max=7)
        if inst.D <= 0:
            inst = inst.with_params(D=1)
        out, star = single_source_transform(inst)
        a = brute_force_decide(inst)
        b = brute_force_decide(out)
        assert (a is None) == (b is None)
        if b is not None:
            mapped = b.taxa - {star}
            assert is_viable(inst.web, mapped)
            assert pd(inst.tree, mapped) >= inst.D
            assert len(mapped) <= inst.k


def test_preprocess_pipeline_returns_reduced_instance():
    inst = small_random_instance(7)
    res = preprocess(inst, redundant_prey=True)
    assert res.instance.web.taxa <= inst.web.taxa
    if res.decided is not None:
        assert pd(res.instance.tree, res.decided.taxa) >= res.instance.D
