from helpers import (small_random_instance, source_separating_instance,
                     star_instance)
from pdd.core import is_viable, pd
from pdd.flow import (FlowNetwork, is_source_separating, min_cost_flow,
                      solve_pdd_source_separating_flow)
from pdd.oracle import brute_force_decide


def test_min_cost_flow_simple_path():
    net = FlowNetwork("s", "t")
    net.add_arc("s", "a", 2, 3)
    net.add_arc("a", "t", 2, -1)
    got = min_cost_flow(net, 2)
    assert got is not None
    cost, _ = got
    assert cost == 2 * 3 + 2 * (-1)


def test_min_cost_flow_prefers_cheap_route():
    net = FlowNetwork("s", "t")
    net.add_arc("s", "a", 1, 5)
    net.add_arc("s", "b", 1, 1)
    net.add_arc("a", "t", 1, 0)
    net.add_arc("b", "t", 1, 0)
    cost, _ = min_cost_flow(net, 1)
    assert cost == 1
    # flow is stateful, so rebuild before asking for a larger value
    net2 = FlowNetwork("s", "t")
    net2.add_arc("s", "a", 1, 5)
    net2.add_arc("s", "b", 1, 1)
    net2.add_arc("a", "t", 1, 0)
    net2.add_arc("b", "t", 1, 0)
    cost2, _ = min_cost_flow(net2, 2)
    assert cost2 == 6


def test_min_cost_flow_infeasible_value():
    net = FlowNetwork("s", "t")
    net.add_arc("s", "t", 1, 0)
    assert min_cost_flow(net, 2) is None


def test_source_separating_recognition():
    for seed in range(30):
        assert is_source_separating(source_separating_instance(seed))
    # a dense star-web instance where predators and sources mix is not
    bad = 0
    for seed in range(30):
        inst = star_instance(seed, n_max=7, density=0.6)
        if not is_source_separating(inst):
            bad += 1
    assert bad > 0


def test_flow_solver_matches_oracle():
    for seed in range(150):
        inst = source_separating_instance(seed)
        got = solve_pdd_source_separating_flow(inst)
        want = brute_force_decide(inst)
        assert (got is None) == (want is None), seed
        if got is not None:
            assert len(got.taxa) <= inst.k
            assert is_viable(inst.web, got.taxa)
            assert pd(inst.tree, got.taxa) >= inst.D
