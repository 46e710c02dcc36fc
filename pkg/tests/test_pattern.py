import pytest

from helpers import height2_instance
from pdd.core import FoodWeb, Instance, PhyloTree, is_viable, pd
from pdd.oracle import brute_force_decide
from pdd.pattern import (PatternTree, ReductionState,
                         enumerate_labeled_rooted_trees, rr_contract_internal,
                         rr_pattern_edge_original, rr_pattern_edge_required,
                         solve_pdd_by_k_height, solve_pdd_pattern)

RED, BLUE, GREEN, ORANGE, DGREEN, CYAN, YELLOW, GRAY = range(8)


def reference_contraction_state():
    """Two-level tree whose internal vertices carry a repeated color, so a
    single contraction pass must re-hang both blocks onto the root."""
    tree = PhyloTree.from_edges("rho", [
        ("rho", "c1", 6), ("rho", "c4", 1), ("rho", "c2", 3),
        ("rho", "c3", 1), ("rho", "c5", 2),
        ("c1", "c11", 4),
        ("c4", "c41", 5), ("c4", "c42", 2),
        ("c3", "c30", 4), ("c3", "c31", 2), ("c3", "c32", 3),
        ("c32", "c321", 1), ("c32", "c322", 1),
        ("c5", "c51", 2), ("c5", "c52", 2),
        ("c52", "c521", 2)], strict=False)
    coloring = {"rho": RED, "c1": BLUE, "c4": BLUE, "c2": GREEN,
                "c3": ORANGE, "c5": ORANGE, "c11": DGREEN, "c41": DGREEN,
                "c42": DGREEN, "c30": CYAN, "c31": CYAN, "c32": YELLOW,
                "c51": CYAN, "c52": YELLOW, "c321": GRAY, "c322": GRAY,
                "c521": GRAY}
    # pattern: root -> {blue spine, green leaf, orange spine}; the orange
    # vertex (named to sort first) has a cyan leaf and a yellow child with a
    # gray leaf below it
    # the yellow grand-child is named to sort before the cyan one, making it
    # the weight-inheriting pick of the contraction rule
    pattern = PatternTree(
        "pr",
        {"a_u": "pr", "z_b": "pr", "pg": "pr", "pz": "a_u", "py": "a_u",
         "pd": "z_b", "pgr": "py"},
        {"pr": RED, "a_u": ORANGE, "z_b": BLUE, "pg": GREEN, "pz": CYAN,
         "py": YELLOW, "pd": DGREEN, "pgr": GRAY})
    web = FoodWeb.from_arcs(tree.taxa, [])
    inst = Instance(tree, web, 5, 1)
    return ReductionState.start(inst, pattern, coloring)


def test_internal_contraction_reference_weights():
    state = rr_contract_internal(reference_contraction_state())
    tree = state.tree
    for v in ("c30", "c31", "c32", "c51", "c52"):
        assert tree.parent[v] == "rho"
    assert tree.weight["c30"] == 4
    assert tree.weight["c31"] == 2
    assert tree.weight["c32"] == 4
    assert tree.weight["c51"] == 2
    assert tree.weight["c52"] == 4
    assert "c3" not in tree.vertices and "c5" not in tree.vertices
    # untouched blocks keep their weights
    assert tree.weight["c1"] == 6 and tree.weight["c11"] == 4
    assert tree.weight["c41"] == 5 and tree.weight["c42"] == 2
    # the dissolved pattern vertex is gone, its children re-hung
    assert "a_u" not in state.pattern.colors
    assert state.pattern.parent["pz"] == "pr"
    assert state.pattern.parent["py"] == "pr"


def test_internal_contraction_preserves_pattern_respecting_diversity():
    before = reference_contraction_state()
    after = rr_contract_internal(reference_contraction_state())
    # sets spanning the dissolved vertices through a yellow child keep
    # their diversity under the re-weighting
    for taxa in ({"c30", "c321"}, {"c31", "c321", "c322"},
                 {"c51", "c521"}, {"c30", "c321", "c51", "c521"}):
        assert pd(before.tree, taxa) == pd(after.tree, taxa), taxa


def test_edge_pruning_rules():
    state = reference_contraction_state()
    # color pair (RED, ORANGE) exists, (RED, 99) does not: recoloring c1 to
    # an unknown color prunes its whole subtree
    state.coloring["c1"] = 99
    state = rr_pattern_edge_original(state)
    assert "c11" not in state.tree.vertices
    assert "c1" not in state.tree.vertices
    assert "c30" in state.tree.vertices


def test_edge_required_rule_drops_childless_matches():
    state = reference_contraction_state()
    # c5 is orange but must own a cyan child and a yellow child; removing
    # its cyan child's color match kills the c5 subtree
    state.coloring["c51"] = 99
    state = rr_pattern_edge_original(state)
    state = rr_pattern_edge_required(state)
    assert "c52" not in state.tree.vertices
    assert "c30" in state.tree.vertices


def test_labeled_rooted_tree_counts():
    for i, want in ((1, 1), (2, 2), (3, 9), (4, 64)):
        trees = list(enumerate_labeled_rooted_trees(i))
        assert len(trees) == want == i ** (i - 1)
        seen = {(t.root, tuple(sorted(t.parent.items()))) for t in trees}
        assert len(seen) == want


def test_pattern_solver_guards():
    state = reference_contraction_state()
    inst = Instance(state.tree, state.web, 3, 1)
    bad = dict(state.coloring)
    bad["rho"] = GREEN
    assert solve_pdd_pattern(inst, state.pattern, bad) is None
    assert solve_pdd_pattern(inst.with_params(D=0), state.pattern,
                             state.coloring).taxa == frozenset()


def test_k_height_solver_matches_oracle():
    for seed in range(80):
        inst = height2_instance(seed)
        got = solve_pdd_by_k_height(inst)
        want = brute_force_decide(inst)
        assert (got is None) == (want is None), seed
        if got is not None:
            assert len(got.taxa) <= inst.k
            assert is_viable(inst.web, got.taxa)
            assert pd(inst.tree, got.taxa) >= inst.D
