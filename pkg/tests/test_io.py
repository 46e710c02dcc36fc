import pytest

from pdd.core import FoodWeb, Instance, PhyloTree
from pdd.errors import DomainError
from pdd.generators import (gen_from_red_blue_nonblocker, gen_from_set_cover,
                            gen_from_vertex_cover, gen_random)
from pdd.io import (format_instance, format_newick, parse_instance,
                    parse_newick)


def test_parse_simple_newick():
    t = parse_newick("((a:4,b:2)u:1,c:7)r;")
    assert t.root == "r"
    assert t.taxa == frozenset({"a", "b", "c"})
    assert t.weight["u"] == 1 and t.weight["c"] == 7


def test_newick_roundtrip():
    t = parse_newick("((a:4,b:2)u:1,c:7)r;")
    assert parse_newick(format_newick(t)) == t


def test_quoted_labels_roundtrip():
    t = PhyloTree.from_edges("rho", [
        ("rho", "e(a,b)", 3), ("e(a,b)", "[a,e(a,b)]", 1),
        ("e(a,b)", "it's", 2)])
    back = parse_newick(format_newick(t))
    assert back == t
    assert "[a,e(a,b)]" in back.taxa


def test_newick_errors():
    for bad in ("(a:1,b:2)r", "(a,b:2)r;", "(a:x)r;", "(a:1))r;",
                "('oops:1)r;"):
        with pytest.raises(DomainError):
            parse_newick(bad)


def test_instance_roundtrip_plain():
    text = "#tree\n((a:4,b:2)u:1,c:7)r;\n#web\na b\n#params k=2 D=8\n"
    inst = parse_instance(text)
    assert inst.k == 2 and inst.D == 8
    assert list(inst.web.arcs()) == [("a", "b")]
    assert parse_instance(format_instance(inst)) == inst


def test_instance_roundtrip_generated_families():
    insts = [gen_random(8, 0.4, (1, 9), "random", 0.5, 0.6, seed=s)
             for s in range(10)]
    vs = ["v0", "v1", "v2", "v3"]
    es = [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]]
    insts.append(gen_from_vertex_cover(vs, es, 2)[0])
    insts.append(gen_from_red_blue_nonblocker(
        ["r0", "r1"], ["b0", "b1"],
        [("r0", "b0"), ("r0", "b1"), ("r1", "b1")], 1)[0])
    insts.append(gen_from_set_cover(
        {"qa": ["1", "2"], "qb": ["2", "3"]}, ["1", "2", "3"], 2)[0])
    for inst in insts:
        text = format_instance(inst)
        back = parse_instance(text)
        assert back == inst
        assert format_instance(back) == text


def test_instance_format_errors():
    with pytest.raises(DomainError):
        parse_instance("#tree\n(a:1,b:1)r;\n#params k=1\n")
    with pytest.raises(DomainError):
        parse_instance("#web\na b\n#params k=1 D=1\n")
    with pytest.raises(DomainError):
        parse_instance("#tree\n(a:1,b:1)r;\n#web\na\n#params k=1 D=1\n")
    with pytest.raises(DomainError):
        parse_instance("#tree\n(a:1,b:1)r;\n#params k=1 D=x\n")


def test_comments_and_blank_lines_ignored():
    text = ("# a comment\n#tree\n# another\n(a:1,b:1)r;\n\n"
            "#web\n\n#params k=1 D=1\n")
    inst = parse_instance(text)
    assert inst.n == 2
