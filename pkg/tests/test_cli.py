import json
import os

import pytest

from pdd.cli import main
from pdd.generators import gen_random
from pdd.io import format_instance, parse_instance
from pdd.oracle import brute_force_decide

YES_TEXT = "#tree\n(a:5,b:3)r;\n#web\na b\n#params k=1 D=5\n"
NO_TEXT = "#tree\n(a:5,b:3)r;\n#web\na b\n#params k=1 D=8\n"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_solve_exit_codes(tmp_path, capsys):
    yes = write(tmp_path, "yes.pdd", YES_TEXT)
    no = write(tmp_path, "no.pdd", NO_TEXT)
    assert main(["solve", yes]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["yes"] is True
    assert rec["witness"] == ["a"]
    assert main(["solve", no]) == 1
    rec = json.loads(capsys.readouterr().out)
    assert rec["yes"] is False


def test_solve_error_exit_code(tmp_path, capsys):
    bad = write(tmp_path, "bad.pdd", "#tree\nnot newick\n#params k=1 D=1\n")
    assert main(["solve", bad]) == 2
    assert main(["solve", str(tmp_path / "missing.pdd")]) == 2
    capsys.readouterr()


def test_solve_named_algorithm_and_optimum(tmp_path, capsys):
    inst = gen_random(7, shape="star", seed=3)
    path = write(tmp_path, "star.pdd", format_instance(inst))
    code = main(["solve", "--algorithm", "cc-k", "--optimum", path])
    rec = json.loads(capsys.readouterr().out)
    assert rec["algorithm"] == "cc-k"
    assert rec["error"] is None
    want = brute_force_decide(inst)
    assert (code == 0) == (want is not None)


def test_solve_unusable_algorithm_refuses(tmp_path, capsys):
    inst = gen_random(7, shape="caterpillar", seed=4)
    path = write(tmp_path, "cat.pdd", format_instance(inst))
    code = main(["solve", "--algorithm", "cc-k", path])
    rec = json.loads(capsys.readouterr().out)
    assert code == 2
    assert rec["error"]


def test_verify_command(tmp_path, capsys):
    yes = write(tmp_path, "yes.pdd", YES_TEXT)
    assert main(["verify", yes, "--solution", "a"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is True and report["pd"] == 5
    assert main(["verify", yes, "--solution", "b"]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["viable"] is False
    capsys.readouterr()


def test_gen_families_emit_parseable_instances(capsys):
    for family in ("random", "vertex-cover", "set-cover", "nonblocker"):
        assert main(["gen", "--family", family, "--n", "6",
                     "--seed", "2"]) == 0
        text = capsys.readouterr().out
        inst = parse_instance(text)
        assert inst.n >= 1


def test_gen_deterministic(capsys):
    main(["gen", "--family", "random", "--n", "7", "--seed", "5"])
    a = capsys.readouterr().out
    main(["gen", "--family", "random", "--n", "7", "--seed", "5"])
    b = capsys.readouterr().out
    assert a == b


def test_bench_directory(tmp_path, capsys, monkeypatch):
    write(tmp_path, "a.pdd", YES_TEXT)
    write(tmp_path, "b.pdd", NO_TEXT)
    monkeypatch.setenv("PDD_THREADS", "2")
    assert main(["bench", str(tmp_path)]) == 0
    lines = [json.loads(l) for l in
             capsys.readouterr().out.strip().splitlines()]
    assert len(lines) == 2
    names = {os.path.basename(r["file"]) for r in lines}
    assert names == {"a.pdd", "b.pdd"}
