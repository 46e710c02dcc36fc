"""Command-line front end: solve, verify, gen, bench.

Exit codes: 0 = yes / all checks pass, 1 = no / a check fails,
2 = refusal or error.  Output is one JSON record per run.
"""

import argparse
import concurrent.futures
import json
import os
import sys
from pathlib import Path

from .errors import PDDError
from .decomposition import parse_decomposition
from .generators import (gen_random, gen_from_vertex_cover,
                         gen_from_red_blue_nonblocker, gen_from_set_cover)
from .io import parse_instance, format_instance
from .portfolio import (ALGORITHMS, PortfolioPolicy, portfolio_solve, verify)


def _read_instance(path):
    return parse_instance(Path(path).read_text())


def _policy_from_args(args):
    kw = {}
    if getattr(args, "budget", None) is not None:
        kw["budget"] = args.budget
    if getattr(args, "mode", None) is not None:
        kw["mode"] = {"mc": "monte-carlo"}.get(args.mode, args.mode)
    if getattr(args, "seed", None) is not None:
        kw["seed"] = args.seed
    if getattr(args, "epsilon", None) is not None:
        kw["epsilon"] = args.epsilon
    return PortfolioPolicy(**kw)


def cmd_solve(args):
    inst = _read_instance(args.file)
    policy = _policy_from_args(args)
    dec = None
    if args.decomposition:
        dec = parse_decomposition(Path(args.decomposition).read_text(),
                                  inst.web)
    rec = portfolio_solve(inst, algorithm=args.algorithm, policy=policy,
                          optimum=args.optimum, decomposition=dec)
    print(rec.to_json())
    if rec.error:
        return 2
    return 0 if rec.yes else 1


def cmd_verify(args):
    inst = _read_instance(args.file)
    claimed = [s for s in args.solution.split(",") if s] if args.solution else []
    report = verify(inst, claimed)
    print(json.dumps(report, sort_keys=True))
    return 0 if report["ok"] else 1


def cmd_gen(args):
    if args.family == "random":
        inst = gen_random(n=args.n, density=args.density,
                          weights=(1, args.max_weight), shape=args.shape,
                          k_fraction=args.k_fraction,
                          d_fraction=args.d_fraction, seed=args.seed)
    elif args.family == "vertex-cover":
        import random as _r
        rng = _r.Random(args.seed)
        n = max(4, args.n - args.n % 2)  # cubic graphs need even order
        while True:
            raw = _random_cubic(n, rng)
            if raw is not None:
                break
        names = [f"v{i}" for i in range(n)]
        edges = [(names[a], names[b]) for a, b in raw]
        inst, _ = gen_from_vertex_cover(names, edges, max(1, n // 3))
    elif args.family == "set-cover":
        import random as _r
        rng = _r.Random(args.seed)
        m = max(2, min(args.n, 6))
        u = [f"e{i}" for i in range(m)]
        fam = {}
        for i in range(m):
            members = frozenset(x for x in u if rng.random() < 0.5)
            fam[f"s{i}"] = members or frozenset([rng.choice(u)])
        fam["s_all"] = frozenset(u)  # every element stays coverable
        inst, _ = gen_from_set_cover(fam, u, max(1, len(fam) // 2))
    elif args.family == "nonblocker":
        import random as _r
        rng = _r.Random(args.seed)
        nr = max(1, args.n // 2)
        nb = max(1, args.n - nr)
        red = [f"r{i}" for i in range(nr)]
        blue = [f"b{i}" for i in range(nb)]
        edges = [(r, b) for r in red for b in blue if rng.random() < 0.5]
        for i, r in enumerate(red):
            edges.append((r, blue[i % nb]))
        inst, _ = gen_from_red_blue_nonblocker(red, blue, sorted(set(edges)),
                                               max(1, nr // 2))
    else:
        raise PDDError(f"unknown family {args.family!r}")
    sys.stdout.write(format_instance(inst))
    return 0


def _random_cubic(n, rng):
    """Random 3-regular graph by pairing stubs; None on failure."""
    stubs = [v for v in range(n) for _ in range(3)]
    rng.shuffle(stubs)
    edges = set()
    while stubs:
        a = stubs.pop()
        b = stubs.pop()
        if a == b or (min(a, b), max(a, b)) in edges:
            return None
        edges.add((min(a, b), max(a, b)))
    return sorted(edges)


def _bench_one(path, algorithm, policy):
    try:
        inst = _read_instance(path)
        rec = portfolio_solve(inst, algorithm=algorithm, policy=policy,
                              optimum=False)
        d = json.loads(rec.to_json())
    except (PDDError, OSError, ValueError) as e:
        d = {"error": f"{type(e).__name__}: {e}"}
    d["file"] = str(path)
    return d


def cmd_bench(args):
    policy = _policy_from_args(args)
    files = sorted(p for p in Path(args.dir).iterdir() if p.is_file())
    threads = int(os.environ.get("PDD_THREADS", "1") or "1")
    results = []
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(
                lambda p: _bench_one(p, args.algorithm, policy), files))
    else:
        results = [_bench_one(p, args.algorithm, policy) for p in files]
    bad = 0
    for d in results:
        print(json.dumps(d, sort_keys=True))
        if d.get("error"):
            bad += 1
    return 2 if bad else 0


def build_parser():
    ap = argparse.ArgumentParser(prog="pdd",
                                 description="phylogenetic diversity with "
                                             "food-web dependencies")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_solver_opts(p):
        p.add_argument("--algorithm", default="auto",
                       choices=("auto",) + ALGORITHMS)
        p.add_argument("--mode", default="exact",
                       choices=("exact", "mc", "monte-carlo"))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--epsilon", type=float, default=0.1)
        p.add_argument("--budget", type=int, default=None)

    ps = sub.add_parser("solve", help="decide one instance")
    add_solver_opts(ps)
    ps.add_argument("--optimum", action="store_true",
                    help="report the maximum attainable diversity as well")
    ps.add_argument("--decomposition", default=None,
                    help="externally supplied nice tree decomposition file")
    ps.add_argument("file")
    ps.set_defaults(func=cmd_solve)

    pv = sub.add_parser("verify", help="check a claimed solution")
    pv.add_argument("file")
    pv.add_argument("--solution", required=True,
                    help="comma-separated taxa (empty string for the empty set)")
    pv.set_defaults(func=cmd_verify)

    pg = sub.add_parser("gen", help="generate an instance on stdout")
    pg.add_argument("--family", default="random",
                    choices=("random", "vertex-cover", "set-cover",
                             "nonblocker"))
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--n", type=int, default=8)
    pg.add_argument("--density", type=float, default=0.3)
    pg.add_argument("--max-weight", type=int, default=10)
    pg.add_argument("--shape", default="random",
                    choices=("star", "caterpillar", "random"))
    pg.add_argument("--k-fraction", type=float, default=0.5)
    pg.add_argument("--d-fraction", type=float, default=0.6)
    pg.set_defaults(func=cmd_gen)

    pb = sub.add_parser("bench", help="run a directory of instances")
    add_solver_opts(pb)
    pb.add_argument("dir")
    pb.set_defaults(func=cmd_bench)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PDDError as e:
        print(json.dumps({"error": f"{type(e).__name__}: {e}"}),
              file=sys.stderr)
        return 2
    except OSError as e:
        print(json.dumps({"error": str(e)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
