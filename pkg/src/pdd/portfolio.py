"""Algorithm selection: measure the instance, pick the cheapest solver.

Each solver has a precondition and a cost estimate; the portfolio runs
the cheapest applicable one under the policy budget and lifts decision
solvers to optimum reporting via binary search over the target D.
"""

import hashlib
import json
import math
import time
from dataclasses import dataclass, field, asdict
from typing import Optional

from .core import Instance, Solution, pd, is_viable, viability_certificate
from .colorcoding import solve_spdd_by_k
from .decomposition import build_nice_tree_decomposition
from .diversity import solve_pdd_by_d
from .errors import PDDError, BudgetExceededError, PreconditionError
from .io import format_instance
from .oracle import brute_force_optimum, brute_force_decide, DEFAULT_BUDGET
from .pattern import solve_pdd_by_k_height
from .preprocess import preprocess
from .structural import (find_modulator, is_source_separating,
                         solve_pdd_source_separating_flow,
                         solve_pdd_outforest_by_kbar,
                         solve_spdd_by_cluster_modulator,
                         solve_pdd_by_cocluster_modulator,
                         solve_spdd_by_treewidth)

ALGORITHMS = ("oracle", "cc-k", "pattern", "d", "cluster", "cocluster",
              "tw", "flow", "outforest")


@dataclass(frozen=True)
class PortfolioPolicy:
    """Thresholds are configuration: change them without touching code."""
    budget: int = 10 ** 8          # rough upper bound on table cells / steps
    cluster_dmax: int = 4
    cocluster_dmax: int = 3
    tw_width_max: int = 6
    d_max: int = 16
    mode: str = "exact"
    seed: int = 0
    epsilon: float = 0.1


@dataclass
class RunRecord:
    digest: str
    algorithm: str
    mode: str
    seed: int
    yes: bool
    witness: Optional[list]
    value: Optional[int]
    optimum: Optional[int]
    elapsed: float
    reductions: list
    parameters: dict
    error: Optional[str] = None

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def instance_digest(inst):
    return hashlib.sha256(format_instance(inst).encode()).hexdigest()[:16]


def measure_parameters(inst, policy):
    """Structural parameters that steer solver selection."""
    web = inst.web
    tree = inst.tree
    p = {
        "n": inst.n,
        "k": inst.k,
        "D": inst.D,
        "kbar": inst.kbar,
        "height": tree.height,
        "star": tree.is_star(),
        "pd_total": pd(tree, web.taxa),
        "outforest": all(len(web.prey[x]) <= 1 for x in web.taxa),
        "source_separating": is_source_separating(inst),
    }
    m = find_modulator(web, "cluster", policy.cluster_dmax)
    p["d_cluster"] = len(m.y) if m else None
    m = find_modulator(web, "co-cluster", policy.cocluster_dmax)
    p["d_cocluster"] = len(m.y) if m else None
    try:
        dec = build_nice_tree_decomposition(web)
        p["width"] = dec.width
    except PDDError:
        p["width"] = None
    return p


def _estimates(inst, p, policy):
    """(algorithm, rough cost) for each applicable solver, cheapest first."""
    n, k, D = p["n"], p["k"], p["D"]
    kk = min(k, n)
    out = []
    ocost = math.comb(n, min(kk, n - kk)) * n if n else 1
    if ocost <= policy.budget:
        out.append(("oracle", ocost))
    if p["star"]:
        cc = math.comb(n + 1, kk + 1) * (2 ** (kk + 1)) * n if n else 1
        if cc <= policy.budget:
            out.append(("cc-k", cc))
        if p["width"] is not None and p["width"] <= policy.tw_width_max:
            twc = (9 ** p["width"]) * n * (kk + 1) * 40
            if twc <= policy.budget:
                out.append(("tw", twc))
        if p["d_cluster"] is not None:
            clc = (6 ** p["d_cluster"]) * (n ** 2) * (kk + 1) * (2 ** p["d_cluster"])
            if clc <= policy.budget:
                out.append(("cluster", clc))
    bound = min(kk * p["height"] + 1, 2 * n)
    if bound >= 2:
        pat = sum(i ** (i - 1) for i in range(2, bound + 1))
        if pat * n <= policy.budget:
            out.append(("pattern", pat * n))
    if D <= policy.d_max:
        dc = math.comb(n + 1, kk + 1) * (4 ** (D + 1)) * n
        if dc <= policy.budget:
            out.append(("d", dc))
    if p["d_cocluster"] is not None:
        coc = (2 ** p["d_cocluster"]) * (n ** 3) * (3 ** p["d_cocluster"])
        if coc <= policy.budget:
            out.append(("cocluster", coc))
    if p["outforest"]:
        t = min(3 * max(p["kbar"], 0), n)
        ofc = (2 ** t) * t * n
        if ofc <= policy.budget:
            out.append(("outforest", ofc))
    if p["source_separating"]:
        out.append(("flow", n * (kk + 1) * 20))
    out.sort(key=lambda e: (e[1], ALGORITHMS.index(e[0])))
    return out


def _dispatch(inst, algorithm, policy, decomposition=None):
    """Run one solver as a decision procedure; Solution or None."""
    mode = policy.mode
    full = "monte-carlo" if mode in ("mc", "monte-carlo") else "exact"
    if algorithm == "oracle":
        return brute_force_decide(inst)
    if algorithm == "cc-k":
        return solve_spdd_by_k(inst, mode=full, seed=policy.seed,
                               epsilon=policy.epsilon)
    if algorithm == "pattern":
        return solve_pdd_by_k_height(inst, mode=full, seed=policy.seed,
                                     epsilon=policy.epsilon)
    if algorithm == "d":
        return solve_pdd_by_d(inst, mode=full, seed=policy.seed,
                              epsilon=policy.epsilon)
    if algorithm == "cluster":
        m = find_modulator(inst.web, "cluster", policy.cluster_dmax)
        if m is None:
            raise PreconditionError("no small cluster modulator")
        return solve_spdd_by_cluster_modulator(inst, m.y)
    if algorithm == "cocluster":
        m = find_modulator(inst.web, "co-cluster", policy.cocluster_dmax)
        if m is None:
            raise PreconditionError("no small co-cluster modulator")
        return solve_pdd_by_cocluster_modulator(inst, m.y)
    if algorithm == "tw":
        return solve_spdd_by_treewidth(inst, decomposition,
                                       budget=policy.budget)
    if algorithm == "flow":
        return solve_pdd_source_separating_flow(inst)
    if algorithm == "outforest":
        return solve_pdd_outforest_by_kbar(inst, mode=full, seed=policy.seed,
                                           epsilon=policy.epsilon)
    raise PreconditionError(f"unknown algorithm {algorithm!r}")


def _lift_to_optimum(inst, algorithm, policy, decomposition=None):
    """Largest D with a yes answer, via monotone binary search.

    Returns (optimum or None, witness Solution or None).  The input D is
    ignored; every solver here decides 'PD >= D' exactly (or one-sided),
    and yes-instances stay yes as D decreases.
    """
    total = pd(inst.tree, inst.web.taxa)
    lo, hi = 1, total
    best = None
    # quick no-check at D = 1
    sol = _dispatch(inst.with_params(D=1), algorithm, policy, decomposition)
    if sol is None:
        return None, None
    best = (max(sol.value, 1), sol)
    lo = max(sol.value, 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        sol = _dispatch(inst.with_params(D=mid), algorithm, policy, decomposition)
        if sol is None:
            hi = mid - 1
        else:
            lo = max(mid, sol.value)
            best = (sol.value, sol)
    return best[0], best[1]


def portfolio_solve(inst, algorithm="auto", policy=None, optimum=False,
                    decomposition=None):
    """Solve and report; never raises on solver refusal (see RunRecord.error)."""
    policy = policy or PortfolioPolicy()
    t0 = time.time()
    digest = instance_digest(inst)
    reductions = []
    params = measure_parameters(inst, policy)
    chosen = algorithm
    err = None
    sol = None
    opt = None
    try:
        if algorithm == "auto":
            options = _estimates(inst, params, policy)
            if not options:
                raise BudgetExceededError("no applicable solver under budget")
            chosen = options[0][0]
        if optimum:
            if chosen == "oracle":
                sol = brute_force_optimum(inst)
                opt = sol.value if sol is not None else None
                if sol is not None and opt < inst.D:
                    sol = None  # decision itself is no
            else:
                opt, sol = _lift_to_optimum(inst, chosen, policy, decomposition)
                if sol is not None and opt < inst.D:
                    sol = None
        else:
            sol = _dispatch(inst, chosen, policy, decomposition)
    except PDDError as e:
        err = f"{type(e).__name__}: {e}"
    yes = sol is not None
    witness = sorted(sol.taxa) if yes else None
    value = sol.value if yes else None
    if yes:
        ok = (len(sol.taxa) <= inst.k and is_viable(inst.web, sol.taxa)
              and pd(inst.tree, sol.taxa) >= inst.D)
        if not ok:
            yes, witness, value = False, None, None
            err = "internal error: witness failed verification"
    return RunRecord(digest=digest, algorithm=chosen, mode=policy.mode,
                     seed=policy.seed, yes=yes, witness=witness, value=value,
                     optimum=opt, elapsed=time.time() - t0,
                     reductions=reductions, parameters=params, error=err)


def verify(inst, claimed):
    """Check a claimed solution predicate by predicate."""
    claimed = frozenset(claimed)
    unknown = claimed - inst.web.taxa
    cert = viability_certificate(inst.web, claimed) if not unknown else None
    value = pd(inst.tree, claimed & inst.tree.taxa)
    report = {
        "taxa_known": not unknown,
        "unknown": sorted(unknown),
        "size_ok": len(claimed) <= inst.k,
        "viable": cert is not None,
        "certificate": {m: (p or "") for m, p in cert.items()} if cert else None,
        "pd": value,
        "pd_ok": value >= inst.D,
    }
    report["ok"] = bool(report["taxa_known"] and report["size_ok"]
                        and report["viable"] and report["pd_ok"])
    return report
