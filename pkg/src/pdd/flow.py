"""Min-cost flow and the flow-based solver for sparse food webs.

Applies when the food web splits into tiny components (at most one arc
each) and the surviving predators' tree lives apart from the sources'
tree except at the root.  The solver builds a small network whose
min-cost flows encode which taxa to save.
"""

import heapq

from .core import Solution, pd, is_viable, spanning_subtree
from .errors import PreconditionError


class FlowNetwork:
    """Directed network with capacities and signed integer costs.

    Parallel arcs are allowed.  Arcs are stored twice (forward and
    residual) in adjacency lists.
    """

    def __init__(self, source, sink):
        self.source = source
        self.sink = sink
        self.adj = {}  # vertex -> list of arc indices
        # arc arrays: to, cap, cost, flow; arc i^1 is the residual twin
        self.to = []
        self.cap = []
        self.cost = []
        self.flow = []
        self.add_vertex(source)
        self.add_vertex(sink)

    def add_vertex(self, v):
        if v not in self.adj:
            self.adj[v] = []

    def add_arc(self, u, v, cap, cost):
        if cap < 0:
            raise ValueError("negative capacity")
        self.add_vertex(u)
        self.add_vertex(v)
        i = len(self.to)
        self.to.append(v)
        self.cap.append(cap)
        self.cost.append(cost)
        self.flow.append(0)
        self.adj[u].append(i)
        self.to.append(u)
        self.cap.append(0)
        self.cost.append(-cost)
        self.flow.append(0)
        self.adj[v].append(i + 1)
        return i

    def arc_flow(self, i):
        return self.flow[i]


def min_cost_flow(net, value):
    """Send exactly `value` units source->sink at minimum total cost.

    Successive shortest augmenting paths with vertex potentials;
    initial potentials come from a negative-cost-tolerant relaxation
    pass (Bellman-Ford) since arcs may carry negative costs.  Returns
    (cost, net) or None if `value` is not achievable.
    """
    if value < 0:
        raise ValueError("negative flow value")
    # work on integer vertex ids; dict lookups dominate otherwise
    verts = list(net.adj)
    idx = {v: j for j, v in enumerate(verts)}
    nv = len(verts)
    cap, flow, cost = net.cap, net.flow, net.cost
    to = [idx[v] for v in net.to]
    adj = [net.adj[v] for v in verts]
    src, snk = idx[net.source], idx[net.sink]
    INF = float("inf")
    # Bellman-Ford from the source over arcs with residual capacity.
    dist = [INF] * nv
    dist[src] = 0
    for it in range(nv):
        changed = False
        for u in range(nv):
            du = dist[u]
            if du == INF:
                continue
            for i in adj[u]:
                if cap[i] - flow[i] <= 0:
                    continue
                w = to[i]
                nd = du + cost[i]
                if nd < dist[w]:
                    dist[w] = nd
                    changed = True
        if not changed:
            break
    else:
        if changed:
            raise PreconditionError("negative-cost cycle in flow network")
    pot = [d if d != INF else 0 for d in dist]

    sent = 0
    total = 0
    while sent < value:
        # Dijkstra on reduced costs.
        dist = [INF] * nv
        prev = [-1] * nv
        dist[src] = 0
        pq = [(0, src)]
        while pq:
            d, u = heapq.heappop(pq)
            if d > dist[u]:
                continue
            if u == snk:
                break
            pu = pot[u]
            for i in adj[u]:
                if cap[i] - flow[i] <= 0:
                    continue
                w = to[i]
                nd = d + cost[i] + pu - pot[w]
                if nd < dist[w]:
                    dist[w] = nd
                    prev[w] = i
                    heapq.heappush(pq, (nd, w))
        dsnk = dist[snk]
        if dsnk == INF:
            return None
        # the sink was settled early; clamping at its distance keeps the
        # reduced costs of the still-tentative vertices nonnegative
        for v in range(nv):
            dv = dist[v]
            pot[v] += dv if dv < dsnk else dsnk
        # Push along zero-reduced-cost paths until stuck, so one Dijkstra
        # serves many unit augmentations.
        while sent < value:
            prev = [-1] * nv
            seen = [False] * nv
            seen[src] = True
            stack = [src]
            while stack and not seen[snk]:
                u = stack.pop()
                pu = pot[u]
                for i in adj[u]:
                    if cap[i] - flow[i] <= 0:
                        continue
                    w = to[i]
                    if seen[w] or cost[i] + pu - pot[w] != 0:
                        continue
                    seen[w] = True
                    prev[w] = i
                    if w == snk:
                        break
                    stack.append(w)
            if not seen[snk]:
                break
            push = value - sent
            v = snk
            while v != src:
                i = prev[v]
                push = min(push, cap[i] - flow[i])
                v = to[i ^ 1]
            v = snk
            while v != src:
                i = prev[v]
                flow[i] += push
                flow[i ^ 1] -= push
                total += push * cost[i]
                v = to[i ^ 1]
            sent += push
    return total, net


def is_source_separating(inst):
    """True when predators' and sources' spanning subtrees share only the root.

    Also requires every food-web component to have at most one arc.
    """
    web = inst.web
    deg = {x: 0 for x in web.taxa}
    for x, y in web.arcs():
        deg[x] += 1
        deg[y] += 1
    if any(d > 1 for d in deg.values()):
        return False
    preds = sorted(x for x in web.taxa if x not in web.sources)
    srcs = sorted(web.sources)
    if not preds or not srcs:
        return True
    tp = spanning_subtree(inst.tree, preds)
    ts = spanning_subtree(inst.tree, srcs)
    shared = (set(tp.vertices) & set(ts.vertices)) - {inst.tree.root}
    return not shared


def _build_network(inst, kprime, pred_tree, src_tree):
    """Flow gadget for a fixed number kprime of saved predators."""
    tree = inst.tree
    web = inst.web
    k = inst.k
    net = FlowNetwork(("s",), ("t",))
    root_pred = ("p", tree.root)
    root_src = ("q", tree.root)
    nu = ("nu",)
    net.add_arc(("s",), root_pred, kprime, 0)
    net.add_arc(("s",), nu, k - 2 * kprime, 0)
    edge_arcs = []
    # Predator-side tree edges point away from the root; each edge is
    # doubled: one unit at cost -weight, the rest free.
    for child in pred_tree.parent:
        par = pred_tree.parent[child]
        w = tree.weight.get(child, 0)
        a = net.add_arc(("p", par), ("p", child), 1, -w)
        net.add_arc(("p", par), ("p", child), max(k - 1, 0), 0)
        edge_arcs.append(("p", child, a))
    # Source-side tree edges point toward the root (then to the sink).
    for child in src_tree.parent:
        par = src_tree.parent[child]
        w = tree.weight.get(child, 0)
        a = net.add_arc(("q", child), ("q", par), 1, -w)
        net.add_arc(("q", child), ("q", par), max(k - 1, 0), 0)
        edge_arcs.append(("q", child, a))
    net.add_arc(root_src, ("t",), k, 0)
    # nu feeds every source directly.
    for x in sorted(web.sources):
        if ("q", x) in net.adj:
            net.add_arc(nu, ("q", x), k, 0)
    # Each web arc lets one saved predator route through its prey.
    for x, y in web.arcs():
        if ("p", y) in net.adj and ("q", x) in net.adj:
            net.add_arc(("p", y), ("q", x), 1, 0)
    return net, edge_arcs


def solve_pdd_source_separating_flow(inst):
    """Decide the instance via min-cost flow; returns Solution or None."""
    if not is_source_separating(inst):
        raise PreconditionError("instance is not source-separating")
    web = inst.web
    tree = inst.tree
    k = min(inst.k, inst.n)
    if inst.D <= 0:
        return Solution(frozenset(), 0, {"method": "flow", "trivial": True})
    if k <= 0:
        return None
    preds = sorted(x for x in web.taxa if x not in web.sources)
    srcs = sorted(web.sources)
    if not srcs:
        return None
    pred_tree = spanning_subtree(tree, preds + [tree.root]) if preds else None
    src_tree = spanning_subtree(tree, srcs + [tree.root])
    best = None
    for kprime in range(0, k // 2 + 1):
        if kprime > 0 and pred_tree is None:
            break
        if pred_tree is None:
            # No predators: use an empty predator side.
            net = FlowNetwork(("s",), ("t",))
            nu = ("nu",)
            net.add_arc(("s",), nu, k - 2 * kprime, 0)
            edge_arcs = []
            for child in src_tree.parent:
                par = src_tree.parent[child]
                w = tree.weight.get(child, 0)
                a = net.add_arc(("q", child), ("q", par), 1, -w)
                net.add_arc(("q", child), ("q", par), max(k - 1, 0), 0)
                edge_arcs.append(("q", child, a))
            net.add_arc(("q", tree.root), ("t",), k, 0)
            for x in srcs:
                net.add_arc(nu, ("q", x), k, 0)
        else:
            net, edge_arcs = _build_network(inst, kprime, pred_tree, src_tree)
        res = min_cost_flow(net, k - kprime)
        if res is None:
            continue
        cost, netf = res
        if cost <= -inst.D:
            # A taxon is saved when flow passes through its leaf copy:
            # into ("p",x) for predators, into ("q",x) for sources.
            inflow = {}
            for u in netf.adj:
                for i in netf.adj[u]:
                    if i % 2 == 0 and netf.flow[i] > 0:
                        v = netf.to[i]
                        inflow[v] = inflow.get(v, 0) + netf.flow[i]
            sel = set()
            for x in tree.taxa:
                if x not in web.sources and inflow.get(("p", x), 0) > 0:
                    sel.add(x)
                if x in web.sources and inflow.get(("q", x), 0) > 0:
                    sel.add(x)
            sel = frozenset(sel)
            if len(sel) <= inst.k and is_viable(web, sel) and pd(tree, sel) >= inst.D:
                return Solution(sel, pd(tree, sel), {"method": "flow", "kprime": kprime})
    return None
