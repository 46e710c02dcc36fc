"""Nice tree decompositions of the food web's underlying graph.

A nice decomposition has empty-bag leaves and root, and three inner
node kinds: introduce (adds one vertex to the child bag), forget
(removes one), and join (two children with identical bags).  The
dynamic program in `structural` walks these bottom-up.
"""

from .errors import DomainError


class NiceTreeDecomposition:
    """Rooted nice tree decomposition.

    Nodes are integer ids.  `kind[i]` is one of "leaf", "introduce",
    "forget", "join"; `bag[i]` a frozenset of graph vertices;
    `children[i]` a tuple of node ids; `vertex[i]` the introduced or
    forgotten vertex (None otherwise).
    """

    def __init__(self, kind, bag, children, vertex, root, graph_vertices, graph_edges):
        self.kind = list(kind)
        self.bag = [frozenset(b) for b in bag]
        self.children = [tuple(c) for c in children]
        self.vertex = list(vertex)
        self.root = root
        self.width = max((len(b) for b in self.bag), default=1) - 1
        validate_decomposition(self, graph_vertices, graph_edges)

    def __len__(self):
        return len(self.kind)

    def postorder(self):
        """Node ids, children before parents, iterative."""
        out = []
        stack = [(self.root, False)]
        while stack:
            t, done = stack.pop()
            if done:
                out.append(t)
            else:
                stack.append((t, True))
                for c in self.children[t]:
                    stack.append((c, False))
        return out


def validate_decomposition(dec, vertices, edges):
    """Check the three decomposition axioms plus the niceness shape."""
    n = len(dec.kind)
    if not (0 <= dec.root < n):
        raise DomainError("bad root id")
    seen = [False] * n
    order = dec.postorder()
    if len(order) != n or len(set(order)) != n:
        raise DomainError("decomposition nodes are not a tree")
    for t in range(n):
        kind = dec.kind[t]
        kids = dec.children[t]
        if kind == "leaf":
            if kids or dec.bag[t]:
                raise DomainError("leaf nodes must have empty bags and no children")
        elif kind == "introduce":
            if len(kids) != 1:
                raise DomainError("introduce nodes have one child")
            v = dec.vertex[t]
            if v is None or v in dec.bag[kids[0]] or dec.bag[t] != dec.bag[kids[0]] | {v}:
                raise DomainError("introduce node bag mismatch")
        elif kind == "forget":
            if len(kids) != 1:
                raise DomainError("forget nodes have one child")
            v = dec.vertex[t]
            if v is None or v not in dec.bag[kids[0]] or dec.bag[t] != dec.bag[kids[0]] - {v}:
                raise DomainError("forget node bag mismatch")
        elif kind == "join":
            if len(kids) != 2:
                raise DomainError("join nodes have two children")
            if dec.bag[t] != dec.bag[kids[0]] or dec.bag[t] != dec.bag[kids[1]]:
                raise DomainError("join node bags must match both children")
        else:
            raise DomainError(f"unknown node kind {kind!r}")
    if dec.bag[dec.root]:
        raise DomainError("root bag must be empty")
    occ = {}  # vertex -> set of node ids whose bag contains it
    for t in range(n):
        for v in dec.bag[t]:
            occ.setdefault(v, set()).add(t)
    missing = set(vertices) - set(occ)
    if missing:
        raise DomainError(f"vertices missing from all bags: {sorted(missing)}")
    if set(occ) - set(vertices):
        raise DomainError("bags mention unknown vertices")
    for u, v in edges:
        a, b = occ[u], occ[v]
        if len(b) < len(a):
            a, b = b, a
        if not any(t in b for t in a):
            raise DomainError(f"edge {u}-{v} not covered by any bag")
    # connectivity: occurrences of each vertex form one subtree, i.e. for
    # each vertex (#occurrence nodes) - (#tree edges between them) == 1
    for v, nodes in occ.items():
        links = 0
        for t in nodes:
            for c in dec.children[t]:
                if c in nodes:
                    links += 1
        if len(nodes) - links != 1:
            raise DomainError(f"occurrences of {v!r} are disconnected")
    return True


class _Builder:
    def __init__(self):
        self.kind = []
        self.bag = []
        self.children = []
        self.vertex = []

    def add(self, kind, bag, children=(), vertex=None):
        self.kind.append(kind)
        self.bag.append(frozenset(bag))
        self.children.append(tuple(children))
        self.vertex.append(vertex)
        return len(self.kind) - 1

    def intro_chain(self, bag):
        """Leaf, then introduce the bag's members one by one; returns top id."""
        t = self.add("leaf", ())
        cur = []
        for v in sorted(bag):
            cur.append(v)
            t = self.add("introduce", cur, (t,), v)
        return t

    def transition(self, t, frm, to):
        """Forget frm \\ to then introduce to \\ frm above node t."""
        cur = set(frm)
        for v in sorted(frm - to):
            cur.discard(v)
            t = self.add("forget", cur, (t,), v)
        for v in sorted(to - frm):
            cur.add(v)
            t = self.add("introduce", cur, (t,), v)
        return t


def _nicify(bags, tree_children, tree_root, vertices, edges):
    """Turn an arbitrary rooted tree decomposition into a nice one."""
    b = _Builder()

    def build(t):
        bag = frozenset(bags[t])
        kids = tree_children.get(t, ())
        if not kids:
            return b.intro_chain(bag)
        tops = []
        for c in kids:
            tc = build(c)
            tops.append(b.transition(tc, frozenset(bags[c]), bag))
        while len(tops) > 1:
            right = tops.pop()
            left = tops.pop()
            tops.append(b.add("join", bag, (left, right)))
        return tops[0]

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * len(bags) + 100))
    try:
        top = build(tree_root)
    finally:
        sys.setrecursionlimit(old)
    root_bag = set(bags[tree_root])
    t = top
    for v in sorted(root_bag):
        root_bag.discard(v)
        t = b.add("forget", root_bag, (t,), v)
    return NiceTreeDecomposition(b.kind, b.bag, b.children, b.vertex, t,
                                 vertices, edges)


def _forest_decomposition(vertices, adj):
    """Width-1 decomposition of a forest: one bag per edge, one per root."""
    bags = []
    children = {}
    verts = sorted(vertices)
    visited = set()
    comp_roots = []
    node_of = {}
    for r in verts:
        if r in visited:
            continue
        # BFS the component, bag {v, parent} per vertex
        visited.add(r)
        rid = len(bags)
        bags.append({r})
        node_of[r] = rid
        comp_roots.append(rid)
        queue = [r]
        while queue:
            u = queue.pop()
            for w in sorted(adj[u]):
                if w in visited:
                    continue
                visited.add(w)
                wid = len(bags)
                bags.append({u, w})
                node_of[w] = wid
                children.setdefault(node_of[u], []).append(wid)
                queue.append(w)
    # Link components under the first root via empty connector bags.
    if not comp_roots:
        bags.append(set())
        comp_roots.append(0)
    root = comp_roots[0]
    if len(comp_roots) > 1:
        connector = len(bags)
        bags.append(set())
        children[connector] = list(comp_roots)
        root = connector
    return bags, children, root


def _min_fill_decomposition(vertices, adj):
    """Heuristic decomposition from a min-fill elimination order."""
    verts = sorted(vertices)
    nbr = {v: set(adj[v]) for v in verts}
    order = []
    bag_of = {}
    remaining = set(verts)
    while remaining:
        best_v, best_fill = None, None
        for v in sorted(remaining):
            nv = nbr[v] & remaining
            fill = 0
            nvl = sorted(nv)
            for i in range(len(nvl)):
                for j in range(i + 1, len(nvl)):
                    if nvl[j] not in nbr[nvl[i]]:
                        fill += 1
            if best_fill is None or fill < best_fill:
                best_v, best_fill = v, fill
        v = best_v
        nv = nbr[v] & remaining
        bag_of[v] = {v} | nv
        nvl = sorted(nv)
        for i in range(len(nvl)):
            for j in range(i + 1, len(nvl)):
                nbr[nvl[i]].add(nvl[j])
                nbr[nvl[j]].add(nvl[i])
        order.append(v)
        remaining.discard(v)
    # Bag tree: parent of v's bag is the bag of its earliest-later neighbor.
    pos = {v: i for i, v in enumerate(order)}
    bags = []
    node_of = {}
    children = {}
    for v in reversed(order):
        node_of[v] = len(bags)
        bags.append(bag_of[v])
    root = 0
    for v in order:
        later = [w for w in bag_of[v] if w != v and pos[w] > pos[v]]
        if later:
            p = min(later, key=lambda w: pos[w])
            children.setdefault(node_of[p], []).append(node_of[v])
        elif node_of[v] != root:
            # component exhausted before the globally last vertex: hang its
            # bag under the root
            children.setdefault(root, []).append(node_of[v])
    return bags, children, root


def build_nice_tree_decomposition(web_or_adj, width_hint=None):
    """Build a validated nice decomposition of the underlying graph.

    Accepts a FoodWeb or a dict vertex -> neighbor set.  Forests get the
    exact width-1 construction; anything else goes through a min-fill
    elimination order (width may exceed the optimum but validity always
    holds).  `width_hint` is advisory only.
    """
    if hasattr(web_or_adj, "underlying_adjacency"):
        adj = web_or_adj.underlying_adjacency()
    else:
        adj = {v: set(ns) for v, ns in web_or_adj.items()}
    vertices = sorted(adj)
    edges = sorted({tuple(sorted((u, w))) for u in adj for w in adj[u]})
    m = len(edges)
    n = len(vertices)
    is_forest = True
    # forest iff every component has |E| = |V| - 1; equivalently acyclic
    seen = set()
    for r in vertices:
        if r in seen:
            continue
        comp_v = 0
        comp_deg = 0
        stack = [r]
        seen.add(r)
        while stack:
            u = stack.pop()
            comp_v += 1
            comp_deg += len(adj[u])
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if comp_deg // 2 != comp_v - 1:
            is_forest = False
            break
    if is_forest:
        bags, children, root = _forest_decomposition(vertices, adj)
    else:
        bags, children, root = _min_fill_decomposition(vertices, adj)
    return _nicify(bags, children, root, vertices, edges)


def parse_decomposition(text, web):
    """Parse an externally supplied nice decomposition.

    One node per line: `id kind children bag` where `children` is a
    comma-separated list of ids (or `-`), `bag` a comma-separated list
    of taxa (or `-`), and `kind` one of leaf/introduce/forget/join with
    introduce/forget carrying the vertex as `kind:taxon`.  Lines
    starting with `#` are ignored.  The last listed node is the root.
    """
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise DomainError(f"bad decomposition line: {line!r}")
        try:
            nid = int(parts[0])
            kids = () if parts[2] == "-" else tuple(
                int(x) for x in parts[2].split(","))
        except ValueError:
            raise DomainError(f"bad decomposition line: {line!r}")
        kind = parts[1]
        vertex = None
        if ":" in kind:
            kind, vertex = kind.split(":", 1)
        bag = () if parts[3] == "-" else tuple(parts[3].split(","))
        rows.append((nid, kind, kids, bag, vertex))
    if not rows:
        raise DomainError("empty decomposition")
    ids = [r[0] for r in rows]
    if sorted(ids) != list(range(len(rows))):
        raise DomainError("node ids must be 0..n-1")
    kind = [None] * len(rows)
    bag = [None] * len(rows)
    children = [None] * len(rows)
    vertex = [None] * len(rows)
    for nid, kd, kids, bg, vx in rows:
        kind[nid] = kd
        bag[nid] = frozenset(bg)
        children[nid] = kids
        vertex[nid] = vx
    root = rows[-1][0]
    adj = web.underlying_adjacency()
    edges = sorted({tuple(sorted((u, w))) for u in adj for w in adj[u]})
    return NiceTreeDecomposition(kind, bag, children, vertex, root,
                                 sorted(adj), edges)


def format_decomposition(dec):
    """Inverse of parse_decomposition, root last."""
    order = dec.postorder()
    lines = []
    for t in order:
        kd = dec.kind[t]
        if dec.vertex[t] is not None:
            kd = f"{kd}:{dec.vertex[t]}"
        kids = ",".join(str(c) for c in dec.children[t]) or "-"
        bg = ",".join(sorted(dec.bag[t])) or "-"
        lines.append(f"{t} {kd} {kids} {bg}")
    return "\n".join(lines) + "\n"
