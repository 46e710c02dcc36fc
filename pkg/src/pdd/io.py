"""Instance text format and Newick parsing.

An instance file is section-tagged, whitespace-insensitive text:

    # anything after '#' that is not a section tag is a comment
    #tree
    ((a:4,b:2)u:1,c:7)r;
    #web
    a b
    #params k=2 D=8

The tree section holds one Newick string with integer branch lengths, the web
section one ``prey predator`` pair per line, and params the two integers.
"""

from __future__ import annotations

from .core import FoodWeb, Instance, PhyloTree
from .errors import DomainError

_SECTIONS = ("tree", "web", "params")


def parse_newick(text: str) -> PhyloTree:
    text = text.strip()
    if not text.endswith(";"):
        raise DomainError("Newick string must end with ';'")
    s = text[:-1]
    pos = 0
    fresh = iter(range(1, 10 ** 9))
    parent: dict[str, str] = {}
    weight: dict[str, int] = {}
    used: set[str] = set()

    def parse_name() -> str:
        nonlocal pos
        if pos < len(s) and s[pos] == "'":
            pos += 1
            out = []
            while pos < len(s):
                if s[pos] == "'":
                    if pos + 1 < len(s) and s[pos + 1] == "'":
                        out.append("'")
                        pos += 2
                        continue
                    pos += 1
                    return "".join(out)
                out.append(s[pos])
                pos += 1
            raise DomainError("unterminated quoted name")
        start = pos
        while pos < len(s) and s[pos] not in "(),:;":
            pos += 1
        return s[start:pos].strip()

    def parse_length() -> int:
        nonlocal pos
        if pos >= len(s) or s[pos] != ":":
            raise DomainError("every non-root vertex needs ':<int>' length")
        pos += 1
        start = pos
        while pos < len(s) and (s[pos].isdigit() or s[pos] == "-"):
            pos += 1
        tok = s[start:pos]
        if not tok or not tok.lstrip("-").isdigit():
            raise DomainError(f"bad branch length near position {start}")
        return int(tok)

    def parse_clade() -> str:
        nonlocal pos
        children = []
        if pos < len(s) and s[pos] == "(":
            pos += 1
            while True:
                children.append(parse_subtree())
                if pos < len(s) and s[pos] == ",":
                    pos += 1
                    continue
                if pos < len(s) and s[pos] == ")":
                    pos += 1
                    break
                raise DomainError(f"unbalanced Newick near position {pos}")
        name = parse_name()
        if not name:
            name = f"_v{next(fresh)}"
        if name in used:
            raise DomainError(f"duplicate vertex name {name!r}")
        used.add(name)
        for c in children:
            parent[c] = name
        return name

    def parse_subtree() -> str:
        name = parse_clade()
        weight[name] = parse_length()
        return name

    root = parse_clade()
    if pos != len(s):
        raise DomainError(f"trailing Newick characters at position {pos}")
    return PhyloTree(root, parent, {v: weight[v] for v in parent})


def format_newick(tree: PhyloTree) -> str:
    def label(v: str) -> str:
        if any(c in "(),:;'" or c.isspace() for c in v):
            return "'" + v.replace("'", "''") + "'"
        return v

    def fmt(v: str) -> str:
        cs = tree.children[v]
        inner = f"({','.join(fmt(c) for c in cs)})" if cs else ""
        length = f":{tree.weight[v]}" if v != tree.root else ""
        return f"{inner}{label(v)}{length}"

    return fmt(tree.root) + ";"


def parse_instance(text: str) -> Instance:
    section = None
    newick_parts: list[str] = []
    arcs: list[tuple[str, str]] = []
    params: dict[str, int] = {}

    def take_params(tokens: list[str]) -> None:
        for tok in tokens:
            if "=" not in tok:
                raise DomainError(f"bad params token {tok!r}")
            key, val = tok.split("=", 1)
            key = key.strip()
            if key not in ("k", "D"):
                raise DomainError(f"unknown parameter {key!r}")
            try:
                params[key] = int(val)
            except ValueError:
                raise DomainError(f"parameter {key} must be an integer")

    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            tokens = line[1:].split()
            if tokens and tokens[0] in _SECTIONS:
                section = tokens[0]
                if section == "params":
                    take_params(tokens[1:])
            # otherwise: comment
            continue
        if section == "tree":
            newick_parts.append(line)
        elif section == "web":
            pair = line.split()
            if len(pair) != 2:
                raise DomainError(f"web line needs 'prey predator': {line!r}")
            arcs.append((pair[0], pair[1]))
        elif section == "params":
            take_params(line.split())
        else:
            raise DomainError(f"content before any section tag: {line!r}")

    if not newick_parts:
        raise DomainError("missing #tree section")
    if "k" not in params or "D" not in params:
        raise DomainError("missing k or D in #params")
    tree = parse_newick(" ".join(newick_parts))
    web = FoodWeb.from_arcs(tree.taxa, arcs)
    return Instance(tree, web, params["k"], params["D"])


def format_instance(inst: Instance) -> str:
    lines = ["#tree", format_newick(inst.tree), "#web"]
    lines += [f"{x} {y}" for x, y in inst.web.arcs()]
    lines.append(f"#params k={inst.k} D={inst.D}")
    return "\n".join(lines) + "\n"
