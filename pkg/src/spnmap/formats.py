"""Line-oriented text formats.

Network documents::

    # comment
    spn <node-count>
    node <id> sum
    node <id> prod
    node <id> leaf <var> <p0> <p1> ...
    edge <parent> <child> [weight]
    root <id>

The ``spn`` header comes first and must match the number of ``node`` lines.
Edges carry a weight exactly when the parent is a sum node, children keep
their edge-line order, and ``root`` defaults to node 0.  Graphs use a
``graph <n>`` header with 1-indexed ``edge <u> <v>`` lines; formulas use
DIMACS CNF.  Every parser reports 1-based line numbers and rejects trailing
garbage.
"""

from __future__ import annotations

import math
import warnings
from typing import Iterator

from .network import LeafNode, Network, Node, ProductNode, SumNode
from .reductions import CnfFormula, Graph


class ParseError(ValueError):
    """A syntax or consistency error at a specific input line."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


def _content_lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(lineno, f"{what} must be an integer, got {token!r}") from None


def _parse_float(token: str, lineno: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(lineno, f"{what} must be a number, got {token!r}") from None
    if not math.isfinite(value):
        raise ParseError(lineno, f"{what} must be finite, got {token!r}")
    return value


def parse_spn(text: str) -> Network:
    """Parse a network document; structural semantics are left to ``validate``."""
    header_line = None
    declared_count = None
    kinds: dict[int, tuple[str, int]] = {}
    leaf_specs: dict[int, tuple[int, tuple[float, ...]]] = {}
    edges: list[tuple[int, int, float | None, int]] = []
    root_id: int | None = None
    root_line: int | None = None

    for lineno, tokens in _content_lines(text):
        directive = tokens[0]
        if directive == "spn":
            if header_line is not None:
                raise ParseError(lineno, "duplicate spn header")
            if kinds or edges or root_id is not None:
                raise ParseError(lineno, "spn header must be the first directive")
            if len(tokens) != 2:
                raise ParseError(lineno, "expected: spn <node-count>")
            declared_count = _parse_int(tokens[1], lineno, "node count")
            header_line = lineno
        elif directive == "node":
            if header_line is None:
                raise ParseError(lineno, "missing spn header")
            if len(tokens) < 3:
                raise ParseError(lineno, "expected: node <id> <kind> ...")
            nid = _parse_int(tokens[1], lineno, "node id")
            if nid in kinds:
                raise ParseError(lineno, f"duplicate node id {nid}")
            kind = tokens[2]
            if kind in ("sum", "prod"):
                if len(tokens) != 3:
                    raise ParseError(lineno, f"unexpected tokens after {kind} node")
                kinds[nid] = (kind, lineno)
            elif kind == "leaf":
                if len(tokens) < 6:
                    raise ParseError(
                        lineno, "leaf needs a variable and at least two probabilities"
                    )
                var = _parse_int(tokens[3], lineno, "variable index")
                if var < 0:
                    raise ParseError(lineno, f"variable index must be nonnegative, got {var}")
                probs = tuple(
                    _parse_float(tok, lineno, "probability") for tok in tokens[4:]
                )
                kinds[nid] = (kind, lineno)
                leaf_specs[nid] = (var, probs)
            else:
                raise ParseError(lineno, f"unknown node kind {kind!r}")
        elif directive == "edge":
            if header_line is None:
                raise ParseError(lineno, "missing spn header")
            if len(tokens) not in (3, 4):
                raise ParseError(lineno, "expected: edge <parent> <child> [weight]")
            parent = _parse_int(tokens[1], lineno, "parent id")
            child = _parse_int(tokens[2], lineno, "child id")
            weight = _parse_float(tokens[3], lineno, "weight") if len(tokens) == 4 else None
            edges.append((parent, child, weight, lineno))
        elif directive == "root":
            if header_line is None:
                raise ParseError(lineno, "missing spn header")
            if root_id is not None:
                raise ParseError(lineno, "duplicate root directive")
            if len(tokens) != 2:
                raise ParseError(lineno, "expected: root <id>")
            root_id = _parse_int(tokens[1], lineno, "root id")
            root_line = lineno
        else:
            raise ParseError(lineno, f"unknown directive {directive!r}")

    if header_line is None:
        raise ParseError(1, "missing spn header")
    if declared_count != len(kinds):
        raise ParseError(
            header_line,
            f"header declares {declared_count} nodes, found {len(kinds)}",
        )

    children: dict[int, list[int]] = {nid: [] for nid in kinds}
    weights: dict[int, list[float]] = {nid: [] for nid in kinds}
    for parent, child, weight, lineno in edges:
        if parent not in kinds:
            raise ParseError(lineno, f"edge from undeclared node {parent}")
        if child not in kinds:
            raise ParseError(lineno, f"edge to undeclared node {child}")
        kind, _ = kinds[parent]
        if kind == "leaf":
            raise ParseError(lineno, "leaf nodes cannot have children")
        if kind == "sum":
            if weight is None:
                raise ParseError(lineno, "edges under a sum node require a weight")
            weights[parent].append(weight)
        elif weight is not None:
            raise ParseError(lineno, "edges under a product node must not carry a weight")
        children[parent].append(child)

    nodes: dict[int, Node] = {}
    for nid, (kind, lineno) in kinds.items():
        if kind == "leaf":
            var, probs = leaf_specs[nid]
            nodes[nid] = LeafNode(var, probs)
        elif kind == "sum":
            if not children[nid]:
                raise ParseError(lineno, f"sum node {nid} has no children")
            nodes[nid] = SumNode(tuple(children[nid]), tuple(weights[nid]))
        else:
            if not children[nid]:
                raise ParseError(lineno, f"product node {nid} has no children")
            nodes[nid] = ProductNode(tuple(children[nid]))

    if root_id is None:
        root_id = 0
    if root_id not in nodes:
        raise ParseError(root_line or header_line, f"root {root_id} is not a declared node")

    cards: dict[int, tuple[int, int]] = {}
    for nid, (var, probs) in leaf_specs.items():
        _, lineno = kinds[nid]
        previous = cards.get(var)
        if previous is not None and previous[0] != len(probs):
            raise ParseError(
                lineno,
                f"leaf disagrees on the cardinality of variable {var} "
                f"(line {previous[1]} says {previous[0]})",
            )
        cards.setdefault(var, (len(probs), lineno))
    if not cards or sorted(cards) != list(range(len(cards))):
        raise ParseError(header_line, "leaf variables must cover 0..n-1 with no gaps")

    return Network.from_nodes(nodes, root_id)


def serialize_spn(network: Network) -> str:
    """Render a network document that parses back to an equivalent network."""
    lines = [f"spn {len(network.nodes)}"]
    for nid in sorted(network.nodes):
        node = network.nodes[nid]
        if isinstance(node, LeafNode):
            probs = " ".join(format(p, ".17g") for p in node.distribution)
            lines.append(f"node {nid} leaf {node.variable} {probs}")
        elif isinstance(node, SumNode):
            lines.append(f"node {nid} sum")
        else:
            lines.append(f"node {nid} prod")
    for nid in sorted(network.nodes):
        node = network.nodes[nid]
        if isinstance(node, SumNode):
            for child, weight in zip(node.children, node.weights):
                lines.append(f"edge {nid} {child} {format(weight, '.17g')}")
        elif isinstance(node, ProductNode):
            for child in node.children:
                lines.append(f"edge {nid} {child}")
    lines.append(f"root {network.root}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    """Parse a ``graph <n>`` document with 1-indexed ``edge <u> <v>`` lines.

    Duplicate edges collapse with a warning; self loops are errors.
    """
    n: int | None = None
    edges: set[tuple[int, int]] = set()
    for lineno, tokens in _content_lines(text):
        directive = tokens[0]
        if directive == "graph":
            if n is not None:
                raise ParseError(lineno, "duplicate graph header")
            if len(tokens) != 2:
                raise ParseError(lineno, "expected: graph <n>")
            n = _parse_int(tokens[1], lineno, "vertex count")
            if n < 0:
                raise ParseError(lineno, f"vertex count must be nonnegative, got {n}")
        elif directive == "edge":
            if n is None:
                raise ParseError(lineno, "missing graph header")
            if len(tokens) != 3:
                raise ParseError(lineno, "expected: edge <u> <v>")
            u = _parse_int(tokens[1], lineno, "vertex")
            v = _parse_int(tokens[2], lineno, "vertex")
            if u == v:
                raise ParseError(lineno, f"self loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(lineno, f"edge ({u}, {v}) leaves the range 1..{n}")
            edge = (min(u, v) - 1, max(u, v) - 1)
            if edge in edges:
                warnings.warn(
                    f"line {lineno}: duplicate edge ({u}, {v}) collapsed", stacklevel=2
                )
            edges.add(edge)
        else:
            raise ParseError(lineno, f"unknown directive {directive!r}")
    if n is None:
        raise ParseError(1, "missing graph header")
    return Graph.from_edges(n, edges)


def serialize_graph(graph: Graph) -> str:
    lines = [f"graph {graph.n}"]
    for u, v in sorted(graph.edges):
        lines.append(f"edge {u + 1} {v + 1}")
    return "\n".join(lines) + "\n"


def parse_dimacs_cnf(text: str) -> CnfFormula:
    """Parse DIMACS CNF; clauses must hold exactly three distinct variables."""
    n = m = None
    clauses: list[tuple[int, int, int]] = []
    current: list[int] = []
    last_line = 1
    for lineno, tokens in _content_lines_dimacs(text):
        last_line = lineno
        if tokens[0] == "p":
            if n is not None:
                raise ParseError(lineno, "duplicate problem line")
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise ParseError(lineno, "expected: p cnf <variables> <clauses>")
            n = _parse_int(tokens[2], lineno, "variable count")
            m = _parse_int(tokens[3], lineno, "clause count")
            if n < 1 or m < 1:
                raise ParseError(lineno, "variable and clause counts must be positive")
            continue
        if n is None:
            raise ParseError(lineno, "clause before the problem line")
        for token in tokens:
            literal = _parse_int(token, lineno, "literal")
            if len(clauses) == m:
                raise ParseError(lineno, f"more clauses than the declared {m}")
            if literal == 0:
                if len(current) != 3:
                    raise ParseError(
                        lineno, f"clause must have exactly 3 literals, got {len(current)}"
                    )
                clauses.append(tuple(current))
                current = []
                continue
            if abs(literal) > n:
                raise ParseError(lineno, f"literal {literal} exceeds variable count {n}")
            current.append(literal)
    if n is None:
        raise ParseError(1, "missing problem line")
    if current:
        raise ParseError(last_line, "unterminated clause at end of input")
    if len(clauses) != m:
        raise ParseError(last_line, f"expected {m} clauses, found {len(clauses)}")
    try:
        return CnfFormula(n, tuple(clauses))
    except ValueError as exc:
        raise ParseError(last_line, str(exc)) from None


def _content_lines_dimacs(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        yield lineno, line.split()


def parse_evidence(text: str) -> dict[int, int]:
    """Parse ``index=value`` pairs separated by commas; empty input is empty evidence."""
    text = text.strip()
    if not text:
        return {}
    evidence: dict[int, int] = {}
    for item in text.split(","):
        item = item.strip()
        if "=" not in item:
            raise ParseError(1, f"expected index=value, got {item!r}")
        left, right = item.split("=", 1)
        var = _parse_int(left.strip(), 1, "variable index")
        cat = _parse_int(right.strip(), 1, "category")
        if var < 0:
            raise ParseError(1, f"variable index must be nonnegative, got {var}")
        if cat < 0:
            raise ParseError(1, f"category must be nonnegative, got {cat}")
        if var in evidence:
            raise ParseError(1, f"duplicate variable {var} in evidence")
        evidence[var] = cat
    return evidence
