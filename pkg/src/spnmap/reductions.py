"""Compile combinatorial problems into sum-product networks.

Maximum-independent-set instances become height-2 networks whose MAP value
is ``|largest independent set| / c`` for an exactly computed integer
normalizer ``c``; 3-CNF formulas become networks whose MAP value reaches a
rational threshold exactly when the formula is satisfiable.  ``amplify``
raises the MAP value to the q-th power by multiplying disjoint copies,
which widens the gap between exact and approximate solvers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .network import LeafNode, Network, Node, ProductNode, SumNode, Variable


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"vertex count must be nonnegative, got {self.n}")
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) leaves the vertex range")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges))

    def neighbors(self, vertex: int) -> frozenset[int]:
        return frozenset(
            v if u == vertex else u for u, v in self.edges if vertex in (u, v)
        )


@dataclass(frozen=True)
class CnfFormula:
    """A 3-CNF formula over variables ``1..n`` in signed-literal form."""

    n: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("formula needs at least one variable")
        clauses = tuple(tuple(int(lit) for lit in clause) for clause in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        for clause in clauses:
            if len(clause) != 3:
                raise ValueError(f"clause {clause} must have exactly 3 literals")
            variables = {abs(lit) for lit in clause}
            if 0 in variables:
                raise ValueError(f"clause {clause} contains literal 0")
            if len(variables) != 3:
                raise ValueError(f"clause {clause} repeats a variable")
            if max(variables) > self.n:
                raise ValueError(f"clause {clause} exceeds variable count {self.n}")


@dataclass(frozen=True)
class ReductionResult:
    """A compiled network with its exact rational normalizer and parameters."""

    network: Network
    normalizer: Fraction
    metadata: dict = field(default_factory=dict)


def mis_to_spn(graph: Graph) -> ReductionResult:
    """Height-2 network whose MAP value is ``max independent set size / c``.

    Vertex ``i`` becomes a product of ``n`` binary leaves: certainly 1 at
    ``i``, certainly 0 at each neighbor, uniform elsewhere.  The root mixes
    the products with weights ``2**(n - deg(i) - 1) / c`` where ``c`` is the
    exact integer total.  Node count is ``n*n + n + 1``.
    """
    n = graph.n
    if n < 1:
        raise ValueError("graph must have at least one vertex")
    neighborhoods = [graph.neighbors(i) for i in range(n)]
    numerators = [2 ** (n - len(neighborhoods[i]) - 1) for i in range(n)]
    c = sum(numerators)

    nodes: dict[int, Node] = {}
    next_id = 1
    product_ids = []
    for i in range(n):
        product_id = next_id
        next_id += 1
        leaf_ids = []
        for j in range(n):
            if j == i:
                dist = (0.0, 1.0)
            elif j in neighborhoods[i]:
                dist = (1.0, 0.0)
            else:
                dist = (0.5, 0.5)
            nodes[next_id] = LeafNode(j, dist)
            leaf_ids.append(next_id)
            next_id += 1
        nodes[product_id] = ProductNode(tuple(leaf_ids))
        product_ids.append(product_id)
    weights = tuple(numerator / c for numerator in numerators)
    nodes[0] = SumNode(tuple(product_ids), weights)

    variables = [Variable(j, 2) for j in range(n)]
    network = Network(nodes, 0, variables)
    return ReductionResult(network, Fraction(c), {"kind": "mis", "q": 1, "n": n})


def mis_decision_threshold(result: ReductionResult, v: int) -> float:
    """Threshold whose reachability decides whether an independent set of size ``v`` exists."""
    if v < 0:
        raise ValueError(f"set size must be nonnegative, got {v}")
    return float(Fraction(v) / result.normalizer)


def cnf_to_spn(formula: CnfFormula) -> ReductionResult:
    """Network whose MAP value reaches ``2**(3 - n) / 7`` iff the formula is satisfiable.

    Each clause contributes seven products, one per satisfying assignment of
    its three variables; the products pin the clause variables and stay
    uniform elsewhere.  The root mixes all ``7 m`` products uniformly.  For
    an unsatisfiable formula the MAP value is at most ``(m - 1) / m`` times
    the threshold.
    """
    n = formula.n
    m = len(formula.clauses)
    if m < 1:
        raise ValueError("formula needs at least one clause")

    nodes: dict[int, Node] = {}
    next_id = 1
    product_ids = []
    for clause in formula.clauses:
        clause_vars = sorted(abs(lit) - 1 for lit in clause)
        wants_one = {abs(lit) - 1: lit > 0 for lit in clause}
        for bits in itertools.product((0, 1), repeat=3):
            satisfied = any(
                bool(bits[k]) == wants_one[clause_vars[k]] for k in range(3)
            )
            if not satisfied:
                continue
            fixed = dict(zip(clause_vars, bits))
            product_id = next_id
            next_id += 1
            leaf_ids = []
            for j in range(n):
                if j in fixed:
                    dist = (0.0, 1.0) if fixed[j] else (1.0, 0.0)
                else:
                    dist = (0.5, 0.5)
                nodes[next_id] = LeafNode(j, dist)
                leaf_ids.append(next_id)
                next_id += 1
            nodes[product_id] = ProductNode(tuple(leaf_ids))
            product_ids.append(product_id)
    weight = 1.0 / (7 * m)
    nodes[0] = SumNode(tuple(product_ids), tuple([weight] * len(product_ids)))

    variables = [Variable(j, 2) for j in range(n)]
    network = Network(nodes, 0, variables)
    threshold = Fraction(8, 7 * 2**n)
    return ReductionResult(
        network, threshold, {"kind": "cnf", "q": 1, "m": m, "n": n}
    )


def amplification_q(m: int, s_prime: int, epsilon: float) -> int:
    """Number of copies needed to beat a ``2**(s**epsilon)`` approximation factor.

    ``m`` is the clause count, ``s_prime`` the size of a single-copy network,
    and ``epsilon`` the exponent in the target factor; the result is
    ``1 + floor((ln 2 * m * (s_prime + 2)**epsilon)**(1 / (1 - epsilon)))``.
    """
    if m < 1:
        raise ValueError(f"clause count must be positive, got {m}")
    if s_prime < 1:
        raise ValueError(f"single-copy size must be positive, got {s_prime}")
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
    base = math.log(2.0) * m * (s_prime + 2) ** epsilon
    return 1 + math.floor(base ** (1.0 / (1.0 - epsilon)))


def amplify(result: ReductionResult, q: int) -> ReductionResult:
    """Product of ``q`` disjoint copies; the MAP value becomes the q-th power.

    Copy ``t`` renames variable ``k`` to ``t * n + k``.  With ``q == 1`` the
    input is returned unchanged.
    """
    if q < 1:
        raise ValueError(f"copy count must be positive, got {q}")
    if q == 1:
        return result
    base = result.network
    base_ids = sorted(base.nodes)
    dense = {nid: k for k, nid in enumerate(base_ids)}
    size = len(base_ids)
    n = len(base.variables)

    nodes: dict[int, Node] = {}
    copy_roots = []
    for t in range(q):
        offset = 1 + t * size
        for nid in base_ids:
            node = base.nodes[nid]
            if isinstance(node, LeafNode):
                replacement: Node = LeafNode(t * n + node.variable, node.distribution)
            elif isinstance(node, SumNode):
                replacement = SumNode(
                    tuple(offset + dense[c] for c in node.children), node.weights
                )
            else:
                replacement = ProductNode(
                    tuple(offset + dense[c] for c in node.children)
                )
            nodes[offset + dense[nid]] = replacement
        copy_roots.append(offset + dense[base.root])
    nodes[0] = ProductNode(tuple(copy_roots))

    variables = [
        Variable(t * n + v.index, v.cardinality)
        for t in range(q)
        for v in base.variables
    ]
    network = Network(nodes, 0, variables)
    metadata = dict(result.metadata)
    metadata["q"] = metadata.get("q", 1) * q
    return ReductionResult(network, result.normalizer**q, metadata)
