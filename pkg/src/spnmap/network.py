"""Sum-product network structure: node types, validation, statistics.

A network is a rooted DAG whose internal nodes are weighted sums or products
and whose leaves are categorical distributions over single variables.  The
``Network`` container is immutable after construction; structural defects
(cycles, scope violations, bad weight totals) are reported by ``validate``
rather than raised, so that files under inspection can still be loaded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Mapping, Sequence, Union

import numpy as np

from .logspace import LOG_ZERO

#: Sum weights whose total is within this distance of 1 are silently
#: renormalized at construction; larger deviations become violations.
WEIGHT_TOLERANCE = 1e-6

#: Leaf distributions must sum to 1 within this tolerance.
LEAF_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Variable:
    """A categorical variable identified by its position in the network."""

    index: int
    cardinality: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"variable index must be nonnegative, got {self.index}")
        if self.cardinality < 2:
            raise ValueError(
                f"variable {self.index} needs cardinality >= 2, got {self.cardinality}"
            )


@dataclass(frozen=True)
class LeafNode:
    """Categorical distribution over one variable."""

    variable: int
    distribution: tuple[float, ...]

    children: ClassVar[tuple[int, ...]] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "distribution", tuple(float(p) for p in self.distribution))
        if len(self.distribution) < 2:
            raise ValueError("leaf distribution needs at least two categories")


@dataclass(frozen=True)
class SumNode:
    """Weighted mixture of children that share a scope."""

    children: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(int(c) for c in self.children))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not self.children:
            raise ValueError("sum node needs at least one child")
        if len(self.children) != len(self.weights):
            raise ValueError(
                f"sum node has {len(self.children)} children but {len(self.weights)} weights"
            )


@dataclass(frozen=True)
class ProductNode:
    """Product of children over pairwise disjoint scopes."""

    children: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(int(c) for c in self.children))
        if not self.children:
            raise ValueError("product node needs at least one child")


Node = Union[LeafNode, SumNode, ProductNode]

#: A total map from variable index to category index.
Assignment = Mapping[int, int]

#: A partial map from variable index to category index.
Evidence = Mapping[int, int]


@dataclass(frozen=True)
class Violation:
    """One structural defect found by ``validate``."""

    node_id: int
    kind: str
    message: str


def _toposort(nodes: Mapping[int, Node]) -> tuple[list[int] | None, int | None]:
    """Children-before-parents order, or ``(None, node_on_cycle)``."""
    WHITE, GRAY, BLACK = 0, 1, 2
    state = dict.fromkeys(nodes, WHITE)
    order: list[int] = []
    for start in sorted(nodes):
        if state[start] != WHITE:
            continue
        state[start] = GRAY
        stack = [(start, iter(nodes[start].children))]
        while stack:
            nid, it = stack[-1]
            child = next(it, None)
            if child is None:
                state[nid] = BLACK
                order.append(nid)
                stack.pop()
            elif state[child] == GRAY:
                return None, child
            elif state[child] == WHITE:
                state[child] = GRAY
                stack.append((child, iter(nodes[child].children)))
    return order, None


class Network:
    """Immutable rooted DAG of sum, product, and leaf nodes.

    Parameters
    ----------
    nodes:
        Mapping from integer node id to node.  Child references must name
        ids present in the mapping.
    root:
        Id of the root node.
    variables:
        The variables of the network; indices must be exactly ``0..n-1``.

    Construction renormalizes sum weights that are within ``1e-6`` of a
    proper convex combination and precomputes traversal order, scopes, and
    log-domain tables.  Cyclic graphs are constructible (so ``validate`` can
    report them) but refuse traversal-based queries.
    """

    def __init__(
        self,
        nodes: Mapping[int, Node],
        root: int,
        variables: Sequence[Variable],
    ) -> None:
        if not nodes:
            raise ValueError("network needs at least one node")
        store = {int(nid): node for nid, node in nodes.items()}
        if root not in store:
            raise ValueError(f"root id {root} is not a node")

        ordered_vars = tuple(sorted(variables, key=lambda v: v.index))
        if [v.index for v in ordered_vars] != list(range(len(ordered_vars))):
            raise ValueError("variable indices must be 0..n-1 with no gaps")
        if not ordered_vars:
            raise ValueError("network needs at least one variable")
        card = {v.index: v.cardinality for v in ordered_vars}

        for nid, node in store.items():
            for child in node.children:
                if child not in store:
                    raise ValueError(f"node {nid} references unknown child {child}")
            if isinstance(node, LeafNode):
                if node.variable not in card:
                    raise ValueError(f"leaf {nid} references unknown variable {node.variable}")
                if len(node.distribution) != card[node.variable]:
                    raise ValueError(
                        f"leaf {nid} has {len(node.distribution)} probabilities for "
                        f"variable {node.variable} of cardinality {card[node.variable]}"
                    )

        for nid, node in store.items():
            if isinstance(node, SumNode):
                total = math.fsum(node.weights)
                if (
                    all(w >= 0 for w in node.weights)
                    and total != 1.0
                    and abs(total - 1.0) <= WEIGHT_TOLERANCE
                ):
                    store[nid] = SumNode(node.children, tuple(w / total for w in node.weights))

        self._nodes = store
        self._root = int(root)
        self._variables = ordered_vars
        self._cardinalities = card

        order, cycle_node = _toposort(store)
        self._order = tuple(order) if order is not None else None
        self._cycle_node = cycle_node

        self._scopes: dict[int, frozenset[int]] | None = None
        if self._order is not None:
            scopes: dict[int, frozenset[int]] = {}
            for nid in self._order:
                node = store[nid]
                if isinstance(node, LeafNode):
                    scopes[nid] = frozenset((node.variable,))
                else:
                    scopes[nid] = frozenset().union(*(scopes[c] for c in node.children))
            self._scopes = scopes

        self._log_weights: dict[int, tuple[float, ...]] = {}
        self._log_weights_arr: dict[int, np.ndarray] = {}
        self._leaf_log: dict[int, np.ndarray] = {}
        with np.errstate(divide="ignore", invalid="ignore"):
            for nid, node in store.items():
                if isinstance(node, SumNode):
                    lw = tuple(
                        math.log(w) if w > 0 else LOG_ZERO for w in node.weights
                    )
                    self._log_weights[nid] = lw
                    self._log_weights_arr[nid] = np.array(lw)
                elif isinstance(node, LeafNode):
                    self._leaf_log[nid] = np.log(np.asarray(node.distribution))

    @property
    def nodes(self) -> dict[int, Node]:
        return self._nodes

    @property
    def root(self) -> int:
        return self._root

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self._variables

    def cardinality(self, variable: int) -> int:
        return self._cardinalities[variable]

    @property
    def is_acyclic(self) -> bool:
        return self._order is not None

    @property
    def arc_count(self) -> int:
        return sum(len(node.children) for node in self._nodes.values())

    def topological_order(self) -> tuple[int, ...]:
        """All node ids, children before parents."""
        if self._order is None:
            raise ValueError(f"network contains a cycle through node {self._cycle_node}")
        return self._order

    def scope(self, node_id: int) -> frozenset[int]:
        """Variable indices reachable below ``node_id``."""
        if node_id not in self._nodes:
            raise KeyError(f"unknown node id {node_id}")
        if self._scopes is None:
            raise ValueError(f"network contains a cycle through node {self._cycle_node}")
        return self._scopes[node_id]

    def log_weights(self, node_id: int) -> tuple[float, ...]:
        return self._log_weights[node_id]

    def log_weights_array(self, node_id: int) -> np.ndarray:
        return self._log_weights_arr[node_id]

    def leaf_log_distribution(self, node_id: int) -> np.ndarray:
        return self._leaf_log[node_id]

    def reachable_from(self, node_id: int) -> set[int]:
        """Node ids reachable from ``node_id`` (cycle safe)."""
        seen = {node_id}
        stack = [node_id]
        while stack:
            for child in self._nodes[stack.pop()].children:
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return seen

    @classmethod
    def from_nodes(cls, nodes: Mapping[int, Node], root: int) -> "Network":
        """Build a network inferring variables from the leaf distributions."""
        cards: dict[int, int] = {}
        for nid, node in nodes.items():
            if isinstance(node, LeafNode):
                k = len(node.distribution)
                if cards.setdefault(node.variable, k) != k:
                    raise ValueError(
                        f"leaf {nid} disagrees on the cardinality of variable {node.variable}"
                    )
        if not cards or sorted(cards) != list(range(len(cards))):
            raise ValueError("leaf variables must cover indices 0..n-1 with no gaps")
        variables = [Variable(i, cards[i]) for i in range(len(cards))]
        return cls(nodes, root, variables)


def validate(network: Network) -> list[Violation]:
    """Report every structural defect; an empty list means the network is valid.

    Checks, in order: leaf distributions (nonnegative, unit total within
    ``1e-9``), sum weights (nonnegative, unit total within ``1e-6``),
    acyclicity, reachability from the root, completeness of sum nodes,
    decomposability of product nodes, and root scope coverage.
    """
    violations: list[Violation] = []
    nodes = network.nodes

    for nid in sorted(nodes):
        node = nodes[nid]
        if isinstance(node, LeafNode):
            if any(p < 0 for p in node.distribution):
                violations.append(Violation(nid, "distribution", "negative probability"))
            else:
                total = math.fsum(node.distribution)
                if abs(total - 1.0) > LEAF_TOLERANCE:
                    violations.append(
                        Violation(nid, "distribution", f"probabilities sum to {total!r}")
                    )
        elif isinstance(node, SumNode):
            if any(w < 0 for w in node.weights):
                violations.append(Violation(nid, "normalization", "negative weight"))
            else:
                total = math.fsum(node.weights)
                if abs(total - 1.0) > WEIGHT_TOLERANCE:
                    violations.append(
                        Violation(nid, "normalization", f"weights sum to {total!r}")
                    )

    reachable = network.reachable_from(network.root)
    for nid in sorted(nodes):
        if nid not in reachable:
            violations.append(Violation(nid, "unreachable", "not reachable from the root"))

    if not network.is_acyclic:
        violations.append(
            Violation(network._cycle_node, "cycle", "node lies on a directed cycle")
        )
        return violations

    for nid in sorted(nodes):
        node = nodes[nid]
        if isinstance(node, SumNode):
            scopes = {network.scope(c) for c in node.children}
            if len(scopes) > 1:
                violations.append(
                    Violation(nid, "completeness", "children have differing scopes")
                )
        elif isinstance(node, ProductNode):
            seen: set[int] = set()
            for child in node.children:
                child_scope = network.scope(child)
                if seen & child_scope:
                    violations.append(
                        Violation(nid, "decomposability", "children share scope variables")
                    )
                    break
                seen |= child_scope
    all_vars = frozenset(v.index for v in network.variables)
    if network.scope(network.root) != all_vars:
        violations.append(
            Violation(network.root, "scope", "root scope does not cover all variables")
        )
    return violations


@dataclass(frozen=True)
class NetworkStats:
    """Structural summary of a network."""

    node_count: int
    sum_count: int
    product_count: int
    leaf_count: int
    height: int
    sum_out_degrees: tuple[int, ...]


def network_stats(network: Network) -> NetworkStats:
    """Counts, height (arcs from root to deepest leaf), and sum out-degrees."""
    nodes = network.nodes
    sums = products = leaves = 0
    degrees: list[int] = []
    for nid in sorted(nodes):
        node = nodes[nid]
        if isinstance(node, SumNode):
            sums += 1
            degrees.append(len(node.children))
        elif isinstance(node, ProductNode):
            products += 1
        else:
            leaves += 1
    heights: dict[int, int] = {}
    for nid in network.topological_order():
        node = nodes[nid]
        if isinstance(node, LeafNode):
            heights[nid] = 0
        else:
            heights[nid] = 1 + max(heights[c] for c in node.children)
    return NetworkStats(
        node_count=len(nodes),
        sum_count=sums,
        product_count=products,
        leaf_count=leaves,
        height=heights[network.root],
        sum_out_degrees=tuple(degrees),
    )
