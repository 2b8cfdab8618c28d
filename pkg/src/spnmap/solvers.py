"""MAP solvers: max-product, argmax-product, and exhaustive search.

All three return a total configuration together with its exact probability,
so results are directly comparable.  Ties are broken deterministically:
sum nodes prefer the lowest child index, leaves the lowest category index,
and the exhaustive solver the lexicographically smallest assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .inference import (
    batch_log_values,
    check_evidence,
    count_free_configurations,
    decode_configuration,
    evaluate,
    iter_assignment_chunks,
    log_marginal,
)
from .logspace import LOG_ZERO, Probability
from .network import LeafNode, Network, ProductNode, SumNode

#: Exhaustive search refuses configuration spaces larger than this.
DEFAULT_ENUMERATION_CAP = 1 << 24

#: Exponent of the size-based bound on the product of sum out-degrees.
DEGREE_BOUND_EXPONENT = 0.5284


class Solver(Enum):
    """Which MAP algorithm produced a result."""

    MAX_PRODUCT = "max_product"
    ARGMAX_PRODUCT = "argmax_product"
    EXACT = "exact"


@dataclass(frozen=True)
class MapResult:
    """A configuration, its exact value, and the solver that found it.

    ``value`` is always the network evaluated at ``configuration``;
    ``pd_value`` is the max-product upward bound and is set only by that
    solver.
    """

    configuration: dict[int, int]
    value: Probability
    solver: Solver
    pd_value: Probability | None = None


def _smallest_consistent(network: Network, evidence: Mapping[int, int]) -> dict[int, int]:
    return {v.index: evidence.get(v.index, 0) for v in network.variables}


def _leaf_argmax(node: LeafNode, evidence: Mapping[int, int]) -> int:
    cat = evidence.get(node.variable)
    if cat is not None:
        return cat
    best = 0
    for j, p in enumerate(node.distribution):
        if p > node.distribution[best]:
            best = j
    return best


def _max_product_walk(
    network: Network, evidence: Mapping[int, int]
) -> tuple[dict[int, int], float]:
    """Upward max pass and downward argmax walk; returns (config, bound log).

    The upward pass replaces each sum with the max of its weighted child
    values; the downward pass walks the chosen children and reads one
    category per leaf.  Runs in time linear in the network size.
    """
    nodes = network.nodes
    upward: dict[int, float] = {}
    chosen_child: dict[int, int] = {}
    leaf_pick: dict[int, int] = {}
    for nid in network.topological_order():
        node = nodes[nid]
        if isinstance(node, LeafNode):
            cat = _leaf_argmax(node, evidence)
            leaf_pick[nid] = cat
            p = node.distribution[cat]
            upward[nid] = math.log(p) if p > 0 else LOG_ZERO
        elif isinstance(node, ProductNode):
            total = 0.0
            for child in node.children:
                total += upward[child]
            upward[nid] = total
        else:
            lw = network.log_weights(nid)
            best = LOG_ZERO
            best_child = node.children[0]
            for j, child in enumerate(node.children):
                v = lw[j] + upward[child]
                if j == 0 or v > best:
                    best = v
                    best_child = child
            upward[nid] = best
            chosen_child[nid] = best_child

    config = dict(evidence)
    stack = [network.root]
    seen: set[int] = set()
    while stack:
        nid = stack.pop()
        if nid in seen:
            continue
        seen.add(nid)
        node = nodes[nid]
        if isinstance(node, LeafNode):
            config.setdefault(node.variable, leaf_pick[nid])
        elif isinstance(node, SumNode):
            stack.append(chosen_child[nid])
        else:
            stack.extend(node.children)

    return config, upward[network.root]


def max_product(
    network: Network, evidence: Mapping[int, int] | None = None
) -> MapResult:
    """Upward max-propagation followed by downward argmax selection.

    ``pd_value`` carries the upward bound, which the value of the selected
    configuration can only undershoot.  Runs in time linear in the network
    size.
    """
    evidence = dict(evidence or {})
    check_evidence(network, evidence)
    if log_marginal(network, evidence) == LOG_ZERO:
        config = _smallest_consistent(network, evidence)
        return MapResult(
            config, evaluate(network, config), Solver.MAX_PRODUCT, Probability(LOG_ZERO)
        )

    config, bound = _max_product_walk(network, evidence)
    return MapResult(
        config,
        evaluate(network, config),
        Solver.MAX_PRODUCT,
        Probability(bound),
    )


def argmax_product(
    network: Network, evidence: Mapping[int, int] | None = None
) -> MapResult:
    """Bottom-up candidate propagation with re-evaluation at sum nodes.

    Each node carries one candidate configuration over its scope.  A sum
    node evaluates itself at each child's candidate and keeps the best;
    a product node concatenates candidates of its disjoint children.
    Candidates are memoized per node, so shared nodes contribute one
    consistent choice everywhere.  The final candidate is compared against
    the max-product configuration and the better of the two is returned
    (ties keep the candidate), so the result is never worse than
    max-product's.  Worst case quadratic in network size.
    """
    evidence = dict(evidence or {})
    check_evidence(network, evidence)
    if log_marginal(network, evidence) == LOG_ZERO:
        config = _smallest_consistent(network, evidence)
        return MapResult(config, evaluate(network, config), Solver.ARGMAX_PRODUCT)

    nodes = network.nodes
    n_vars = len(network.variables)
    candidates: dict[int, dict[int, int]] = {}
    for nid in network.topological_order():
        node = nodes[nid]
        if isinstance(node, LeafNode):
            candidates[nid] = {node.variable: _leaf_argmax(node, evidence)}
        elif isinstance(node, ProductNode):
            merged: dict[int, int] = {}
            for child in node.children:
                merged.update(candidates[child])
            candidates[nid] = merged
        else:
            if len(node.children) == 1:
                candidates[nid] = candidates[node.children[0]]
                continue
            rows = [candidates[child] for child in node.children]
            cats = np.zeros((len(rows), n_vars), dtype=np.intp)
            for k, candidate in enumerate(rows):
                for var, cat in candidate.items():
                    cats[k, var] = cat
            values = batch_log_values(network, nid, cats)
            candidates[nid] = rows[int(np.argmax(values))]

    config = dict(candidates[network.root])
    value = evaluate(network, config)
    # With nested sums the greedy candidate can score below max-product's
    # configuration, whose value feeds cross terms the candidate pass never
    # sees; keeping the better of the two restores the dominance guarantee.
    fallback, _ = _max_product_walk(network, evidence)
    fallback_value = evaluate(network, fallback)
    if fallback_value.log > value.log:
        config, value = fallback, fallback_value
    return MapResult(config, value, Solver.ARGMAX_PRODUCT)


def exact_map(
    network: Network,
    evidence: Mapping[int, int] | None = None,
    max_configurations: int = DEFAULT_ENUMERATION_CAP,
) -> MapResult:
    """Exhaustive search over every assignment consistent with the evidence."""
    evidence = dict(evidence or {})
    check_evidence(network, evidence)
    total = count_free_configurations(network, evidence)
    if total > max_configurations:
        raise ValueError(
            f"{total} configurations exceed the enumeration cap {max_configurations}"
        )
    best_index: int | None = None
    best_value = LOG_ZERO
    for start, cats in iter_assignment_chunks(network, evidence):
        values = batch_log_values(network, network.root, cats)
        j = int(np.argmax(values))
        v = float(values[j])
        if best_index is None or v > best_value:
            best_index = start + j
            best_value = v
    config = decode_configuration(network, evidence, best_index)
    return MapResult(config, evaluate(network, config), Solver.EXACT)


def solve(
    network: Network,
    evidence: Mapping[int, int] | None,
    solver: Solver,
    max_configurations: int = DEFAULT_ENUMERATION_CAP,
) -> MapResult:
    """Dispatch to the named solver."""
    if solver is Solver.MAX_PRODUCT:
        return max_product(network, evidence)
    if solver is Solver.ARGMAX_PRODUCT:
        return argmax_product(network, evidence)
    if solver is Solver.EXACT:
        return exact_map(network, evidence, max_configurations)
    raise ValueError(f"unknown solver {solver!r}")


def decision_map(
    network: Network,
    evidence: Mapping[int, int] | None,
    gamma: float,
    solver: Solver = Solver.EXACT,
    max_configurations: int = DEFAULT_ENUMERATION_CAP,
) -> bool:
    """Whether the solver's MAP value reaches the threshold ``gamma``.

    The comparison allows a relative slack of ``1e-9`` so thresholds that
    are met exactly are not rejected for rounding reasons.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    result = solve(network, evidence, solver, max_configurations)
    return result.value.linear >= gamma * (1.0 - 1e-9)


@dataclass(frozen=True)
class DegreeBound:
    """Product of sum out-degrees against the size-based exponent bound."""

    log2_degree_product: float
    size_lower_bound: int
    exponent_bound: float
    satisfied: bool


def approx_factor_bound(network: Network) -> DegreeBound:
    """Bound the worst-case max-product approximation factor by network size.

    The product of sum out-degrees satisfies
    ``log2(prod d_i) < 0.5284 * (nodes + arcs)`` whenever the network has at
    least one sum node; ``nodes + arcs`` is a lower bound on any reasonable
    encoding size.
    """
    degrees = [
        len(node.children)
        for node in network.nodes.values()
        if isinstance(node, SumNode)
    ]
    log2_product = sum(math.log2(d) for d in degrees)
    size = len(network.nodes) + network.arc_count
    bound = DEGREE_BOUND_EXPONENT * size
    satisfied = log2_product < bound
    if degrees and not satisfied:
        raise RuntimeError(
            f"degree product 2**{log2_product} violates the size bound {bound}"
        )
    return DegreeBound(log2_product, size, bound, satisfied)
