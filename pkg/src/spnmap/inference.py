"""Exact evaluation and marginal inference.

Propagation runs bottom-up over the topological order.  Leaves whose
variable is fixed contribute the probability of the fixed category; leaves
outside the evidence scope contribute 1, which turns the same pass into
marginal inference.  A vectorized variant evaluates many total assignments
at once and backs both the exhaustive MAP solver and normalization checks.
"""

from __future__ import annotations

import math
from typing import Iterator, Mapping

import numpy as np

from .logspace import LOG_ZERO, Probability, logsumexp, logsumexp_rows
from .network import LeafNode, Network, ProductNode, Variable


def check_evidence(network: Network, evidence: Mapping[int, int]) -> None:
    """Raise ``ValueError`` unless every pair names a variable and category."""
    n = len(network.variables)
    for var, cat in evidence.items():
        if not 0 <= var < n:
            raise ValueError(f"evidence names unknown variable {var}")
        if not 0 <= cat < network.cardinality(var):
            raise ValueError(
                f"evidence assigns category {cat} to variable {var} "
                f"of cardinality {network.cardinality(var)}"
            )


def check_assignment(network: Network, assignment: Mapping[int, int]) -> None:
    """Raise ``ValueError`` unless the assignment is total and in range."""
    check_evidence(network, assignment)
    for v in network.variables:
        if v.index not in assignment:
            raise ValueError(f"assignment is missing variable {v.index}")


def node_log_values(network: Network, evidence: Mapping[int, int]) -> dict[int, float]:
    """Log value of every node with leaves restricted by ``evidence``."""
    nodes = network.nodes
    vals: dict[int, float] = {}
    for nid in network.topological_order():
        node = nodes[nid]
        if isinstance(node, LeafNode):
            cat = evidence.get(node.variable)
            if cat is None:
                vals[nid] = 0.0
            else:
                p = node.distribution[cat]
                vals[nid] = math.log(p) if p > 0 else LOG_ZERO
        elif isinstance(node, ProductNode):
            total = 0.0
            for child in node.children:
                total += vals[child]
            vals[nid] = total
        else:
            lw = network.log_weights(nid)
            vals[nid] = logsumexp(
                [lw[j] + vals[child] for j, child in enumerate(node.children)]
            )
    return vals


def log_evaluate(network: Network, assignment: Mapping[int, int]) -> float:
    check_assignment(network, assignment)
    return node_log_values(network, assignment)[network.root]


def evaluate(network: Network, assignment: Mapping[int, int]) -> Probability:
    """Probability of a total assignment."""
    return Probability(log_evaluate(network, assignment))


def log_marginal(network: Network, evidence: Mapping[int, int] | None = None) -> float:
    evidence = evidence or {}
    check_evidence(network, evidence)
    return node_log_values(network, evidence)[network.root]


def evaluate_marginal(
    network: Network, evidence: Mapping[int, int] | None = None
) -> Probability:
    """Probability of partial evidence; empty evidence gives 1."""
    return Probability(log_marginal(network, evidence))


def batch_log_values(
    network: Network, node_id: int, categories: np.ndarray
) -> np.ndarray:
    """Log value of ``node_id`` for each row of a ``(k, n_vars)`` category matrix.

    Only columns for variables in the node's scope are read.
    """
    categories = np.asarray(categories)
    if categories.ndim != 2 or categories.shape[1] != len(network.variables):
        raise ValueError("categories must have one column per network variable")
    nodes = network.nodes
    needed = network.reachable_from(node_id)
    vals: dict[int, np.ndarray] = {}
    for nid in network.topological_order():
        if nid not in needed:
            continue
        node = nodes[nid]
        if isinstance(node, LeafNode):
            vals[nid] = network.leaf_log_distribution(nid)[categories[:, node.variable]]
        elif isinstance(node, ProductNode):
            acc = vals[node.children[0]]
            for child in node.children[1:]:
                acc = acc + vals[child]
            vals[nid] = acc
        else:
            stacked = np.stack([vals[c] for c in node.children])
            stacked = stacked + network.log_weights_array(nid)[:, None]
            vals[nid] = logsumexp_rows(stacked)
    return vals[node_id]


def free_variables(
    network: Network, evidence: Mapping[int, int] | None = None
) -> tuple[Variable, ...]:
    """Variables not fixed by the evidence, in index order."""
    evidence = evidence or {}
    return tuple(v for v in network.variables if v.index not in evidence)


def count_free_configurations(
    network: Network, evidence: Mapping[int, int] | None = None
) -> int:
    """Number of total assignments consistent with the evidence."""
    count = 1
    for v in free_variables(network, evidence):
        count *= v.cardinality
    return count


def decode_configuration(
    network: Network, evidence: Mapping[int, int] | None, index: int
) -> dict[int, int]:
    """Total assignment at ``index`` in the lexicographic enumeration.

    Free variables are enumerated in ascending index order with the first
    free variable most significant, so index 0 is the lexicographically
    smallest assignment consistent with the evidence.
    """
    evidence = dict(evidence or {})
    free = free_variables(network, evidence)
    config = dict(evidence)
    remainder = index
    for position, var in enumerate(free):
        stride = 1
        for later in free[position + 1 :]:
            stride *= later.cardinality
        config[var.index] = (remainder // stride) % var.cardinality
    return config


def iter_assignment_chunks(
    network: Network,
    evidence: Mapping[int, int] | None = None,
    chunk_size: int = 1 << 14,
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start_index, categories)`` chunks covering every consistent assignment."""
    evidence = dict(evidence or {})
    check_evidence(network, evidence)
    free = free_variables(network, evidence)
    cards = [v.cardinality for v in free]
    strides = []
    stride = 1
    for card in reversed(cards):
        strides.append(stride)
        stride *= card
    strides.reverse()
    total = stride
    n_vars = len(network.variables)
    for start in range(0, total, chunk_size):
        stop = min(start + chunk_size, total)
        idx = np.arange(start, stop, dtype=np.int64)
        cats = np.zeros((stop - start, n_vars), dtype=np.intp)
        for var, cat in evidence.items():
            cats[:, var] = cat
        for position, var in enumerate(free):
            cats[:, var.index] = (idx // strides[position]) % cards[position]
        yield start, cats


def enumerate_log_values(
    network: Network,
    evidence: Mapping[int, int] | None = None,
    chunk_size: int = 1 << 14,
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start_index, log_values)`` over every assignment consistent with the evidence."""
    for start, cats in iter_assignment_chunks(network, evidence, chunk_size):
        yield start, batch_log_values(network, network.root, cats)


def log_partition(network: Network, chunk_size: int = 1 << 14) -> float:
    """Log of the total mass summed over every total assignment."""
    chunk_totals: list[float] = []
    for _, values in enumerate_log_values(network, None, chunk_size):
        m = float(values.max())
        if m == LOG_ZERO:
            chunk_totals.append(LOG_ZERO)
        else:
            chunk_totals.append(m + math.log(float(np.exp(values - m).sum())))
    return logsumexp(chunk_totals)
