"""Shared fixtures: a small golden mixture network and tiny problem instances."""

from __future__ import annotations

import pytest

from spnmap import (
    CnfFormula,
    Graph,
    LeafNode,
    Network,
    Node,
    ProductNode,
    SumNode,
)


def mixture_nodes() -> dict[int, Node]:
    """Three-component mixture over two binary variables with shared leaves."""
    return {
        0: SumNode((1, 2, 3), (0.2, 0.5, 0.3)),
        1: ProductNode((4, 6)),
        2: ProductNode((4, 7)),
        3: ProductNode((5, 7)),
        4: LeafNode(0, (0.6, 0.4)),
        5: LeafNode(0, (0.1, 0.9)),
        6: LeafNode(1, (0.3, 0.7)),
        7: LeafNode(1, (0.8, 0.2)),
    }


@pytest.fixture
def mixture_net() -> Network:
    """Golden 8-node network: S(1,0) = 0.4, S(X1=0) = 0.7, Σ_x S(x) = 1."""
    return Network.from_nodes(mixture_nodes(), 0)


@pytest.fixture
def diamond_graph() -> Graph:
    """Four vertices, five edges; the maximum independent set has size 2."""
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])


@pytest.fixture
def two_clause_formula() -> CnfFormula:
    """Satisfiable 3-CNF with 4 variables and 2 clauses."""
    return CnfFormula(4, ((-1, 2, -3), (-1, 3, 4)))
