"""Sum-product network inference with exact and approximate MAP solvers."""

from .experiments import (
    ExperimentConfig,
    ExperimentRow,
    derive_seed,
    gap_fragment,
    gap_network,
    random_graph,
    random_spn,
    ratio,
    run_mis_experiment,
)
from .formats import (
    ParseError,
    parse_dimacs_cnf,
    parse_evidence,
    parse_graph,
    parse_spn,
    serialize_graph,
    serialize_spn,
)
from .inference import (
    batch_log_values,
    count_free_configurations,
    decode_configuration,
    enumerate_log_values,
    evaluate,
    evaluate_marginal,
    log_partition,
)
from .logspace import LOG_ZERO, Probability
from .network import (
    Assignment,
    Evidence,
    LeafNode,
    Network,
    NetworkStats,
    Node,
    ProductNode,
    SumNode,
    Variable,
    Violation,
    network_stats,
    validate,
)
from .reductions import (
    CnfFormula,
    Graph,
    ReductionResult,
    amplification_q,
    amplify,
    cnf_to_spn,
    mis_decision_threshold,
    mis_to_spn,
)
from .solvers import (
    DegreeBound,
    MapResult,
    Solver,
    approx_factor_bound,
    argmax_product,
    decision_map,
    exact_map,
    max_product,
    solve,
)

__all__ = [
    "Assignment",
    "CnfFormula",
    "DegreeBound",
    "Evidence",
    "ExperimentConfig",
    "ExperimentRow",
    "Graph",
    "LOG_ZERO",
    "LeafNode",
    "MapResult",
    "Network",
    "NetworkStats",
    "Node",
    "ParseError",
    "Probability",
    "ProductNode",
    "ReductionResult",
    "Solver",
    "SumNode",
    "Variable",
    "Violation",
    "amplification_q",
    "amplify",
    "approx_factor_bound",
    "argmax_product",
    "batch_log_values",
    "cnf_to_spn",
    "count_free_configurations",
    "decision_map",
    "decode_configuration",
    "derive_seed",
    "enumerate_log_values",
    "evaluate",
    "evaluate_marginal",
    "exact_map",
    "gap_fragment",
    "gap_network",
    "log_partition",
    "max_product",
    "mis_decision_threshold",
    "mis_to_spn",
    "network_stats",
    "parse_dimacs_cnf",
    "parse_evidence",
    "parse_graph",
    "parse_spn",
    "random_graph",
    "random_spn",
    "ratio",
    "run_mis_experiment",
    "serialize_graph",
    "serialize_spn",
    "solve",
    "validate",
]

__version__ = "0.1.0"
