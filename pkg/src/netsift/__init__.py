"""Filtered market networks and the statistical uncertainty of their structures."""
from .cliques import CliqueSolverBudget
from .errors import (
    ConfigError,
    DisconnectedNetworkError,
    NetsiftError,
    NotPositiveSemidefiniteError,
    SolverBudgetExceeded,
    ValidationError,
)
from .filtration import extract, market_graph, mcmw, mismw, mst, pmfg
from .network import (
    NetworkStructure,
    StructureKind,
    WeightedNetwork,
    build_network,
    degree_vector,
    read_matrix_csv,
    write_matrix_csv,
)
from .planarity import planarity_check
from .stats import (
    cholesky,
    log_returns,
    mvn_sample,
    numerical_rank,
    random_factor_loadings,
    sample_moments,
    sample_network,
    single_factor_correlation,
)
from .uncertainty import (
    ErrorCounts,
    ErrorProbabilities,
    LossSpec,
    conditional_risk,
    count_errors,
    degree_vector_frequencies,
    edge_weight_histogram,
    estimate_uncertainty,
    find_n_for_level,
    fraction_losses,
    fraction_of_error,
    min_observation_bound,
    uncertainty_curve,
)

__version__ = "0.1.0"

__all__ = [
    "build_network",
    "cholesky",
    "CliqueSolverBudget",
    "conditional_risk",
    "ConfigError",
    "count_errors",
    "degree_vector",
    "degree_vector_frequencies",
    "DisconnectedNetworkError",
    "edge_weight_histogram",
    "ErrorCounts",
    "ErrorProbabilities",
    "estimate_uncertainty",
    "extract",
    "find_n_for_level",
    "fraction_losses",
    "fraction_of_error",
    "log_returns",
    "LossSpec",
    "market_graph",
    "mcmw",
    "min_observation_bound",
    "mismw",
    "mst",
    "mvn_sample",
    "NetsiftError",
    "NetworkStructure",
    "NotPositiveSemidefiniteError",
    "numerical_rank",
    "planarity_check",
    "pmfg",
    "random_factor_loadings",
    "read_matrix_csv",
    "sample_moments",
    "sample_network",
    "single_factor_correlation",
    "SolverBudgetExceeded",
    "StructureKind",
    "uncertainty_curve",
    "ValidationError",
    "WeightedNetwork",
    "write_matrix_csv",
]
