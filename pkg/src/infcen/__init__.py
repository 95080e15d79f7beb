"""Shapley and single-node-influence centrality on probabilistic graphs."""

import numba

# The bundled TBB is too old for numba; prefer OpenMP without a warning.
numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

from .diffusion import SpreadEstimate, estimate_spread_mc, forward_simulate  # noqa: E402
from .estimators import (  # noqa: E402
    SHAPLEY,
    SNI,
    CentralityResult,
    EstimatorParams,
    NodeWeights,
    estimate_fixed_theta,
    run,
)
from .graph import PR, WC, Const, FromFile, Graph, load_edge_list, read_edge_list  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "WC",
    "PR",
    "Const",
    "FromFile",
    "load_edge_list",
    "read_edge_list",
    "SpreadEstimate",
    "estimate_spread_mc",
    "forward_simulate",
    "EstimatorParams",
    "NodeWeights",
    "CentralityResult",
    "SHAPLEY",
    "SNI",
    "run",
    "estimate_fixed_theta",
]
