"""Bounds and Monte Carlo experiments for longest chains among uniform points in [0,1]^t."""

from .bounds import (
    BoundReport,
    QEvaluation,
    SolverConfig,
    X_LEFT,
    X_RIGHT,
    a_root,
    b_root,
    bar_x,
    bw_lower,
    certificate_residuals,
    q_curve,
    q_of_x,
    q_terms,
    rho,
)
from .chains import (
    ChainRunResult,
    MaximalChainCount,
    PointCloud,
    count_maximal_chains,
    expected_count_integral_mc,
    is_chain,
    is_maximal_chain,
    longest_chain,
    longest_chain_patience,
    longest_chain_quadratic,
    sample_cloud,
    trailing_interval_empty,
)
from .errors import ChainBoundsError, DomainError, NumericalError
from .harness import (
    BandVerdict,
    ExperimentResult,
    ExperimentSpec,
    bound_band_check,
    derive_rep_seed,
    run_experiment,
    stream,
    streaming_moments,
)
from .specfun import EULER_GAMMA, digamma, inv_digamma_unit, log_gamma

__version__ = "0.1.0"

__all__ = [
    "BandVerdict",
    "BoundReport",
    "ChainBoundsError",
    "ChainRunResult",
    "DomainError",
    "EULER_GAMMA",
    "ExperimentResult",
    "ExperimentSpec",
    "MaximalChainCount",
    "NumericalError",
    "PointCloud",
    "QEvaluation",
    "SolverConfig",
    "X_LEFT",
    "X_RIGHT",
    "a_root",
    "b_root",
    "bar_x",
    "bound_band_check",
    "bw_lower",
    "certificate_residuals",
    "count_maximal_chains",
    "derive_rep_seed",
    "digamma",
    "expected_count_integral_mc",
    "inv_digamma_unit",
    "is_chain",
    "is_maximal_chain",
    "log_gamma",
    "longest_chain",
    "longest_chain_patience",
    "longest_chain_quadratic",
    "q_curve",
    "q_of_x",
    "q_terms",
    "rho",
    "run_experiment",
    "sample_cloud",
    "stream",
    "streaming_moments",
    "trailing_interval_empty",
]
