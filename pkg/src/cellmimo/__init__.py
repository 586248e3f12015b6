"""Coverage and rate analysis for open-loop MIMO cellular downlinks.

Base stations form a homogeneous Poisson point process; each transmits
independent spatial-multiplexing streams with per-antenna power control.
The package evaluates the exact SINR coverage probability and ergodic-rate
laws for partial zero-forcing (PZF) and linear MMSE receivers, and ships a
seeded Monte Carlo simulator used to validate every analytic law.

Typical entry points:

    >>> from cellmimo import NetworkConfig, coverage_mmse_interflimited
    >>> coverage_mmse_interflimited(n_t=2, n_r=4, alpha=4.0, z=1.0)  # doctest: +ELLIPSIS
    0.81285...
"""

from .errors import (
    CellMimoError,
    ConditioningError,
    ConfigError,
    NumericError,
    PoleError,
    SizeGuardError,
)
from .geometry import NetworkConfig, PzfSplit
from .mmse import MmseCoverageRequest, coverage_mmse, coverage_mmse_interflimited
from .montecarlo import (
    McEstimate,
    estimate_coverage,
    estimate_coverage_curve,
    estimate_rate,
    simulate_sinr,
)
from .pzf import (
    PzfCoverageRequest,
    coverage_pzf,
    coverage_pzf_interflimited,
    mean_inverse_sinr,
    optimal_m,
)
from .rate import (
    RateProfile,
    default_pzf_split,
    ergodic_rate,
    mean_sum_rate,
    rate_profile,
    rate_quantile,
    sinr_ccdf,
)
from .specfun import hyp2f1_negz, lambda_kernel, theta_kernel

__version__ = "0.1.0"

__all__ = [
    "CellMimoError",
    "ConditioningError",
    "ConfigError",
    "McEstimate",
    "MmseCoverageRequest",
    "NetworkConfig",
    "NumericError",
    "PoleError",
    "PzfCoverageRequest",
    "PzfSplit",
    "RateProfile",
    "SizeGuardError",
    "__version__",
    "coverage_mmse",
    "coverage_mmse_interflimited",
    "coverage_pzf",
    "coverage_pzf_interflimited",
    "default_pzf_split",
    "ergodic_rate",
    "estimate_coverage",
    "estimate_coverage_curve",
    "estimate_rate",
    "hyp2f1_negz",
    "lambda_kernel",
    "mean_inverse_sinr",
    "mean_sum_rate",
    "optimal_m",
    "rate_profile",
    "rate_quantile",
    "simulate_sinr",
    "sinr_ccdf",
    "theta_kernel",
]
