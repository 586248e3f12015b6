"""Coverage laws for the partial zero-forcing (PZF) receiver.

The receiver cancels the m-1 nearest interfering base stations (all their
streams) plus the serving station's cross-streams and uses the remaining
delta + 1 = n_r - m*n_t + 1 dimensions for array gain.  Conditioned on the
network geometry, the post-filter SINR mixes a chi-squared signal gain with
exponential per-interferer gains, and averaging over the Poisson field
leaves expressions built from the interference kernels in
:mod:`cellmimo.specfun`.

Two analytic routes are implemented:

* ``coverage_pzf_interflimited`` - the zero-noise law.  The coverage is an
  average over the scale-free distance ratio u = r/R of a finite sum over
  set-partition signatures (the composite-derivative expansion of the
  interference functional).  Every term in that sum is positive, so it is
  assembled in log space and integrated with a doubling Gauss-Legendre rule
  on (0, 1) with vectorized kernel evaluations.

* ``coverage_pzf`` - the general law with receiver noise.  After rescaling
  the serving-cell area and conditioning on u, the radial average becomes an
  inner integral of (polynomial) x exp(-y) x exp(-noise * y^(alpha/2) ...)
  against an outer integral over u; the hypergeometric kernels depend only
  on the outer variable, so they are evaluated once per outer node.  With
  sigma2 = 0 the inner integral reduces to exact gamma moments and the
  result coincides with the zero-noise law (tested).

The mean inverse SINR in closed form and the optimal-split rule derived
from it live here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate as _integrate
from scipy import optimize as _optimize
from scipy import special as _sp

from .combinatorics import set_partition_signatures
from .errors import ConfigError, NumericError
from .geometry import NetworkConfig, PzfSplit
from .specfun import lambda_kernel, pochhammer

__all__ = [
    "PzfCoverageRequest",
    "laplace_interference",
    "coverage_pzf",
    "coverage_pzf_interflimited",
    "coverage_pzf_at_beta",
    "mean_inverse_sinr",
    "mean_inverse_sinr_surrogate",
    "optimal_m",
    "argmin_mean_inverse_sinr",
]

# Doubling Gauss-Legendre levels for the zero-noise distance-ratio average.
_GL_LEVELS = (24, 48, 96, 192, 384, 768, 1536)
_GL_TOL = 1e-10

# Tolerances of the noise-capable nested quadrature (outer over the distance
# ratio, inner over the rescaled serving-cell area).
_OUTER_EPSABS = 1e-9
_INNER_EPSABS = 1e-11


@dataclass(frozen=True)
class PzfCoverageRequest:
    """A single coverage evaluation: network config, resource split, threshold."""

    config: NetworkConfig
    split: PzfSplit
    z: float

    def __post_init__(self) -> None:
        expected = self.config.n_r - self.split.m * self.config.n_t
        if expected != self.split.delta:
            raise ConfigError(
                f"inconsistent split: n_r={self.config.n_r}, m={self.split.m}, "
                f"n_t={self.config.n_t} imply delta={expected}, got {self.split.delta}"
            )
        if not (self.z >= 0.0 and math.isfinite(self.z)):
            raise ConfigError(f"threshold must be finite and >= 0, got {self.z!r}")


@lru_cache(maxsize=None)
def _leggauss_unit(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def _log_faa_coeff(j: int, n_t: int, alpha: float) -> float:
    """log |c_j| for the composite-derivative coefficients.

    c_j = (n_t)_j (-2/alpha)_j / (1 - 2/alpha)_j is negative for every
    j >= 1 (exactly one negative factor); combined with the partition-sign
    (-1)^blocks of the expansion, all coverage terms end up positive.
    """
    c = pochhammer(n_t, j) * pochhammer(-2.0 / alpha, j) / pochhammer(1.0 - 2.0 / alpha, j)
    return math.log(abs(c))


@lru_cache(maxsize=None)
def _signature_terms(n_t: int, m: int, delta: int, alpha: float):
    """Static (z-independent) data of the partition expansion, with the
    gamma-moment factor (m)_blocks of the zero-noise law baked in.

    Each entry: (k, log_static, blocks, size_multiplicity).
    """
    terms = []
    for k in range(delta + 1):
        for sig in set_partition_signatures(k):
            log_static = (
                math.log(sig.weight)
                + _sp.gammaln(m + sig.block_count)
                - _sp.gammaln(m)
                - _sp.gammaln(k + 1.0)
                + sum(cnt * _log_faa_coeff(j, n_t, alpha) for j, cnt in sig.size_multiplicity)
            )
            terms.append((k, log_static, sig.block_count, sig.size_multiplicity))
    return tuple(terms)


@lru_cache(maxsize=None)
def _signature_terms_raw(n_t: int, delta: int, alpha: float):
    """Partition data without the gamma-moment factor (the noise-capable
    route obtains that factor from its radial integral instead).

    Each entry: (i, log_static, blocks, size_multiplicity) with
    log_static = log(weight) - log(i!) + sum_j cnt_j log|c_j|.
    """
    terms = []
    for i in range(delta + 1):
        for sig in set_partition_signatures(i):
            log_static = (
                math.log(sig.weight)
                - _sp.gammaln(i + 1.0)
                + sum(cnt * _log_faa_coeff(j, n_t, alpha) for j, cnt in sig.size_multiplicity)
            )
            terms.append((i, log_static, sig.block_count, sig.size_multiplicity))
    return tuple(terms)


def _conditional_coverage_u(n_t: int, m: int, delta: int, alpha: float, z: float, u: np.ndarray) -> np.ndarray:
    """Zero-noise coverage conditioned on u = r/R (the inverse distance ratio).

    u is an array with entries in (0, 1]; all partition terms are positive
    and at most 1, so the log-space sum is overflow-free for any z.
    """
    x = z * u**alpha
    log_l0 = np.log(lambda_kernel(0, n_t, alpha, x))
    log_lj = {j: np.log(lambda_kernel(j, n_t, alpha, x)) for j in range(1, delta + 1)}
    log_x = np.log(x)
    total = np.zeros_like(u)
    for k, log_static, blocks, size_mult in _signature_terms(n_t, m, delta, alpha):
        expo = log_static - (m + blocks) * log_l0
        if k:
            expo = expo + k * log_x
        for j, cnt in size_mult:
            expo = expo + cnt * log_lj[j]
        total += np.exp(expo)
    return total


def coverage_pzf_at_beta(n_t: int, m: int, delta: int, alpha: float, z: float, beta) -> float:
    """Zero-noise PZF coverage for a user at a fixed distance ratio beta = R/r.

    beta = 1 describes a cell-edge user (the nearest uncancelled interferer
    as close as the serving station).  For m = 1 there is no cancelled
    interferer and beta must be 1.
    """
    _validate_split_args(n_t, m, delta, alpha)
    if not (z >= 0.0 and math.isfinite(z)):
        raise ConfigError(f"threshold must be finite and >= 0, got {z!r}")
    scalar = np.isscalar(beta)
    bv = np.atleast_1d(np.asarray(beta, dtype=float))
    if np.any(bv < 1.0):
        raise ConfigError("distance ratio beta must be >= 1")
    if m == 1 and np.any(bv != 1.0):
        raise ConfigError("with m = 1 there is no cancelled interferer; beta must be 1")
    if z == 0.0:
        out = np.ones_like(bv)
    else:
        out = np.clip(_conditional_coverage_u(n_t, m, delta, alpha, z, 1.0 / bv), 0.0, 1.0)
    return float(out[0]) if scalar else out.reshape(np.shape(beta))


def _validate_split_args(n_t: int, m: int, delta: int, alpha: float) -> None:
    if not isinstance(n_t, (int, np.integer)) or n_t < 1:
        raise ConfigError(f"n_t must be a positive integer, got {n_t!r}")
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ConfigError(f"m must be a positive integer, got {m!r}")
    if not isinstance(delta, (int, np.integer)) or delta < 0:
        raise ConfigError(f"delta must be a nonnegative integer, got {delta!r}")
    if not (alpha > 2.0 and math.isfinite(alpha)):
        raise ConfigError(f"path-loss exponent must exceed 2, got {alpha!r}")


def coverage_pzf_interflimited(n_t: int, n_r: int, m: int, delta: int, alpha: float, z: float) -> float:
    """Zero-noise PZF coverage probability P[SINR > z] for the typical user.

    Scale-free: the base-station intensity drops out entirely.  ``n_r`` must
    equal ``m * n_t + delta``.
    """
    _validate_split_args(n_t, m, delta, alpha)
    if n_r != m * n_t + delta:
        raise ConfigError(f"n_r={n_r} does not match m*n_t+delta={m * n_t + delta}")
    if not (z >= 0.0 and math.isfinite(z)):
        raise ConfigError(f"threshold must be finite and >= 0, got {z!r}")
    if z == 0.0:
        return 1.0
    if m == 1:
        # No cancelled interferer: the distance ratio is degenerate at 1.
        val = _conditional_coverage_u(n_t, m, delta, alpha, z, np.ones(1))[0]
        return float(min(max(val, 0.0), 1.0))

    prev = None
    for n in _GL_LEVELS:
        u, w = _leggauss_unit(n)
        density = 2.0 * (m - 1) * u * (1.0 - u * u) ** (m - 2)
        val = float(np.dot(w, density * _conditional_coverage_u(n_t, m, delta, alpha, z, u)))
        if prev is not None and abs(val - prev) <= _GL_TOL * (1.0 + abs(val)):
            return float(min(max(val, 0.0), 1.0))
        prev = val
    raise NumericError(
        f"distance-ratio average did not converge to {_GL_TOL} "
        f"(n_t={n_t}, m={m}, delta={delta}, alpha={alpha}, z={z})"
    )


def laplace_interference(s, R: float, lam: float, n_t: int, alpha: float):
    """Laplace transform of the interference from beyond radius R.

    E[exp(-s I)] for the aggregate interference of a Poisson field of
    intensity lam outside radius R, each station sending n_t unit-power
    streams through independent Rayleigh channels with path-loss exponent
    alpha.  Vectorized over s >= 0.
    """
    if not (R > 0.0 and lam > 0.0):
        raise ConfigError("need R > 0 and lam > 0")
    if not isinstance(n_t, (int, np.integer)) or n_t < 1:
        raise ConfigError(f"n_t must be a positive integer, got {n_t!r}")
    if not (alpha > 2.0):
        raise ConfigError(f"path-loss exponent must exceed 2, got {alpha!r}")
    sv = np.asarray(s, dtype=float)
    if np.any(sv < 0.0):
        raise ConfigError("transform argument must be >= 0")
    grown = lambda_kernel(0, n_t, alpha, R ** (-alpha) * sv)
    out = np.exp(-lam * math.pi * R**2 * (grown - 1.0))
    return float(out) if np.isscalar(s) else out


def _quad_checked(func, a, b, epsabs, epsrel, what: str, limit: int = 200) -> float:
    res = _integrate.quad(func, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=True)
    val, abserr = res[0], res[1]
    if len(res) > 3 and abserr > 100.0 * max(epsabs, epsrel * abs(val)):
        raise NumericError(f"quadrature failed for {what}: {res[3]}")
    return val


def coverage_pzf(request: PzfCoverageRequest) -> float:
    """PZF coverage probability with receiver noise, P[SINR > z].

    Evaluates the noise-capable law by a nested quadrature: the outer
    variable is the inverse distance ratio u = r/R (degenerate for m = 1),
    the inner one the serving-cell area rescaled so that the integrand
    becomes gamma-like.  With sigma2 = 0 this reproduces
    :func:`coverage_pzf_interflimited` (the inner integral is then a pure
    gamma moment); the agreement is part of the test suite.
    """
    cfg, split = request.config, request.split
    z = float(request.z)
    if z == 0.0:
        return 1.0
    n_t, m, delta, alpha = cfg.n_t, split.m, split.delta, cfg.alpha
    # Noise scale: z * n_t * sigma2 * E-free area factor; the density enters
    # only through this combination (and cancels entirely when sigma2 = 0).
    noise = z * n_t * cfg.sigma2 / (math.pi * cfg.lam) ** (alpha / 2.0)
    raw_terms = _signature_terms_raw(n_t, delta, alpha)
    half_alpha = alpha / 2.0

    def inner_integral(v: float) -> float:
        """Integral over the rescaled cell area at fixed u = v; returns the
        radial average times lambda0^{-m}."""
        x = z * v**alpha
        l0 = lambda_kernel(0, n_t, alpha, x)
        log_l0 = math.log(l0)
        log_lj = {j: math.log(lambda_kernel(j, n_t, alpha, x)) for j in range(1, delta + 1)}
        scale = l0 / (v * v)  # the inner variable is y = (cell area) * scale
        log_noise_unit = math.log(noise) - half_alpha * math.log(scale) if noise > 0.0 else None

        log_coef = []
        y_power = []
        log_zv = math.log(z) + alpha * math.log(v) if v < 1.0 else math.log(z)
        for i, log_static, blocks, size_mult in raw_terms:
            base = log_static + i * log_zv - blocks * log_l0
            for j, cnt in size_mult:
                base += cnt * log_lj[j]
            q_max = delta - i if noise > 0.0 else 0
            for q in range(q_max + 1):
                if q and log_noise_unit is None:
                    break
                lc = base
                if q:
                    lc += q * log_noise_unit - _sp.gammaln(q + 1.0)
                log_coef.append(lc)
                y_power.append(m - 1 + blocks + half_alpha * q)
        log_coef_arr = np.array(log_coef)
        y_power_arr = np.array(y_power)
        noise_rate = noise / scale**half_alpha if noise > 0.0 else 0.0

        def h(y: float) -> float:
            ly = math.log(y)
            expo = -y - noise_rate * y**half_alpha
            return float(np.exp(log_coef_arr + y_power_arr * ly + expo).sum())

        val = _quad_checked(
            h, 0.0, np.inf, epsabs=_INNER_EPSABS, epsrel=1e-10,
            what=f"radial average at u={v:.6g}",
        )
        return val * math.exp(-m * log_l0)

    if m == 1:
        val = inner_integral(1.0)
    else:
        norm = 2.0 / math.factorial(m - 2)

        def outer(v: float) -> float:
            return norm * v * (1.0 - v * v) ** (m - 2) * inner_integral(v)

        val = _quad_checked(
            outer, 0.0, 1.0, epsabs=_OUTER_EPSABS, epsrel=1e-9,
            what=f"distance-ratio average (m={m}, delta={delta}, z={z:.6g})",
        )
    return float(min(max(val, 0.0), 1.0))


def mean_inverse_sinr(config: NetworkConfig, m: int) -> float:
    """Average inverse SINR of the PZF receiver in closed form.

    Infinite when delta = n_r - m*n_t is zero (the chi-squared signal gain
    then has a divergent inverse moment); raises for infeasible splits.
    The interferer sum collapses to an exact gamma-ratio telescoping term,
    valid for every alpha > 2.
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ConfigError(f"m must be a positive integer, got {m!r}")
    delta = config.n_r - m * config.n_t
    if delta < 0:
        raise ConfigError(f"infeasible split: m={m} exceeds n_r/n_t")
    if delta == 0:
        return math.inf
    s = config.alpha / 2.0
    g1s = math.gamma(1.0 + s)
    interference = g1s * math.exp(_sp.gammaln(m) - _sp.gammaln(m + s - 1.0)) / (s - 1.0)
    noise = config.sigma2 * (math.pi * config.lam) ** (-s) * g1s
    return config.n_t * g1s / (2.0 * delta) * (noise + interference)


def mean_inverse_sinr_surrogate(config: NetworkConfig, m: int) -> float:
    """Closed-form surrogate of :func:`mean_inverse_sinr`.

    Replaces the interferer sum by the integral of a monotone gamma-ratio
    bound; this is the objective whose stationary point gives the
    optimal-split rule, kept separate because its argmin can differ from
    the exact one by one step.
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ConfigError(f"m must be a positive integer, got {m!r}")
    delta = config.n_r - m * config.n_t
    if delta < 0:
        raise ConfigError(f"infeasible split: m={m} exceeds n_r/n_t")
    if delta == 0:
        return math.inf
    s = config.alpha / 2.0
    g1s = math.gamma(1.0 + s)
    interference = 2.0 * g1s * (m + config.alpha / 4.0 - 0.5) ** (1.0 - s) / (config.alpha - 2.0)
    noise = config.sigma2 * (math.pi * config.lam) ** (-s) * g1s
    return config.n_t * g1s / (2.0 * delta) * (noise + interference)


def _feasible_m_range(config: NetworkConfig) -> int:
    """Largest m with delta >= 1, or raise if none exists."""
    m_max = (config.n_r - 1) // config.n_t
    if m_max < 1:
        raise ConfigError(
            f"no feasible split with delta >= 1 for n_t={config.n_t}, n_r={config.n_r}"
        )
    return m_max


def optimal_m(config: NetworkConfig) -> int:
    """Cancellation order minimizing the surrogate mean inverse SINR.

    Interference-limited case (sigma2 = 0): the stationary point is in
    closed form and the rule is ceil((1 - 2/alpha)(n_r/n_t - 1/2)).  With
    noise the stationary equation is solved numerically and the smallest
    integer above the root is returned.  The result is clipped to the
    feasible range {1, ..., (n_r-1)//n_t}; configurations with no delta >= 1
    split raise ConfigError.

    Note this optimizes the *surrogate*; for a handful of parameter corners
    the exact objective's argmin differs by one (see
    :func:`argmin_mean_inverse_sinr` to get the exact minimizer).
    """
    m_max = _feasible_m_range(config)
    alpha, n_t, n_r = config.alpha, config.n_t, config.n_r
    if config.sigma2 == 0.0:
        m = math.ceil((1.0 - 2.0 / alpha) * (n_r / n_t - 0.5))
        return int(min(max(m, 1), m_max))

    sigma_term = config.sigma2 * (math.pi * config.lam) ** (-alpha / 2.0) * n_t
    shift = alpha / 4.0 - 0.5

    def stationarity(m_cont: float) -> float:
        x = m_cont + shift
        return (
            2.0 * n_t * x / (alpha - 2.0)
            + sigma_term * x ** (alpha / 2.0)
            - (n_r - m_cont * n_t)
        )

    if stationarity(0.0) >= 0.0:
        return 1
    hi = 1.0
    while stationarity(hi) < 0.0:
        hi *= 2.0
    root = _optimize.brentq(stationarity, hi / 2.0 if hi > 1.0 else 0.0, hi, xtol=1e-12)
    m = int(math.floor(root)) + 1
    return int(min(max(m, 1), m_max))


def argmin_mean_inverse_sinr(config: NetworkConfig) -> tuple[int, ...]:
    """All m minimizing the exact mean inverse SINR (ties included)."""
    m_max = _feasible_m_range(config)
    values = [mean_inverse_sinr(config, m) for m in range(1, m_max + 1)]
    best = min(values)
    return tuple(
        m for m, v in zip(range(1, m_max + 1), values) if v <= best * (1.0 + 1e-12)
    )
