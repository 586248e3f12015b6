"""Coverage laws for the linear MMSE receiver.

The MMSE filter maximizes post-combining SINR against the full
interference-plus-noise covariance, and its SINR distribution conditioned
on the interferer geometry has a rational-function structure: a ratio of a
polynomial in z (whose coefficients are symmetric functions of the
per-interferer gain ratios) to a product of (1 + gain * z) factors.
Averaging over the Poisson field term by term leaves finite sums over
integer partitions with the moment kernels of :mod:`cellmimo.specfun`, and
one radial integral per (partition length, noise order) pair.

``coverage_mmse_interflimited`` is the zero-noise law (scale-free: the
base-station intensity cancels; the radial integrals are exact gamma
moments).  ``coverage_mmse`` adds receiver noise; its radial integrals are
one-dimensional adaptive quadratures, cached per evaluation.

All terms of the partition sums are positive, so they are assembled in log
space and accumulated with exact summation.  The partition enumeration
grows quickly with the receive antenna count, hence the n_r <= 16 guard;
beyond that, use the Monte Carlo estimator, which has no such limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _integrate
from scipy import special as _sp

from .combinatorics import integer_partitions
from .errors import ConfigError, NumericError, SizeGuardError
from .geometry import NetworkConfig
from .specfun import theta_kernel

__all__ = [
    "MmseCoverageRequest",
    "coverage_mmse",
    "coverage_mmse_interflimited",
]

_MAX_NR = 16


@dataclass(frozen=True)
class MmseCoverageRequest:
    """A single MMSE coverage evaluation: network config plus threshold."""

    config: NetworkConfig
    z: float

    def __post_init__(self) -> None:
        if not (self.z >= 0.0 and math.isfinite(self.z)):
            raise ConfigError(f"threshold must be finite and >= 0, got {self.z!r}")


def _validate_antennas(n_t: int, n_r: int) -> None:
    for name, value in (("n_t", n_t), ("n_r", n_r)):
        if not isinstance(value, (int, np.integer)) or value < 1:
            raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    if n_r > _MAX_NR:
        raise SizeGuardError(
            f"n_r={n_r} exceeds the analytic-law guard ({_MAX_NR}); "
            "use the Monte Carlo estimator for larger arrays"
        )


def _partition_log_weight(parts, n_t: int, alpha: float, log_theta) -> float | None:
    """log of prod_j C(n_t, p_j) Theta_{p_j}(z) / (alpha p_j - 2), divided by
    the multiplicity factorials; None when a part exceeds n_t (binomial = 0).
    """
    total = 0.0
    for p in parts.parts:
        if p > n_t:
            return None
        total += math.log(math.comb(n_t, p)) + log_theta[p] - math.log(alpha * p - 2.0)
    total -= math.log(parts.multiplicity_factorial())
    return total


def coverage_mmse_interflimited(n_t: int, n_r: int, alpha: float, z: float) -> float:
    """Zero-noise MMSE coverage probability P[SINR > z] for the typical user.

    Scale-free in the base-station intensity.  The sum runs over the
    coefficient order m of the conditional SINR law, an own-cell split k,
    and integer partitions of m - k with parts at most n_t.
    """
    _validate_antennas(n_t, n_r)
    if not (alpha > 2.0 and math.isfinite(alpha)):
        raise ConfigError(f"path-loss exponent must exceed 2, got {alpha!r}")
    if not (z >= 0.0 and math.isfinite(z)):
        raise ConfigError(f"threshold must be finite and >= 0, got {z!r}")
    if z == 0.0:
        return 1.0

    log_theta = {s: math.log(theta_kernel(s, n_t, alpha, z)) for s in range(n_r)}
    log_pref = (1.0 - n_t) * math.log1p(z)
    log_z = math.log(z)

    log_terms = []
    for m in range(n_r):
        for k in range(min(m, n_t - 1) + 1):
            log_own = math.log(math.comb(n_t - 1, k))
            for parts in integer_partitions(m - k):
                lw = _partition_log_weight(parts, n_t, alpha, log_theta)
                if lw is None:
                    continue
                ell = parts.length
                log_terms.append(
                    log_pref
                    + m * log_z
                    + log_own
                    + lw
                    + ell * math.log(2.0)
                    + _sp.gammaln(ell + 1.0)
                    - (ell + 1) * log_theta[0]
                )
    total = math.fsum(math.exp(t) for t in log_terms)
    return float(min(max(total, 0.0), 1.0))


def coverage_mmse(request: MmseCoverageRequest) -> float:
    """MMSE coverage probability with receiver noise, P[SINR > z].

    Same partition sum as the zero-noise law plus a noise-order sum; each
    (partition length, noise order) pair needs one radial integral, cached
    across the partition loops.  With sigma2 = 0 the radial integrals are
    exact gamma moments and this reproduces
    :func:`coverage_mmse_interflimited` (which is also why the zero-noise
    law is intensity-free).
    """
    cfg = request.config
    n_t, n_r, alpha = cfg.n_t, cfg.n_r, cfg.alpha
    _validate_antennas(n_t, n_r)
    z = float(request.z)
    if z == 0.0:
        return 1.0

    log_theta = {s: math.log(theta_kernel(s, n_t, alpha, z)) for s in range(n_r)}
    theta0 = math.exp(log_theta[0])
    # Noise enters only through b = z n_t sigma2 / (pi lam Theta0)^(alpha/2).
    b = z * n_t * cfg.sigma2 / (math.pi * cfg.lam * theta0) ** (alpha / 2.0)
    log_pref = (1.0 - n_t) * math.log1p(z)
    log_z = math.log(z)
    half_alpha = alpha / 2.0

    radial_cache: dict[tuple[int, int], float] = {}

    def log_radial(ell: int, nv: int) -> float:
        """log of the radial integral for partition length ell, noise order nv:
        2^ell / Theta0^(ell+1) * int u^ell (b u^(a/2))^(nv-1)/(nv-1)! e^{-b u^(a/2)} e^{-u} du
        """
        key = (ell, nv)
        if key not in radial_cache:
            if b == 0.0:
                # Pure gamma moment; only nv = 1 ever reaches here.
                val = _sp.gammaln(ell + 1.0)
            else:
                log_b = math.log(b)

                def integrand(u: float) -> float:
                    lu = math.log(u)
                    expo = (
                        ell * lu
                        + (nv - 1) * (log_b + half_alpha * lu)
                        - _sp.gammaln(nv)
                        - b * u**half_alpha
                        - u
                    )
                    return math.exp(expo)

                res = _integrate.quad(
                    integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-11,
                    limit=200, full_output=True,
                )
                if len(res) > 3 and res[1] > 1e-10:
                    raise NumericError(
                        f"radial integral failed (ell={ell}, noise order={nv}): {res[3]}"
                    )
                if res[0] <= 0.0:
                    return -math.inf
                val = math.log(res[0])
            radial_cache[key] = (
                val + ell * math.log(2.0) - (ell + 1) * log_theta[0]
            )
        return radial_cache[key]

    log_terms = []
    for m in range(n_r):
        nv_max = 1 if b == 0.0 else n_r - m
        for nv in range(1, nv_max + 1):
            for k in range(min(m, n_t - 1) + 1):
                log_own = math.log(math.comb(n_t - 1, k))
                for parts in integer_partitions(m - k):
                    lw = _partition_log_weight(parts, n_t, alpha, log_theta)
                    if lw is None:
                        continue
                    lr = log_radial(parts.length, nv)
                    if lr == -math.inf:
                        continue
                    log_terms.append(log_pref + m * log_z + log_own + lw + lr)
    total = math.fsum(math.exp(t) for t in log_terms)
    return float(min(max(total, 0.0), 1.0))
