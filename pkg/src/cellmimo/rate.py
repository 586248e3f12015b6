"""Ergodic rate and rate-distribution summaries.

The per-stream ergodic rate is the integral of the SINR CCDF over
t = log2(1 + z); rate quantiles invert the CCDF at a fixed probability.
Two transmission schemes are summarized:

* ``sm`` (spatial multiplexing): the base station sends n_t streams, one
  per user; each user decodes its own stream, so the cell sum rate is
  n_t times the per-stream ergodic rate, and the rate-CDF quantile maps a
  SINR threshold through c = n_t * log2(1 + z).
* ``sst`` (single-stream transmission): one stream, users share the channel
  by time/frequency division; the sum rate is the single-stream ergodic
  rate C(1, n_r) and quantiles map through c = log2(1 + z).

That quantile mapping is the ``calibrated`` convention; a ``per-stream``
alternative (no n_t factor for sm, a 1/n_t share for sst) is exposed for
users who want per-user numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy import integrate as _integrate
from scipy import optimize as _optimize

from .errors import ConfigError, NumericError
from .geometry import NetworkConfig, PzfSplit
from .mmse import MmseCoverageRequest, coverage_mmse, coverage_mmse_interflimited
from .pzf import (
    PzfCoverageRequest,
    coverage_pzf,
    coverage_pzf_interflimited,
    optimal_m,
)

__all__ = [
    "RateProfile",
    "default_pzf_split",
    "sinr_ccdf",
    "ergodic_rate",
    "rate_quantile",
    "mean_sum_rate",
    "rate_profile",
]

_SCHEMES = ("sm", "sst")
_RECEIVERS = ("pzf", "mmse")
_CONVENTIONS = ("calibrated", "per-stream")


@dataclass(frozen=True)
class RateProfile:
    """Summary of the user rate distribution for one scheme/receiver pair."""

    mean_rate: float
    q05: float
    q80: float
    scheme: str
    receiver: str


def default_pzf_split(config: NetworkConfig) -> PzfSplit:
    """Default cancellation split for rate sweeps.

    Uses the optimal-split rule where a delta >= 1 split exists, otherwise
    falls back to m = 1; always returns a feasible split (delta >= 0).
    """
    m_cap = config.n_r // config.n_t
    if m_cap < 1:
        raise ConfigError(
            f"PZF needs n_r >= n_t (got n_t={config.n_t}, n_r={config.n_r})"
        )
    try:
        m = optimal_m(config)
    except ConfigError:
        m = 1
    return PzfSplit.for_config(config, min(m, m_cap))


def sinr_ccdf(config: NetworkConfig, receiver: str, m: int | None = None) -> Callable[[float], float]:
    """SINR CCDF z -> P[SINR > z] for the given receiver.

    For ``pzf``, ``m`` picks the cancellation order (default: the
    optimal-split rule).  Zero-noise configurations route to the
    interference-limited laws, which are faster and intensity-free.
    """
    if receiver not in _RECEIVERS:
        raise ConfigError(f"unknown receiver {receiver!r}; expected one of {_RECEIVERS}")
    if receiver == "mmse":
        if m is not None:
            raise ConfigError("the MMSE receiver takes no cancellation order")
        if config.sigma2 == 0.0:
            n_t, n_r, alpha = config.n_t, config.n_r, config.alpha
            return lambda z: coverage_mmse_interflimited(n_t, n_r, alpha, z)
        return lambda z: coverage_mmse(MmseCoverageRequest(config=config, z=z))

    split = default_pzf_split(config) if m is None else PzfSplit.for_config(config, m)
    if config.sigma2 == 0.0:
        n_t, n_r, alpha = config.n_t, config.n_r, config.alpha
        return lambda z: coverage_pzf_interflimited(n_t, n_r, split.m, split.delta, alpha, z)
    return lambda z: coverage_pzf(PzfCoverageRequest(config=config, split=split, z=z))


def ergodic_rate(
    coverage_fn: Callable[[float], float],
    *,
    ccdf_floor: float = 1e-8,
    t_max: float = 256.0,
) -> float:
    """Per-stream ergodic rate E[log2(1 + SINR)] in bits/s/Hz.

    Integrates the CCDF over t = log2(1 + z) up to a cutoff T found by
    doubling until the CCDF drops below ``ccdf_floor``; the neglected tail
    is below ccdf_floor * alpha/(2 ln 2) for every law in this package.
    Raises :class:`NumericError` if no such T exists below ``t_max``.
    """
    t_hi = 8.0
    while coverage_fn(2.0**t_hi - 1.0) >= ccdf_floor:
        t_hi *= 2.0
        if t_hi > t_max:
            raise NumericError(
                f"rate integral truncation budget exhausted (T > {t_max}); "
                "the CCDF decays too slowly"
            )
    val, abserr = _integrate.quad(
        lambda t: coverage_fn(2.0**t - 1.0), 0.0, t_hi,
        epsabs=1e-9, epsrel=1e-7, limit=300,
    )
    if abserr > 1e-5 * max(1.0, abs(val)):
        raise NumericError(f"rate integral did not converge (abserr={abserr:.2e})")
    return float(val)


def rate_quantile(
    scheme: str,
    coverage_fn: Callable[[float], float],
    n_t: int,
    q: float,
    *,
    convention: str = "calibrated",
) -> float:
    """q-quantile of the user rate distribution, in bits/s/Hz.

    Solves P[SINR <= z_q] = q on the SINR axis, then maps through the
    scheme's rate function.  q = 0.05 is the usual cell-edge number, q = 0.8
    a near-peak one.
    """
    if scheme not in _SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}; expected one of {_SCHEMES}")
    if convention not in _CONVENTIONS:
        raise ConfigError(f"unknown convention {convention!r}; expected one of {_CONVENTIONS}")
    if not (0.0 < q < 1.0):
        raise ConfigError(f"quantile level must be in (0, 1), got {q!r}")
    if not isinstance(n_t, int) or n_t < 1:
        raise ConfigError(f"n_t must be a positive integer, got {n_t!r}")

    target = 1.0 - q  # CCDF value at the quantile threshold

    def shifted(z: float) -> float:
        return coverage_fn(z) - target

    hi = 1.0
    while shifted(hi) > 0.0:
        hi *= 4.0
        if hi > 2.0**256:
            raise NumericError("quantile bracket search ran away; CCDF decays too slowly")
    z_q = _optimize.brentq(shifted, 0.0, hi, xtol=1e-14, rtol=1e-12)

    per_stream = math.log2(1.0 + z_q)
    if scheme == "sm":
        return n_t * per_stream if convention == "calibrated" else per_stream
    return per_stream if convention == "calibrated" else per_stream / n_t


def mean_sum_rate(
    scheme: str,
    n_t: int,
    n_r: int,
    receiver: str,
    *,
    alpha: float = 4.0,
    sigma2: float = 0.0,
    lam: float = 1.0,
    m: int | None = None,
) -> float:
    """Mean downlink sum rate of a cell, in bits/s/Hz.

    ``sm``: n_t streams to n_t users, sum rate n_t * C(n_t, n_r).
    ``sst``: one stream shared by time division, sum rate C(1, n_r).
    """
    if scheme not in _SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}; expected one of {_SCHEMES}")
    stream_n_t = n_t if scheme == "sm" else 1
    config = NetworkConfig(lam=lam, alpha=alpha, sigma2=sigma2, n_t=stream_n_t, n_r=n_r)
    rate = ergodic_rate(sinr_ccdf(config, receiver, m=m))
    return n_t * rate if scheme == "sm" else rate


def rate_profile(
    scheme: str,
    n_t: int,
    n_r: int,
    receiver: str,
    *,
    alpha: float = 4.0,
    sigma2: float = 0.0,
    lam: float = 1.0,
    m: int | None = None,
    convention: str = "calibrated",
) -> RateProfile:
    """Mean sum rate plus the 5% (cell-edge) and 80% rate quantiles."""
    stream_n_t = n_t if scheme == "sm" else 1
    config = NetworkConfig(lam=lam, alpha=alpha, sigma2=sigma2, n_t=stream_n_t, n_r=n_r)
    ccdf = sinr_ccdf(config, receiver, m=m)
    mean = ergodic_rate(ccdf)
    if scheme == "sm":
        mean = n_t * mean
    return RateProfile(
        mean_rate=mean,
        q05=rate_quantile(scheme, ccdf, n_t, 0.05, convention=convention),
        q80=rate_quantile(scheme, ccdf, n_t, 0.80, convention=convention),
        scheme=scheme,
        receiver=receiver,
    )
