"""Distance laws of the Poisson network seen from the typical user."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from cellmimo.errors import ConfigError
from cellmimo.geometry import (
    NetworkConfig,
    PzfSplit,
    beta_inverse_moment,
    mean_beta,
    pdf_beta,
    pdf_conditional_interferer,
    pdf_serving_distance,
    sample_beta,
)


def test_network_config_validation():
    NetworkConfig(lam=1.0, alpha=4.0, sigma2=0.0, n_t=2, n_r=4)  # fine
    with pytest.raises(ConfigError):
        NetworkConfig(lam=0.0, alpha=4.0, sigma2=0.0, n_t=2, n_r=4)
    with pytest.raises(ConfigError):
        NetworkConfig(lam=1.0, alpha=2.0, sigma2=0.0, n_t=2, n_r=4)
    with pytest.raises(ConfigError):
        NetworkConfig(lam=1.0, alpha=4.0, sigma2=-0.1, n_t=2, n_r=4)
    with pytest.raises(ConfigError):
        NetworkConfig(lam=1.0, alpha=4.0, sigma2=0.0, n_t=0, n_r=4)


def test_pzf_split_for_config():
    config = NetworkConfig(lam=1.0, alpha=4.0, sigma2=0.0, n_t=2, n_r=7)
    split = PzfSplit.for_config(config, 3)
    assert (split.m, split.delta) == (3, 1)
    with pytest.raises(ConfigError):
        PzfSplit.for_config(config, 4)  # delta would be -1
    with pytest.raises(ConfigError):
        PzfSplit(m=0, delta=1)


@pytest.mark.parametrize("lam", [0.25, 1.0, 3.0])
def test_serving_distance_pdf_normalizes(lam):
    total, _ = integrate.quad(lambda r: pdf_serving_distance(r, lam), 0.0, np.inf)
    assert total == pytest.approx(1.0, abs=1e-10)
    # Mean nearest-neighbour distance of a PPP is 1/(2 sqrt(lam)).
    mean, _ = integrate.quad(lambda r: r * pdf_serving_distance(r, lam), 0.0, np.inf)
    assert mean == pytest.approx(0.5 / math.sqrt(lam), rel=1e-9)


@pytest.mark.parametrize("m", [2, 3, 5])
def test_conditional_interferer_pdf_normalizes(m):
    r = 0.7
    total, _ = integrate.quad(
        lambda R: pdf_conditional_interferer(R, r, m, lam=1.3), r, np.inf
    )
    assert total == pytest.approx(1.0, abs=1e-9)
    assert pdf_conditional_interferer(0.5 * r, r, m, lam=1.3) == 0.0


@pytest.mark.parametrize("m", [2, 3, 4, 8])
def test_beta_pdf_normalizes_and_matches_mean(m):
    total, _ = integrate.quad(lambda b: pdf_beta(b, m), 1.0, np.inf)
    assert total == pytest.approx(1.0, abs=1e-9)
    mean_quad, _ = integrate.quad(lambda b: b * pdf_beta(b, m), 1.0, np.inf)
    assert mean_quad == pytest.approx(mean_beta(m), rel=1e-8)


def test_mean_beta_closed_form():
    # sqrt(pi) Gamma(m) / Gamma(m - 1/2)
    assert mean_beta(2) == pytest.approx(math.sqrt(math.pi) / math.gamma(1.5), rel=1e-12)
    assert mean_beta(5) == pytest.approx(
        math.sqrt(math.pi) * math.gamma(5) / math.gamma(4.5), rel=1e-12
    )


@pytest.mark.parametrize("m,nu", [(2, 1.0), (3, 2.0), (4, 0.5), (6, 3.3)])
def test_beta_inverse_moment_matches_quadrature(m, nu):
    moment_quad, _ = integrate.quad(
        lambda b: b ** (-nu) * pdf_beta(b, m), 1.0, np.inf
    )
    assert beta_inverse_moment(m, nu) == pytest.approx(moment_quad, rel=1e-8)


def test_beta_inverse_moment_trivial_order():
    assert beta_inverse_moment(3, 0.0) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("m", [2, 4, 7])
def test_sample_beta_distribution(m):
    rng = np.random.default_rng(20240817)
    samples = sample_beta(m, 20000, rng)
    assert np.all(samples >= 1.0)
    # CDF of the distance ratio: (1 - beta^-2)^(m-1).
    result = stats.kstest(samples, lambda b: (1.0 - b**-2.0) ** (m - 1))
    assert result.pvalue > 0.01


def test_domain_guards():
    with pytest.raises(ConfigError):
        pdf_beta(1.5, 1)
    with pytest.raises(ConfigError):
        mean_beta(1)
    with pytest.raises(ConfigError):
        beta_inverse_moment(2, -1.0)
    with pytest.raises(ConfigError):
        pdf_conditional_interferer(1.0, 0.5, 1, lam=1.0)
    with pytest.raises(ConfigError):
        pdf_serving_distance(1.0, 0.0)
