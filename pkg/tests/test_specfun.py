"""Special-function layer: Gauss 2F1 at negative argument and the coverage
kernels built on it.

The frozen oracle values below were computed with mpmath at 40 decimal
digits; the evaluator contract is 1e-12 relative accuracy over the library's
parameter domain (c = b + 1, z >= 0), which scipy's hyp2f1 does not meet at
large z.
"""

import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cellmimo.errors import ConfigError, PoleError
from cellmimo.specfun import (
    HypKernelParams,
    gamma,
    hyp2f1_negz,
    lambda_kernel,
    pochhammer,
    theta_kernel,
)

# (a, b, z) -> 2F1(a, b; b+1; -z), 22 significant digits.  The cases span
# all three evaluation paths: the transformed series (z <= 24), the
# large-z connection formula, and the near-degenerate fallback.
_HYP_ORACLES = {
    (2.0, -0.5, 4.0): 4.721446153382271509051,
    (3.5, 0.25, 0.5): 0.7834315665760718291929,
    (5.0, 1.5, 24.0): 0.001565566660514945217576,
    (2.5, 0.5, 1.0e6): 0.0006666666666664166670833,
    (4.25, 1.75, 300.0): 1.193326781842561429259e-5,
    (3.0000001, 1.0, 100.0): 0.004999509602226026005299,
}

_KERNEL_ORACLES = [
    # (kernel, order, n_t, alpha, z, value)
    (lambda_kernel, 0, 2, 4.0, 3.0, 4.095699046351326775891),
    (lambda_kernel, 1, 2, 4.0, 2.0, 0.4060943498487927639092),
    (lambda_kernel, 2, 3, 3.0, 10.0, 0.009236358449036510442202),
    (theta_kernel, 2, 3, 4.0, 5.0, 0.04691429340762426600475),
    (theta_kernel, 1, 4, 3.5, 0.3, 0.7509892386210761826407),
]


def test_hyp2f1_frozen_oracles():
    for (a, b, z), expected in _HYP_ORACLES.items():
        got = hyp2f1_negz(a, b, b + 1.0, z)
        assert got == pytest.approx(expected, rel=1e-13), (a, b, z)


def test_kernel_frozen_oracles():
    for kernel, order, n_t, alpha, z, expected in _KERNEL_ORACLES:
        assert kernel(order, n_t, alpha, z) == pytest.approx(expected, rel=1e-13)


def test_hyp2f1_at_zero_is_one():
    assert hyp2f1_negz(3.7, 0.25, 1.25, 0.0) == 1.0


def test_gamma_oracles():
    assert gamma(7.5) == pytest.approx(1871.254305797788346476, rel=1e-14)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(5.0) == 24.0


def test_pochhammer_values():
    assert pochhammer(-0.5, 3) == pytest.approx(-0.375, rel=1e-15)
    assert pochhammer(2.0, 4) == 120.0
    assert pochhammer(3.3, 0) == 1.0


def test_gamma_pole_raises():
    for x in (0.0, -1.0, -7.0):
        with pytest.raises(PoleError):
            gamma(x)


def test_hyp2f1_domain_errors():
    with pytest.raises(ConfigError):
        hyp2f1_negz(2.0, 0.5, 2.0, 1.0)  # c != b + 1
    with pytest.raises(ConfigError):
        hyp2f1_negz(2.0, 0.5, 1.5, -0.5)  # negative z
    with pytest.raises(ConfigError):
        hyp2f1_negz(2.0, -1.0, 0.0, 1.0)  # c at a pole


def test_kernel_params_dataclass():
    params = HypKernelParams(a=2.5, b=0.5, c=1.5)
    assert params.evaluate(2.0) == pytest.approx(hyp2f1_negz(2.5, 0.5, 1.5, 2.0), rel=1e-15)
    with pytest.raises(ConfigError):
        HypKernelParams(a=2.5, b=0.5, c=2.0)


@settings(deadline=None, max_examples=80)
@given(
    n_t=st.integers(min_value=1, max_value=8),
    order=st.integers(min_value=0, max_value=6),
    alpha=st.floats(min_value=2.1, max_value=6.0),
    log_z=st.floats(min_value=-3.0, max_value=8.0),
)
def test_hyp2f1_matches_mpmath(n_t, order, alpha, log_z):
    """1e-12 relative agreement with mpmath over the kernel parameter range."""
    z = 10.0**log_z
    b = order - 2.0 / alpha
    a = n_t + order
    got = hyp2f1_negz(float(a), b, b + 1.0, z)
    with mp.workdps(30):
        want = float(mp.hyp2f1(a, b, b + 1.0, -z))
    assert got == pytest.approx(want, rel=1e-12)


@settings(deadline=None, max_examples=40)
@given(
    n_t=st.integers(min_value=1, max_value=6),
    alpha=st.floats(min_value=2.1, max_value=6.0),
    z1=st.floats(min_value=0.0, max_value=1e4),
    z2=st.floats(min_value=0.0, max_value=1e4),
)
def test_lambda0_monotone_and_bounded(n_t, alpha, z1, z2):
    lo, hi = sorted((z1, z2))
    v_lo, v_hi = lambda_kernel(0, n_t, alpha, lo), lambda_kernel(0, n_t, alpha, hi)
    assert v_lo >= 1.0 and v_hi >= v_lo


@settings(deadline=None, max_examples=40)
@given(
    n_t=st.integers(min_value=1, max_value=6),
    order=st.integers(min_value=1, max_value=5),
    alpha=st.floats(min_value=2.1, max_value=6.0),
    z=st.floats(min_value=0.0, max_value=1e4),
)
def test_higher_kernels_in_unit_interval(n_t, order, alpha, z):
    for kernel in (lambda_kernel, theta_kernel):
        value = kernel(order, n_t, alpha, z)
        assert 0.0 < value <= 1.0


@settings(deadline=None, max_examples=40)
@given(
    x=st.floats(min_value=-5.0, max_value=5.0),
    n=st.integers(min_value=0, max_value=8),
)
def test_pochhammer_recurrence(x, n):
    assert pochhammer(x, n + 1) == pytest.approx(
        pochhammer(x, n) * (x + n), rel=1e-12, abs=1e-12
    )


def test_theta_equals_lambda_at_order_zero():
    for z in (0.1, 1.0, 50.0):
        assert theta_kernel(0, 3, 4.0, z) == pytest.approx(
            lambda_kernel(0, 3, 4.0, z), rel=1e-15
        )
