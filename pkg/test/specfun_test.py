import math

import numpy as np
import pytest
from scipy import special

from fracsubspace.errors import DomainError, PoleError
from fracsubspace.specfun import (FracTrigParams, MLParams, epsilon_fn, epsilon_transform, frac_cos, frac_sin,
                                  gamma_ratio, gamma_real, laplace_numeric, mittag_leffler, ml_derivative, rgamma,
                                  rl_power_rate)


@pytest.mark.parametrize("x", [0.1, 0.5, 1.3, 2.5, 7.25, 33.3, -0.5, -1.7, -3.2])
def test_gamma_matches_scipy(x):
    assert gamma_real(x) == pytest.approx(special.gamma(x), rel=1e-13)


@pytest.mark.parametrize("x", [0, -1, -4, 0.0, -2.0])
def test_gamma_poles(x):
    with pytest.raises(PoleError):
        gamma_real(x)
    assert rgamma(x) == 0.0


def test_gamma_ratio_at_denominator_pole_is_zero():
    assert gamma_ratio(1.5, -2) == 0.0
    assert gamma_ratio(2.5, 1.5) == pytest.approx(1.5)


def test_gamma_ratio_large_arguments():
    assert gamma_ratio(180.5, 180.0) == pytest.approx(math.exp(math.lgamma(180.5) - math.lgamma(180.0)))


def test_rl_power_rate():
    assert rl_power_rate(0.3) == pytest.approx(special.gamma(0.7) / special.gamma(0.4))
    # 1/Gamma(0) = 0
    assert rl_power_rate(0.5) == 0.0
    assert rl_power_rate(1) == -1.0


def test_ml_reduces_to_exponential():
    p = MLParams(1.0, 1.0)
    for z in np.linspace(-5, 5, 101):
        assert abs(mittag_leffler(p, z) - math.exp(z)) <= 1e-12


def test_ml_two_is_cosh_of_root():
    p = MLParams(2.0, 1.0)
    for z in np.linspace(0, 5, 51):
        assert abs(mittag_leffler(p, z) - math.cosh(math.sqrt(z))) <= 1e-12


def test_ml_matches_direct_sum():
    alpha, beta, z = 0.7, 1.3, -1.2
    direct = sum(z ** k / special.gamma(alpha * k + beta) for k in range(80))
    assert mittag_leffler(MLParams(alpha, beta), z) == pytest.approx(direct, rel=1e-13)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_ml_derivatives_of_exponential(n):
    assert ml_derivative(MLParams(1.0, 1.0), n, 0.8) == pytest.approx(math.exp(0.8), rel=1e-13)


def test_ml_rejects_bad_parameters():
    with pytest.raises(DomainError):
        MLParams(0.0, 1.0)
    with pytest.raises(DomainError):
        ml_derivative(MLParams(0.5), -1, 1.0)


@pytest.mark.parametrize("t", [0.0, 0.3, 1.0, 2.2])
def test_fractional_trig_at_order_one(t):
    p = FracTrigParams(1.0, 1.5)
    assert frac_cos(p, t) == pytest.approx(math.cos(1.5 * t), abs=1e-13)
    assert frac_sin(p, t) == pytest.approx(math.sin(1.5 * t), abs=1e-13)


def test_epsilon_fn_exponential_case():
    assert epsilon_fn(0, 0.7, 2.0, MLParams(1.0, 1.0)) == pytest.approx(math.exp(1.4), rel=1e-13)
    assert epsilon_fn(0, 0.7, 2.0, MLParams(1.0, 1.0), sign=-1) == pytest.approx(math.exp(-1.4), rel=1e-13)
    # eps_1(t, a; 1, 1) = t e^(a t)
    assert epsilon_fn(1, 0.7, 2.0, MLParams(1.0, 1.0)) == pytest.approx(0.7 * math.exp(1.4), rel=1e-13)


def test_epsilon_fn_domain():
    with pytest.raises(DomainError):
        epsilon_fn(0, 0.0, 1.0, MLParams(0.5, 1.0))
    with pytest.raises(ValueError):
        epsilon_fn(0, 1.0, 1.0, MLParams(0.5, 1.0), sign=2)


@pytest.mark.parametrize("n", [0, 1])
@pytest.mark.parametrize("a", [0.5, 1.0])
@pytest.mark.parametrize("alpha", [0.6, 0.9])
@pytest.mark.parametrize("beta", [1.0, 1.3])
@pytest.mark.parametrize("s", [2.0, 4.0])
def test_epsilon_laplace_pair_decaying(n, a, alpha, beta, s):
    p = MLParams(alpha, beta)
    numeric = laplace_numeric(lambda t: epsilon_fn(n, t, a, p, sign=-1), s, horizon=40.0)
    assert numeric == pytest.approx(epsilon_transform(n, s, a, p, sign=-1), rel=1e-6)


@pytest.mark.parametrize("n,a,alpha,beta", [(0, 0.5, 0.9, 1.0), (1, 1.0, 0.9, 1.3)])
def test_epsilon_laplace_pair_growing(n, a, alpha, beta):
    p = MLParams(alpha, beta)
    numeric = laplace_numeric(lambda t: epsilon_fn(n, t, a, p), 4.0, horizon=40.0)
    assert numeric == pytest.approx(epsilon_transform(n, 4.0, a, p), rel=1e-6)


def test_laplace_domain():
    with pytest.raises(DomainError):
        laplace_numeric(math.exp, 0.0, 1.0)
    with pytest.raises(DomainError):
        laplace_numeric(math.exp, 1.0, -1.0)


def test_gamma_recurrence_on_grid():
    for k in range(-200, 201):
        x = k / 20
        if x <= 0 and x == int(x):
            continue
        assert gamma_real(x + 1) == pytest.approx(x * gamma_real(x), rel=1e-10), x


@pytest.mark.parametrize("gamma", [0.5, 0.8])
@pytest.mark.parametrize("t", [0.3, 1.0, 2.0])
def test_fractional_trig_are_parts_of_imaginary_ml(gamma, t):
    lam = 1.5
    u = lam * t ** gamma
    direct = sum((1j * u) ** k * special.rgamma(gamma * k + 1) for k in range(200))
    p = FracTrigParams(gamma, lam)
    assert frac_cos(p, t) == pytest.approx(direct.real, abs=1e-10)
    assert frac_sin(p, t) == pytest.approx(direct.imag, abs=1e-10)


@pytest.mark.parametrize("n,h", [(1, 1e-5), (2, 1e-4)])
def test_ml_derivative_matches_finite_differences(n, h):
    p, z = MLParams(0.5, 2.0), 0.2
    lower = ml_derivative(p, n - 1, z - h)
    upper = ml_derivative(p, n - 1, z + h)
    assert ml_derivative(p, n, z) == pytest.approx((upper - lower) / (2 * h), rel=1e-6)


def test_ml_cancellation_warns():
    with pytest.warns(UserWarning, match="lost precision"):
        mittag_leffler(MLParams(1.0, 1.0), -40.0)
