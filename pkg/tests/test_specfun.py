import math

import numpy as np
import pytest
from scipy import special

from hopflift.errors import DomainError, NonConvergence, ValidationError
from hopflift.specfun import (EULER_GAMMA, QuadratureSpec, digamma, gamma_ratio, integrate, jacobi_p10,
                              legendre_p, log_cos_integral, log_gamma)


def test_gamma_ratio_examples():
    assert gamma_ratio(1) == pytest.approx(2.0, abs=1e-14)
    assert gamma_ratio(2) == pytest.approx(8 / 3, abs=1e-14)
    assert abs(gamma_ratio(100) - 17.7245) < 0.05


def test_gamma_ratio_functional_equation():
    for r in range(1, 301):
        assert gamma_ratio(r + 1) / gamma_ratio(r) == pytest.approx((r + 1) / (r + 0.5), rel=1e-12)


def test_log_gamma():
    for x in (0.5, 1.0, 3.7, 150.0):
        assert log_gamma(x) == pytest.approx(special.gammaln(x), rel=1e-14)
    with pytest.raises(DomainError):
        log_gamma(0.0)
    with pytest.raises(DomainError):
        gamma_ratio(0)


def test_digamma_examples():
    assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-14)
    assert digamma(1.5) == pytest.approx(2 - EULER_GAMMA - 2 * math.log(2), abs=1e-14)
    assert digamma(2.0) - digamma(1.0) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(DomainError):
        digamma(-1.0)


@pytest.mark.parametrize("x", [1e-3, 0.1, 0.5, 2.25, 9.99, 10.0, 57.3, 1e6])
def test_digamma_against_scipy(x):
    assert digamma(x) == pytest.approx(special.digamma(x), rel=1e-13, abs=1e-14)


def test_jacobi_examples():
    for L in range(0, 21):
        assert jacobi_p10(L, 1.0) == L + 1
    u = np.linspace(-1, 1, 11)
    np.testing.assert_array_equal(jacobi_p10(0, u), np.ones_like(u))
    lhs = sum((2 * l + 1) * legendre_p(l, 0.3) for l in range(6))
    assert lhs == pytest.approx(6 * jacobi_p10(5, 0.3), abs=1e-12)
    with pytest.raises(DomainError):
        jacobi_p10(-1, 0.0)


def test_jacobi_and_legendre_against_scipy():
    u = np.linspace(-1, 1, 41)
    for n in (1, 2, 7, 30, 120):
        np.testing.assert_allclose(jacobi_p10(n, u), special.eval_jacobi(n, 1, 0, u), atol=1e-10 * (n + 1))
        np.testing.assert_allclose(legendre_p(n, u), special.eval_legendre(n, u), atol=1e-12)


def test_addition_theorem_chebyshev_nodes():
    nodes = np.cos((2 * np.arange(50) + 1) * np.pi / 100)
    for L in range(31):
        rhs = sum((2 * l + 1) * legendre_p(l, nodes) for l in range(L + 1))
        np.testing.assert_allclose((L + 1) * jacobi_p10(L, nodes), rhs, atol=1e-9)


def test_log_cos_examples():
    assert log_cos_integral(2, 0) == pytest.approx(math.pi * math.log(2))
    assert log_cos_integral(2, 2) == pytest.approx(0.0, abs=1e-15)
    quad = integrate(lambda x: np.log(3 + np.cos(x)), (0, math.pi))
    assert quad == pytest.approx(log_cos_integral(3, 1), abs=1e-9)
    # half-angle form of the a = b = 2 case
    half = integrate(lambda x: np.log(4 * np.cos(x / 2) ** 2), (0, math.pi),
                     QuadratureSpec(endpoint_singular=True))
    assert half == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(DomainError):
        log_cos_integral(1, 2)
    with pytest.raises(DomainError):
        log_cos_integral(-1, 0)


def test_integrate_examples():
    assert integrate(lambda u: u, (0, 1)) == pytest.approx(0.5, abs=1e-15)
    quarter = integrate(lambda t: np.log1p(t / np.sqrt(1 + t * t)) * t / (1 + t * t) ** 2, (0, math.inf))
    assert quarter == pytest.approx(0.25, abs=1e-8)
    assert integrate(lambda t: np.exp(-t), (0, math.inf)) == pytest.approx(1.0, abs=1e-10)


def test_integrate_gamma_identity():
    for r in range(1, 21):
        val = integrate(lambda t, r=r: np.log1p(t / np.sqrt(1 + t * t)) * t / (1 + t * t) ** (r + 1), (0, math.inf))
        ref = (gamma_ratio(r) - 1) / (4 * r * r)
        assert val == pytest.approx(ref, abs=1e-8)


def test_integrate_log_endpoint_singularity():
    val = integrate(lambda x: np.log(x), (0, 1), QuadratureSpec(endpoint_singular=True))
    assert val == pytest.approx(-1.0, abs=1e-9)


def test_nonconvergence_reports_estimate():
    with pytest.raises(NonConvergence) as info:
        integrate(lambda x: np.sin(1 / x), (1e-6, 1), QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14,
                                                                   max_subdivisions=3))
    assert math.isfinite(info.value.estimate)
    assert info.value.error > 0


def test_nonfinite_integrand():
    with pytest.raises(NonConvergence):
        integrate(lambda x: 1 / (x - 0.5) ** 2 * np.where(x == x, np.inf, 0), (0, 1))


def test_quadrature_spec_validation():
    with pytest.raises(ValidationError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(ValidationError):
        QuadratureSpec(max_subdivisions=0)
