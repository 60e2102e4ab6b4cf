import numpy as np
import pytest

from ghkernel import univariate
from ghkernel.contracts import KernelParams, ReasonCode


def test_make_spherical_parameterization():
    assert univariate.make_spherical(3, 1.0).shapes == (3.0, 3.5, 6.0)
    assert univariate.make_spherical(3, 0.0).shapes == (2.0, 2.5, 4.0)
    # fractional montee
    assert univariate.make_spherical(2, 0.25).shapes == (1.75, 2.25, 3.5)

    with pytest.raises(ValueError) as e:
        univariate.make_spherical(3, -0.5)
    assert str(e.value) == ReasonCode.GHK_ERROR_PRECONDITION.value


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_cubic_spherical_kernel_is_one_at_origin_and_vanishes_at_range(d):
    p = univariate.make_spherical(d, 1.0, a=2.0)
    assert univariate.cov_eval(p, d, 0.0) == 1.0
    assert univariate.cov_eval(p, d, 2.0) == 0.0
    assert 0.0 < univariate.cov_eval(p, d, 1.0) < 1.0


def test_make_askey_bounds_and_values():
    p = univariate.make_askey(2, 2.0)
    assert p.shapes == (1.5, 2.5, 3.0)
    assert univariate.make_askey(2, 1.5).shapes == (1.5, 2.25, 2.75)

    with pytest.raises(ValueError) as e:
        univariate.make_askey(2, 1.4)
    assert str(e.value) == ReasonCode.GHK_ERROR_PRECONDITION.value

    for r in (0.1, 0.3, 0.6, 0.9):
        assert univariate.cov_eval(univariate.make_askey(3, 2.5), 3, r) == pytest.approx((1.0 - r) ** 2.5, abs=1e-10)


def test_make_wendland_reduces_to_askey_and_checks_bounds():
    assert univariate.make_wendland(2, 0.0, 2.0).shapes == univariate.make_askey(2, 2.0).shapes

    with pytest.raises(ValueError) as e:
        univariate.make_wendland(3, 1.0, 2.5)
    assert str(e.value) == ReasonCode.GHK_ERROR_PRECONDITION.value

    with pytest.raises(ValueError) as e:
        univariate.make_wendland(3, -0.5, 3.0)
    assert str(e.value) == ReasonCode.GHK_ERROR_PRECONDITION.value


def test_wendland_sweep_stays_in_param_space():
    rng = np.random.default_rng(np.random.SeedSequence([11, 0]))
    for _ in range(100):
        d = int(rng.integers(1, 6))
        kappa = float(rng.uniform(0.0, 3.0))
        ell = (d + 1) / 2.0 + kappa + float(rng.uniform(0.0, 4.0))
        p = univariate.make_wendland(d, kappa, ell)
        assert univariate.check_param_space(p.alpha, p.beta, p.gamma_, d).in_space


def test_truncated_polynomial_spherical():
    poly = univariate.truncated_poly_coeffs(univariate.make_spherical(3, 0.0), 3)
    assert poly.shift_exponent == pytest.approx(1.0)
    assert poly.even == pytest.approx((1.0,))
    assert poly.shifted == pytest.approx((-1.5, 0.5))


def test_truncated_polynomial_askey_uses_the_exchanged_conditions():
    poly = univariate.truncated_poly_coeffs(univariate.make_askey(1, 2.0), 1)
    assert poly.even == pytest.approx((1.0, 1.0))
    assert poly.shifted == pytest.approx((-2.0,))


def test_truncated_polynomial_wendland_matches_closed_form():
    p = univariate.make_wendland(3, 1.0, 3.0)
    poly = univariate.truncated_poly_coeffs(p, 3)
    # (1 - r)^4 (1 + 4r) = 1 - 10 r^2 + 20 r^3 - 15 r^4 + 4 r^5
    assert poly.even == pytest.approx((1.0, -10.0, -15.0))
    assert poly.shifted == pytest.approx((20.0, 4.0))
    assert sum(poly.even) + sum(poly.shifted) == pytest.approx(0.0, abs=1e-10)

    for r in np.linspace(0.0, 1.1, 20):
        assert poly.evaluate(float(r)) == pytest.approx(univariate.cov_eval(p, 3, float(r)), abs=1e-10)


def test_truncated_polynomial_generic_instance():
    # alpha - d/2 = 3/4, N = 2, M = 2
    q = KernelParams(a=1.0, alpha=1.25, beta=2.5, gamma_=3.25)
    poly = univariate.truncated_poly_coeffs(q, 1)
    assert len(poly.even) == 2
    assert len(poly.shifted) == 2
    assert poly.evaluate(0.0) == pytest.approx(1.0, abs=1e-12)
    for r in np.linspace(0.05, 0.95, 20):
        assert poly.evaluate(float(r)) == pytest.approx(univariate.cov_eval(q, 1, float(r)), abs=1e-10)


def test_truncated_polynomial_preconditions():
    with pytest.raises(ValueError) as e:
        univariate.truncated_poly_coeffs(KernelParams(a=1.0, alpha=2.0, beta=3.0, gamma_=4.0), 2)
    assert str(e.value) == ReasonCode.GHK_ERROR_PRECONDITION.value

    with pytest.raises(ValueError) as e:
        univariate.truncated_poly_coeffs(KernelParams(a=1.0, alpha=1.25, beta=3.3, gamma_=4.1), 1)
    assert str(e.value) == ReasonCode.GHK_ERROR_PRECONDITION.value
