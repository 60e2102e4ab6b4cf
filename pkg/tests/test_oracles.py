import math

import numpy as np
import pytest

from ghkernel import oracles, univariate
from ghkernel.contracts import KernelParams, QuadratureMethod, QuadratureSpec, ReasonCode


@pytest.mark.parametrize("d", [1, 2, 3])
def test_series_integral_and_mixture_paths_agree(d):
    rng = np.random.default_rng(np.random.SeedSequence([30, d]))
    for _ in range(50):
        p = oracles.random_instance(d, rng)
        r = float(rng.uniform(0.01, 0.99)) * p.a
        ref = univariate.cov_eval(p, d, r)
        assert oracles.cov_eval_integral(p, d, r) == pytest.approx(ref, abs=1e-7), (p.shapes, r)
        assert oracles.cov_eval_mixture(p, d, r) == pytest.approx(ref, abs=1e-7), (p.shapes, r)


@pytest.mark.parametrize(
    "d,shapes,r",
    [
        (2, (2.6515, 8.1774, 11.7157), 0.0182),
        (1, (2.0367, 6.8420, 8.3664), 0.0158),
        (3, (1.7, 9.5, 11.9), 0.011),
        (2, (1.1721, 1.3582, 6.8501), 0.753),
    ],
)
def test_integral_paths_near_the_origin_and_with_a_weak_cauchy_exponent(d, shapes, r):
    alpha, beta, gamma_ = shapes
    p = KernelParams(a=1.0, alpha=alpha, beta=beta, gamma_=gamma_)
    ref = univariate.cov_eval(p, d, r)
    assert oracles.cov_eval_integral(p, d, r) == pytest.approx(ref, abs=1e-7)
    assert oracles.cov_eval_mixture(p, d, r) == pytest.approx(ref, abs=1e-7)


def test_integral_paths_reject_the_bessel_zero_partition():
    p = univariate.make_spherical(3, 0.0)
    q = QuadratureSpec(method=QuadratureMethod.BESSEL_ZERO_PARTITION)
    for fn in (oracles.cov_eval_integral, oracles.cov_eval_mixture):
        with pytest.raises(ValueError) as e:
            fn(p, 3, 0.5, q)
        assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value


def test_random_instances_land_in_the_parameter_space():
    rng = np.random.default_rng(np.random.SeedSequence([31, 0]))
    for d in (1, 2, 5):
        p = oracles.random_instance(d, rng, a=2.0)
        assert p.a == 2.0
        assert univariate.check_param_space(p.alpha, p.beta, p.gamma_, d).in_space


def test_integral_path_rejects_parameters_outside_the_space():
    with pytest.raises(ValueError) as e:
        oracles.cov_eval_integral(KernelParams(a=1.0, alpha=1.0, beta=1.1, gamma_=1.1), 1, 0.5)
    assert str(e.value) == ReasonCode.GHK_ERROR_PARAM_SPACE.value


def test_bessel_mixture_identity():
    assert oracles.mixture_identity_check(2.0, 2.5, 4.0, np.linspace(0.0, 20.0, 11)) <= 1e-8

    with pytest.raises(ValueError) as e:
        oracles.mixture_identity_check(2.0, 2.0, 4.0, [1.0])
    assert str(e.value) == ReasonCode.GHK_ERROR_PRECONDITION.value


def test_bessel_mixture_identity_on_random_nonnegative_spectra():
    rng = np.random.default_rng(np.random.SeedSequence([32, 0]))
    grid = np.linspace(0.0, 20.0, 11)
    for _ in range(50):
        p = oracles.random_instance(0, rng)
        assert oracles.mixture_identity_check(p.alpha, p.beta, p.gamma_, grid) <= 1e-8, p.shapes


def test_term_integration_identity():
    assert oracles.term_integration_identity_check(2.0, 3.0, 4.0, 3.5, 5.0, 1.0, 0.6) <= 1e-7

    with pytest.raises(ValueError) as e:
        oracles.term_integration_identity_check(2.0, 3.0, 4.0, 3.0, 5.0, 1.0, 0.6)
    assert str(e.value) == ReasonCode.GHK_ERROR_POLE.value


def test_cnd_bruteforce_is_seeded():
    m = np.eye(3)
    assert oracles.cnd_bruteforce(m, 300, seed=4) == oracles.cnd_bruteforce(m, 300, seed=4)


def test_selftest_passes():
    checks = oracles.selftest()
    assert [c.name for c in checks] == [
        "spherical_closed_form",
        "three_path_agreement",
        "bessel_mixture_identity",
        "cnd_variogram",
        "askey_gram_psd",
    ]
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]


@pytest.mark.nightly
@pytest.mark.parametrize("d,r,expected", [(1, 0.3, 0.7), (3, 0.5, 0.3125), (3, 1.5, 0.0)])
def test_hankel_roundtrip_recovers_the_spherical_kernel(d, r, expected):
    p = univariate.make_spherical(d, 0.0)
    assert oracles.hankel_roundtrip(p, d, r) == pytest.approx(expected, abs=1e-6)


@pytest.mark.nightly
def test_hankel_roundtrip_on_random_instances():
    rng = np.random.default_rng(np.random.SeedSequence([33, 0]))
    for k in range(20):
        d = 1 + k % 3
        p = oracles.random_instance(d, rng)
        r = float(rng.uniform(0.1, 0.9))
        assert oracles.hankel_roundtrip(p, d, r) == pytest.approx(univariate.cov_eval(p, d, r), abs=1e-6), (
            d,
            p.shapes,
            r,
        )


@pytest.mark.nightly
def test_hankel_roundtrip_with_adaptive_lobes():
    p = univariate.make_spherical(3, 0.0)
    q = QuadratureSpec(method=QuadratureMethod.ADAPTIVE_GAUSS_KRONROD, abs_tol=1e-10)
    assert oracles.hankel_roundtrip(p, 3, 0.5, q) == pytest.approx(0.3125, abs=1e-6)


def test_hankel_roundtrip_needs_a_full_acceleration_window():
    with pytest.raises(ValueError) as e:
        oracles.hankel_roundtrip(univariate.make_spherical(3, 0.0), 3, 0.5, lobes=oracles.SHANKS_WINDOW - 1)
    assert str(e.value) == ReasonCode.GHK_ERROR_PRECONDITION.value


def test_shanks_pair_accelerates_an_alternating_series():
    partial = np.cumsum([(-1.0) ** k / (k + 1) for k in range(oracles.SHANKS_WINDOW)])
    est, prev = oracles._shanks_pair(partial)
    assert est == pytest.approx(math.log(2.0), abs=1e-9)
    assert prev == pytest.approx(math.log(2.0), abs=1e-7)
    assert abs(est - math.log(2.0)) < abs(partial[-1] - math.log(2.0))


def test_shanks_pair_on_a_stationary_window_fails_closed():
    with pytest.raises(ValueError) as e:
        oracles._shanks_pair(np.full(oracles.SHANKS_WINDOW, 0.25))
    assert str(e.value) == ReasonCode.GHK_ERROR_NON_CONVERGENCE.value


@pytest.mark.nightly
def test_nightly_selftest_passes():
    checks = oracles.selftest(nightly=True)
    assert len(checks) == 7
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]
