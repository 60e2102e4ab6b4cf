import math

import numpy as np
import pytest

from ghkernel import oracles, univariate
from ghkernel.contracts import KernelParams, ReasonCode


def _spherical3():
    return KernelParams(a=1.0, alpha=2.0, beta=2.5, gamma_=4.0)


def test_check_param_space_reports_each_condition():
    rep = univariate.check_param_space(2.0, 2.5, 4.0, 3)
    assert rep.in_space
    assert rep.boundary

    rep = univariate.check_param_space(2.0, 2.1, 2.1, 3)
    assert not rep.in_space
    assert rep.cond_alpha
    assert rep.failing_conditions() == ["cond_product", "cond_sum"]

    rep = univariate.check_param_space(1.0, 2.0, 2.0, 1)
    assert rep.in_space
    assert not rep.boundary

    # d = 0 is the spectral set: only alpha > 0 is asked of alpha
    assert univariate.check_param_space(0.2, 3.0, 3.0, 0).in_space
    assert not univariate.check_param_space(0.2, 3.0, 3.0, 1).in_space


def test_check_param_space_rejects_bad_input():
    with pytest.raises(ValueError) as e:
        univariate.check_param_space(1.0, 2.0, 2.0, -1)
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value

    with pytest.raises(ValueError) as e:
        univariate.check_param_space(1.0, math.inf, 2.0, 1)
    assert str(e.value) == ReasonCode.GHK_ERROR_BAD_NUMBER.value


def test_zeta_normalizer_reference_and_scaling():
    p = KernelParams(a=1.0, alpha=1.0, beta=2.0, gamma_=2.0)
    assert univariate.zeta_normalizer(p, 1) == pytest.approx(math.pi / 4.0, rel=1e-13)

    sp = _spherical3()
    assert univariate.zeta_normalizer(sp, 3) == pytest.approx(math.pi / 6.0, rel=1e-13)
    doubled = KernelParams(a=2.0, alpha=2.0, beta=2.5, gamma_=4.0)
    assert univariate.zeta_normalizer(doubled, 3) == pytest.approx(8.0 * math.pi / 6.0, rel=1e-13)


def test_cov_eval_reference_kernels():
    assert univariate.cov_eval(_spherical3(), 3, 0.5) == pytest.approx(0.3125, abs=1e-12)
    assert univariate.cov_eval(univariate.make_askey(2, 2.0), 2, 0.25) == pytest.approx(0.5625, abs=1e-12)
    assert univariate.cov_eval(univariate.make_spherical(1, 0.0), 1, 0.5) == pytest.approx(0.5, abs=1e-12)
    wendland = univariate.make_wendland(3, 1.0, 3.0)
    assert univariate.cov_eval(wendland, 3, 0.5) == pytest.approx(0.1875, abs=1e-12)


def test_cov_eval_support_normalization_and_variance():
    p = KernelParams(a=2.0, alpha=2.0, beta=2.5, gamma_=4.0, sigma2=3.0)
    assert univariate.cov_eval(p, 3, 0.0) == 3.0
    assert univariate.cov_eval(p, 3, 2.0) == 0.0
    assert univariate.cov_eval(p, 3, 7.5) == 0.0
    assert univariate.cov_eval(p, 3, 1.0) == pytest.approx(3.0 * 0.3125, abs=1e-12)


def test_cov_eval_fails_closed():
    with pytest.raises(ValueError) as e:
        univariate.cov_eval(KernelParams(a=1.0, alpha=2.0, beta=2.1, gamma_=2.1), 3, 0.5)
    assert str(e.value) == ReasonCode.GHK_ERROR_PARAM_SPACE.value
    assert e.value.report.failing_conditions() == ["cond_product", "cond_sum"]

    with pytest.raises(ValueError) as e:
        univariate.cov_eval(_spherical3(), 3, -0.1)
    assert str(e.value) == ReasonCode.GHK_ERROR_DOMAIN.value

    with pytest.raises(ValueError) as e:
        univariate.cov_eval(_spherical3(), 0, 0.5)
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value


def test_cov_eval_many_matches_pointwise():
    radii = np.linspace(0.0, 1.2, 13)
    many = univariate.cov_eval_many(_spherical3(), 3, radii)
    expected = np.where(radii < 1.0, 1.0 - 1.5 * radii + 0.5 * radii**3, 0.0)
    assert np.allclose(many, expected, atol=1e-12)


def test_monotone_decreasing_and_scale_invariant_on_random_instances():
    rng = np.random.default_rng(np.random.SeedSequence([7, 1]))
    radii = np.linspace(0.0, 1.0, 21)
    for d in (1, 2, 3):
        for _ in range(8):
            p = oracles.random_instance(d, rng)
            vals = univariate.cov_eval_many(p, d, radii)
            assert vals[0] == 1.0
            assert np.all(np.diff(vals) <= 1e-12)
            q = KernelParams(a=2.5, alpha=p.alpha, beta=p.beta, gamma_=p.gamma_)
            assert univariate.cov_eval(q, d, 2.5 * 0.4) == pytest.approx(univariate.cov_eval(p, d, 0.4), abs=1e-12)


def test_cov_eval_decreases_in_beta_and_gamma():
    base = KernelParams(a=1.0, alpha=2.0, beta=3.0, gamma_=4.0)
    wider_beta = KernelParams(a=1.0, alpha=2.0, beta=3.5, gamma_=4.0)
    wider_gamma = KernelParams(a=1.0, alpha=2.0, beta=3.0, gamma_=4.5)
    for r in (0.2, 0.5, 0.8):
        g = univariate.cov_eval(base, 2, r)
        assert univariate.cov_eval(wider_beta, 2, r) < g
        assert univariate.cov_eval(wider_gamma, 2, r) < g


def test_cov_derivative_spherical():
    p = _spherical3()
    assert univariate.cov_derivative(p, 3, 0.0) == pytest.approx(-1.5, abs=1e-12)
    assert univariate.cov_derivative(p, 3, 0.5) == pytest.approx(-1.125, abs=1e-10)
    assert univariate.cov_derivative(p, 3, 1.0) == 0.0
    assert univariate.cov_derivative(p, 3, 1.5) == 0.0


def test_cov_derivative_origin_cases():
    askey = univariate.make_askey(1, 2.0)
    assert univariate.cov_derivative(askey, 1, 0.0) == pytest.approx(-2.0, abs=1e-12)
    rough = KernelParams(a=1.0, alpha=0.8, beta=3.0, gamma_=3.0)
    assert univariate.cov_derivative(rough, 1, 0.0) == -math.inf
    smooth = univariate.make_wendland(3, 1.0, 3.0)
    assert univariate.cov_derivative(smooth, 3, 0.0) == 0.0


@pytest.mark.parametrize("d", [1, 2, 3])
def test_cov_derivative_matches_finite_differences(d):
    rng = np.random.default_rng(np.random.SeedSequence([7, 3, d]))
    h = 1e-4
    for _ in range(20):
        p = oracles.random_instance(d, rng)
        r = float(rng.uniform(0.02, 0.95))
        if abs(r - math.sqrt(0.5)) < 1e-3:
            # series and connection paths meet at r = a/√2
            continue
        g = univariate.cov_eval_many(p, d, [r - 2 * h, r - h, r + h, r + 2 * h])
        numeric = (g[0] - 8.0 * g[1] + 8.0 * g[2] - g[3]) / (12.0 * h)
        assert univariate.cov_derivative(p, d, r) == pytest.approx(numeric, rel=1e-6, abs=1e-12), (p.shapes, r)


def test_origin_expansion_splits_the_spherical_kernel():
    regular, singular = univariate.origin_expansion(_spherical3(), 3, 0.5)
    assert regular == pytest.approx(1.0, abs=1e-10)
    assert singular == pytest.approx(-0.6875, abs=1e-10)

    with pytest.raises(ValueError) as e:
        univariate.origin_expansion(KernelParams(a=1.0, alpha=2.0, beta=3.0, gamma_=4.0), 2, 0.5)
    assert str(e.value) == ReasonCode.GHK_ERROR_POLE.value

    with pytest.raises(ValueError) as e:
        univariate.origin_expansion(_spherical3(), 3, 1.0)
    assert str(e.value) == ReasonCode.GHK_ERROR_DOMAIN.value


def test_range_and_origin_exponents():
    eps = np.geomspace(1e-4, 1e-2, 9)
    sp = _spherical3()
    at_range = [univariate.cov_eval(sp, 3, 1.0 - e) for e in eps]
    # beta - alpha + gamma - d/2 - 1 = 2
    assert oracles.fit_loglog_slope(eps, at_range) == pytest.approx(2.0, abs=0.05)

    askey = univariate.make_askey(1, 2.0)
    drop = [1.0 - univariate.cov_eval(askey, 1, e) for e in eps]
    # 2 alpha - d = 1
    assert oracles.fit_loglog_slope(eps, drop) == pytest.approx(1.0, abs=0.05)

    rough = KernelParams(a=1.0, alpha=0.8, beta=3.0, gamma_=3.0)
    drop = [1.0 - univariate.cov_eval(rough, 1, e) for e in eps]
    assert oracles.fit_loglog_slope(eps, drop) == pytest.approx(0.6, abs=0.05)


def test_spectral_eval_origin_and_nonnegativity():
    sp = _spherical3()
    assert univariate.spectral_eval(sp, 3, 0.0) == pytest.approx(math.pi / 6.0, rel=1e-13)

    rng = np.random.default_rng(np.random.SeedSequence([7, 2]))
    freqs = np.linspace(0.0, 20.0, 201)
    for d in (1, 2, 3):
        for _ in range(4):
            p = oracles.random_instance(d, rng)
            dens = univariate.spectral_eval_many(p, d, freqs)
            assert np.all(dens >= -1e-10 * dens[0])

    with pytest.raises(ValueError) as e:
        univariate.spectral_eval(sp, 3, -1.0)
    assert str(e.value) == ReasonCode.GHK_ERROR_DOMAIN.value


@pytest.mark.nightly
@pytest.mark.parametrize("d", [1, 2, 3])
def test_spectral_eval_nonnegative_on_a_fine_grid(d):
    rng = np.random.default_rng(np.random.SeedSequence([7, 4, d]))
    freqs = np.linspace(0.0, 20.0, 1000)
    for _ in range(100):
        p = oracles.random_instance(d, rng)
        dens = univariate.spectral_eval_many(p, d, freqs)
        assert np.all(dens >= -1e-10 * dens[0]), p.shapes


@pytest.mark.parametrize("d,kappa", [(1, 0), (3, 0), (2, 1), (3, 1)])
def test_spherical_spectral_closed_form(d, kappa):
    p = univariate.make_spherical(d, float(kappa))
    for u in (0.0, 0.3, 1.1, 2.7):
        closed = univariate.spherical_spectral_closed_form(d, kappa, 1.0, u)
        assert closed == pytest.approx(univariate.spectral_eval(p, d, u), abs=1e-9)

    with pytest.raises(ValueError) as e:
        univariate.spherical_spectral_closed_form(d, 0.5, 1.0, 0.3)
    assert str(e.value) == ReasonCode.GHK_ERROR_PRECONDITION.value
