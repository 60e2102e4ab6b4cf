"""
Independent verification paths.

Integral forms of the covariance, the Hankel round trip from the spectral
density, hypergeometric identity checks, the convergence harness of the
asymptotic limits, Gram certification and small Gaussian field simulation.
None of these are production evaluation paths.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from typing import NamedTuple

import mpmath
import numpy as np
import numpy.typing as npt
from scipy import linalg, special

from . import multivariate, specfun, univariate
from .contracts import (
    ConvergenceTrace,
    FloatArray,
    GramResult,
    KernelError,
    KernelParams,
    LimitFamily,
    LimitKernelSpec,
    MultivarParams,
    NonConvergenceError,
    ParamSpaceError,
    PoleError,
    PreconditionError,
    QuadratureMethod,
    QuadratureSpec,
    ReasonCode,
    ValidationError,
)

logger = logging.getLogger(__name__)

DEFAULT_QUAD = QuadratureSpec()
HANKEL_QUAD = QuadratureSpec(method=QuadratureMethod.BESSEL_ZERO_PARTITION)

HANKEL_LOBES = 60
HANKEL_GAUSS_ORDER = 32
HANKEL_LOBE_GROWTH = 2
SHANKS_WINDOW = 16
HANKEL_ACCEPT = 1e-6

CONVERGENCE_R_POINTS = 121
CONVERGENCE_R_SPAN = 6.0

CLIP_WARN_FRACTION = 1e-8
SIM_PSD_TOL = 1e-8

RANDOM_SHAPE_SPAN = 6.0
RANDOM_BOX = 12.0
RANDOM_MAX_TRIES = 10_000


def _require_space(p: KernelParams, d: int) -> None:
    rep = univariate.check_param_space(p.alpha, p.beta, p.gamma_, d)
    if not rep.in_space:
        raise ParamSpaceError(f"{p.shapes} outside P_{d}", report=rep)


def _require_adaptive(q: QuadratureSpec) -> None:
    if q.method is not QuadratureMethod.ADAPTIVE_GAUSS_KRONROD:
        raise ValidationError(
            f"{q.method.value} only applies to the Hankel integral",
            code=ReasonCode.GHK_ERROR_INVALID_REQUEST,
        )


def _log_edge(u: float, expo: float, decay: bool) -> float:
    """
    expo·ln(h(u)/u) with h = expm1 (``decay=False``) or h(u) = 1 − e^{−u}; the ratio is 1 at u = 0.
    """
    if u <= 0.0:
        return 0.0
    if decay:
        log_h = math.log(-math.expm1(-u))
    else:
        log_h = u + math.log1p(-math.exp(-u)) if u > 1.0 else math.log(math.expm1(u))
    return expo * (log_h - math.log(u))


# ---------------------------------------------------------------------------
# alternative evaluations of the covariance
# ---------------------------------------------------------------------------


def cov_eval_integral(p: KernelParams, d: int, r: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """
    Finite-integral form

        Γ(β−d/2)/(Γ(α−d/2)Γ(β−α)) ∫_{x}^{1} t^{α−γ}(1−t)^{β−α−1}(t−x)^{γ−d/2−1} dt,  x = r²/a².

    Integrated in w = ln(t/x) ∈ [0, L], L = ln(1/x), so the peak near t ≈ x is
    spread over a unit scale. The endpoint powers w^{γ−d/2−1} and (L−w)^{β−α−1}
    go into QUADPACK's algebraic weight; what remains is smooth.
    """
    _require_adaptive(q)
    _require_space(p, d)
    if not (r >= 0.0):
        raise PreconditionError(f"radius must be >= 0, got {r}")
    if r == 0.0:
        return p.sigma2
    if r >= p.a:
        return 0.0
    half_d = d / 2.0
    span = -2.0 * math.log(r / p.a)
    near = p.gamma_ - half_d - 1.0
    far = p.beta - p.alpha - 1.0
    pref = specfun.log_gamma_ratio([p.beta - half_d], [p.alpha - half_d, p.beta - p.alpha])
    base = pref.log_abs - (p.alpha - half_d) * span

    def smooth(w: float) -> float:
        return math.exp(
            base
            + w * (p.alpha - p.gamma_ + 1.0)
            + _log_edge(w, near, decay=False)
            + _log_edge(span - w, far, decay=True)
        )

    val, _ = specfun.adaptive_quad(
        smooth,
        0.0,
        span,
        weight="alg",
        wvar=(near, far),
        epsabs=q.abs_tol,
        epsrel=1e-11,
        limit=q.max_subdivisions,
    )
    return p.sigma2 * pref.sign * val


def cov_eval_mixture(p: KernelParams, d: int, r: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """
    Beta mixture of powered quadratic times generalized Cauchy functions:

        Γ(γ−d/2)/(Γ(γ−α)Γ(α−d/2))·(1−x)^{C−1} ∫₀¹ t^{γ−α−1}(1−t)^{α−d/2−1}(1 + t·x/(1−t))^{α−β} dt.

    The factor (1−t)^{β−α} of the Cauchy term joins the weight at t = 1.
    """
    _require_adaptive(q)
    _require_space(p, d)
    if not (r >= 0.0):
        raise PreconditionError(f"radius must be >= 0, got {r}")
    if r == 0.0:
        return p.sigma2
    if r >= p.a:
        return 0.0
    half_d = d / 2.0
    x = (r / p.a) ** 2
    C = p.beta - p.alpha + p.gamma_ - half_d
    pref = specfun.log_gamma_ratio([p.gamma_ - half_d], [p.gamma_ - p.alpha, p.alpha - half_d])
    excess = p.beta - p.alpha

    def cauchy(t: float) -> float:
        return (1.0 - t + t * x) ** (-excess)

    val, _ = specfun.adaptive_quad(
        cauchy,
        0.0,
        1.0,
        weight="alg",
        wvar=(p.gamma_ - p.alpha - 1.0, p.beta - half_d - 1.0),
        epsabs=q.abs_tol,
        epsrel=1e-11,
        limit=q.max_subdivisions,
    )
    return p.sigma2 * pref.value * (1.0 - x) ** (C - 1.0) * val


def _bessel_zeros(nu: float, n: int) -> FloatArray:
    """First n positive zeros of J_nu for nu = d/2 − 1."""
    if nu == -0.5:
        return (np.arange(1, n + 1) - 0.5) * math.pi
    if nu == 0.5:
        return np.arange(1, n + 1) * math.pi
    if float(nu).is_integer():
        return np.asarray(special.jn_zeros(int(nu), n), dtype=float)
    return np.array([float(mpmath.besseljzero(nu, k)) for k in range(1, n + 1)])


def _lobes_fixed(p: KernelParams, nu: float, r: float, ends: FloatArray) -> FloatArray:
    half_d = nu + 1.0
    x, w = np.polynomial.legendre.leggauss(HANKEL_GAUSS_ORDER)
    lo, hi = ends[:-1, None], ends[1:, None]
    rho = 0.5 * (hi - lo) * x[None, :] + 0.5 * (hi + lo)
    weights = 0.5 * (hi - lo) * w[None, :]
    z2 = (math.pi * p.a * rho) ** 2
    z_max = math.pi * p.a * float(ends[-1])
    nodes = max(specfun.GRID_MIXTURE_NODES, int(8.0 * z_max))
    spectral = specfun.hyp1f2_neg_grid(p.alpha, p.beta, p.gamma_, z2.ravel(), nodes=nodes).reshape(rho.shape)
    integrand = rho**half_d * special.jv(nu, 2.0 * math.pi * rho * r) * spectral
    return np.asarray((integrand * weights).sum(axis=1), dtype=float)


def _lobes_adaptive(p: KernelParams, nu: float, r: float, ends: FloatArray, q: QuadratureSpec) -> FloatArray:
    half_d = nu + 1.0

    def integrand(rho: float) -> float:
        z2 = (math.pi * p.a * rho) ** 2
        bessel = float(special.jv(nu, 2.0 * math.pi * rho * r))
        return rho**half_d * bessel * specfun.hyp1f2_neg(p.alpha, p.beta, p.gamma_, z2)

    out = np.empty(len(ends) - 1)
    for k in range(len(out)):
        out[k], _ = specfun.adaptive_quad(
            integrand, float(ends[k]), float(ends[k + 1]), epsabs=q.abs_tol, limit=q.max_subdivisions
        )
    return out


def hankel_roundtrip(
    p: KernelParams, d: int, r: float, q: QuadratureSpec = HANKEL_QUAD, lobes: int = HANKEL_LOBES
) -> float:
    """
    Covariance rebuilt from the spectral density by the order-d Hankel transform

        2π·ζ_d / r^{d/2−1} ∫₀^∞ ρ^{d/2} J_{d/2−1}(2πρr) 1F2(α; β, γ; −(πaρ)²) dρ.

    The half line is cut at the zeros of J_{d/2−1}(2πρr) and the lobe partial
    sums are accelerated with Shanks' transformation. ``q.method`` picks the
    lobe rule: a fixed Gauss–Legendre rule on a shared spectral grid
    (``BesselZeroPartition``) or adaptive Gauss–Kronrod to ``q.abs_tol``.
    """
    _require_space(p, d)
    half_d = d / 2.0
    if not p.gamma_ > half_d:
        raise PreconditionError(f"Hankel integral needs gamma > d/2 = {half_d}")
    if not (r > 0.0):
        raise PreconditionError(f"Hankel round trip needs r > 0, got {r}")
    if lobes < SHANKS_WINDOW:
        raise PreconditionError(f"Hankel round trip needs at least {SHANKS_WINDOW} lobes, got {lobes}")
    nu = half_d - 1.0
    zeros = _bessel_zeros(nu, lobes * HANKEL_LOBE_GROWTH) / (2.0 * math.pi * r)
    est = prev = math.nan
    partial = np.zeros(1)
    n = lobes
    while n <= len(zeros):
        ends = np.concatenate([[0.0], zeros[:n]])
        if q.method is QuadratureMethod.BESSEL_ZERO_PARTITION:
            pieces = _lobes_fixed(p, nu, r, ends)
        else:
            pieces = _lobes_adaptive(p, nu, r, ends, q)
        partial = np.cumsum(pieces)
        est, prev = _shanks_pair(partial[-SHANKS_WINDOW:])
        logger.debug("hankel: r=%g lobes=%d method=%s shanks=%.12g prev=%.12g", r, n, q.method.value, est, prev)
        if math.isfinite(est) and abs(est - prev) <= HANKEL_ACCEPT * max(1.0, abs(est)):
            zeta = univariate.zeta_normalizer(p, d)
            return p.sigma2 * 2.0 * math.pi * zeta * est / r ** (half_d - 1.0)
        n *= 2
    raise NonConvergenceError(
        "Hankel lobe series did not settle under acceleration",
        partial_sum=float(partial[-1]),
        terms=len(partial),
        context={"estimate": est, "previous": prev},
    )


def _shanks_pair(window: npt.ArrayLike) -> tuple[float, float]:
    """
    Highest-order Shanks estimate and the next lower one.

    Row i of the epsilon table holds estimates at odd positions and auxiliary
    reciprocals at even positions; the last row always has an odd index, so
    its last entry and the last entry two rows up are both estimates.
    """
    table = mpmath.shanks([mpmath.mpf(float(v)) for v in np.asarray(window, dtype=float)])
    if len(table) < 4:
        raise NonConvergenceError(
            "Shanks table collapsed before two estimates were available",
            partial_sum=float(np.asarray(window, dtype=float)[-1]),
            terms=len(table),
        )
    return float(table[-1][-1]), float(table[-3][-1])


# ---------------------------------------------------------------------------
# identity checks
# ---------------------------------------------------------------------------


def mixture_identity_check(alpha: float, beta: float, gamma_: float, x_grid: Sequence[float]) -> float:
    """
    max over the grid of |1F2(α; β, γ; −x²) − Bessel beta mixture|, the series side in
    extended precision and the mixture side by weighted quadrature.
    """
    if not (beta > alpha > 0.0 and gamma_ > 0.0):
        raise PreconditionError("mixture identity needs beta > alpha > 0 and gamma > 0")
    coef = specfun.log_gamma_ratio([beta, gamma_], [alpha, beta - alpha]).value
    worst = 0.0
    for x in x_grid:
        x = float(x)
        series = float(mpmath.hyp1f2(alpha, beta, gamma_, -(mpmath.mpf(x) ** 2)))
        if x == 0.0:
            mixture = 1.0
        else:

            def bessel(t: float, x: float = x) -> float:
                y = x * math.sqrt(t)
                if y == 0.0:
                    return 1.0 / math.gamma(gamma_)
                return y ** (1.0 - gamma_) * float(special.jv(gamma_ - 1.0, 2.0 * y))

            val, _ = specfun.adaptive_quad(
                bessel, 0.0, 1.0, weight="alg", wvar=(alpha - 1.0, beta - alpha - 1.0), limit=400
            )
            mixture = coef * val
        worst = max(worst, abs(series - mixture))
    return worst


def term_integration_identity_check(
    alpha: float,
    beta: float,
    gamma_: float,
    beta_ij: float,
    gamma_ij: float,
    a: float,
    x: float,
) -> float:
    """
    |∫∫ 1F2(α; β, γ; −t₁t₂(ax)²) t₁^{β−1}(1−t₁)^{β_ij−β−1} t₂^{γ−1}(1−t₂)^{γ_ij−γ−1}
       − B(β, β_ij−β)·B(γ, γ_ij−γ)·1F2(α; β_ij, γ_ij; −(ax)²)|.
    """
    if beta_ij == beta or gamma_ij == gamma_:
        raise PoleError("Gamma(beta_ij - beta) or Gamma(gamma_ij - gamma) is at its pole")
    if not (beta_ij > beta > 0.0 and gamma_ij > gamma_ > 0.0 and alpha > 0.0):
        raise PreconditionError("identity needs beta_ij > beta > 0, gamma_ij > gamma > 0, alpha > 0")
    z2 = (a * x) ** 2

    def inner(t1: float) -> float:
        val, _ = specfun.adaptive_quad(
            lambda t2: specfun.hyp1f2_neg(alpha, beta, gamma_, t1 * t2 * z2),
            0.0,
            1.0,
            weight="alg",
            wvar=(gamma_ - 1.0, gamma_ij - gamma_ - 1.0),
        )
        return val

    lhs, _ = specfun.adaptive_quad(inner, 0.0, 1.0, weight="alg", wvar=(beta - 1.0, beta_ij - beta - 1.0))
    coef = specfun.log_gamma_ratio([beta, beta_ij - beta, gamma_, gamma_ij - gamma_], [beta_ij, gamma_ij])
    rhs = coef.value * float(mpmath.hyp1f2(alpha, beta_ij, gamma_ij, -mpmath.mpf(z2)))
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# asymptotic limits
# ---------------------------------------------------------------------------


def convergence_harness(
    target: LimitKernelSpec,
    path_lengths: int,
    d: int,
    first_step: int = 2,
    gaussian_route: str = "beta_to_alpha",
) -> ConvergenceTrace:
    """
    Walk the limit path m = first_step, …, first_step + path_lengths − 1 and record
    sup over r ∈ [0, 6b] of |cov_eval − limit_kernel_eval|.
    """
    if isinstance(path_lengths, bool) or not isinstance(path_lengths, int) or path_lengths < 1:
        raise PreconditionError("path_lengths must be a positive integer")
    radii = np.linspace(0.0, CONVERGENCE_R_SPAN * target.b, CONVERGENCE_R_POINTS)
    exact = np.array([univariate.limit_kernel_eval(target, float(r)) for r in radii])
    path: list[tuple[float, float, float, float]] = []
    errors: list[float] = []
    for m in range(first_step, first_step + path_lengths):
        params = univariate.limit_path(target, d, m, gaussian_route)
        rep = univariate.check_param_space(params.alpha, params.beta, params.gamma_, d)
        if not rep.in_space:
            raise PreconditionError(
                f"path leaves P_{d} at step {m}",
                context={"step": m, "failing": rep.failing_conditions(), "params": params.to_dict()},
            )
        approx = univariate.cov_eval_many(params, d, radii)
        err = float(np.max(np.abs(approx - exact)))
        logger.info("converge %s m=%d sup error %.3e", target.family.value, m, err)
        path.append((params.a, params.alpha, params.beta, params.gamma_))
        errors.append(err)
    name = target.family.value
    if target.family is LimitFamily.GAUSSIAN:
        name = f"{name}:{gaussian_route}"
    return ConvergenceTrace(target=target, parameter_path=tuple(path), sup_errors=tuple(errors), path_name=name)


# ---------------------------------------------------------------------------
# Gram matrices and simulation
# ---------------------------------------------------------------------------


def gram(points: npt.ArrayLike, p: KernelParams, d: int) -> GramResult:
    """Gram matrix of a univariate kernel; the single-variable case of the block assembly."""
    mp = MultivarParams(
        p=1,
        d=d,
        a_mat=np.array([[p.a]]),
        alpha_mat=np.array([[p.alpha]]),
        beta_mat=np.array([[p.beta]]),
        gamma_mat=np.array([[p.gamma_]]),
        rho_mat=np.array([[p.sigma2]]),
    )
    return multivariate.gram_multivar(mp, points)


class FieldSample(NamedTuple):
    samples: FloatArray
    empirical_cov: FloatArray
    clipped_mass: float


def simulate_field(
    points: npt.ArrayLike,
    p: KernelParams,
    d: int,
    n_realizations: int,
    seed: int,
    index: int = 0,
) -> FieldSample:
    """
    Zero-mean Gaussian realizations through the symmetric square root of the Gram matrix.

    Negative eigenvalues are clipped at zero; the generator is keyed by (seed, index).
    """
    if isinstance(n_realizations, bool) or not isinstance(n_realizations, int) or n_realizations < 1:
        raise PreconditionError("n_realizations must be a positive integer")
    g = gram(points, p, d)
    if not g.min_eig >= -SIM_PSD_TOL * max(abs(g.max_eig), 1.0):
        raise PreconditionError(
            "Gram matrix is not positive semidefinite",
            code=ReasonCode.GHK_ERROR_NOT_PSD,
            context={"min_eig": g.min_eig, "max_eig": g.max_eig},
        )
    eig, vec = linalg.eigh(g.matrix)
    clipped = float(-eig[eig < 0.0].sum())
    trace = float(np.trace(g.matrix))
    if clipped > CLIP_WARN_FRACTION * trace:
        logger.warning("clipped %.3e of eigenvalue mass (trace %.3e)", clipped, trace)
    root = (vec * np.sqrt(np.clip(eig, 0.0, None))) @ vec.T
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    z = rng.standard_normal((n_realizations, root.shape[0]))
    samples = z @ root
    emp = samples.T @ samples / n_realizations
    return FieldSample(samples=samples, empirical_cov=emp, clipped_mass=clipped)


# ---------------------------------------------------------------------------
# small helpers for property suites
# ---------------------------------------------------------------------------


def cnd_bruteforce(m: npt.ArrayLike, n_samples: int = 10_000, seed: int = 0) -> float:
    """max of ωᵀmω over random unit zero-sum vectors ω."""
    arr = np.asarray(m, dtype=float)
    p = arr.shape[0]
    if p < 2:
        return 0.0
    rng = np.random.default_rng(np.random.SeedSequence([seed, p]))
    omega = rng.standard_normal((n_samples, p))
    omega -= omega.mean(axis=1, keepdims=True)
    omega /= np.linalg.norm(omega, axis=1, keepdims=True)
    return float(np.einsum("ki,ij,kj->k", omega, arr, omega).max())


def fit_loglog_slope(xs: npt.ArrayLike, ys: npt.ArrayLike) -> float:
    """Least-squares slope of log|y| against log x."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.abs(np.asarray(ys, dtype=float)))
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def random_instance(d: int, rng: np.random.Generator, a: float = 1.0) -> KernelParams:
    """Rejection sample of (α, β, γ) ∈ (d/2, d/2+6] × (0, 12]² restricted to 𝒫_d."""
    half_d = d / 2.0
    for _ in range(RANDOM_MAX_TRIES):
        alpha = half_d + RANDOM_SHAPE_SPAN * (1.0 - rng.random())
        beta = RANDOM_BOX * (1.0 - rng.random())
        gamma_ = RANDOM_BOX * (1.0 - rng.random())
        if univariate.check_param_space(alpha, beta, gamma_, d).in_space:
            return KernelParams(a=a, alpha=alpha, beta=beta, gamma_=gamma_)
    raise PreconditionError(f"no P_{d} member found in {RANDOM_MAX_TRIES} draws")


# ---------------------------------------------------------------------------
# self test
# ---------------------------------------------------------------------------


class SelfTestCheck(NamedTuple):
    name: str
    passed: bool
    detail: str


def _check_spherical() -> tuple[bool, str]:
    v = univariate.cov_eval(univariate.make_spherical(3, 0.0), 3, 0.5)
    return abs(v - 0.3125) <= 1e-10, f"spherical d=3 r=0.5 -> {v!r}"


def _check_three_paths() -> tuple[bool, str]:
    rng = np.random.default_rng(np.random.SeedSequence([20, 0]))
    worst = 0.0
    for d in (1, 2, 3):
        for _ in range(3):
            p = random_instance(d, rng)
            r = float(rng.uniform(0.05, 0.95))
            ref = univariate.cov_eval(p, d, r)
            worst = max(worst, abs(ref - cov_eval_integral(p, d, r)), abs(ref - cov_eval_mixture(p, d, r)))
    return worst <= 1e-7, f"max three-path deviation {worst:.3e}"


def _check_mixture_identity() -> tuple[bool, str]:
    dev = mixture_identity_check(2.0, 2.5, 4.0, np.linspace(0.0, 20.0, 11))
    return dev <= 1e-8, f"max deviation {dev:.3e}"


def _check_cnd() -> tuple[bool, str]:
    rng = np.random.default_rng(np.random.SeedSequence([21, 0]))
    pts = rng.random((5, 2))
    m = multivariate.make_variogram_matrix(rng.random(5), pts)
    res = multivariate.is_cnd(m)
    brute = cnd_bruteforce(m, 2_000, seed=21)
    return res.cnd and brute <= 1e-10, f"is_cnd={res.cnd} brute max={brute:.3e}"


def _check_gram() -> tuple[bool, str]:
    rng = np.random.default_rng(np.random.SeedSequence([22, 0]))
    g = gram(rng.random((60, 2)) * 3.0, univariate.make_askey(2, 2.0), 2)
    return g.psd and g.min_eig > 0.0, f"min_eig={g.min_eig:.3e} nnz={g.nnz_fraction:.3f}"


def _check_hankel() -> tuple[bool, str]:
    v = hankel_roundtrip(univariate.make_spherical(3, 0.0), 3, 0.5)
    return abs(v - 0.3125) <= 1e-6, f"spherical d=3 Hankel -> {v!r}"


def _check_matern() -> tuple[bool, str]:
    trace = convergence_harness(LimitKernelSpec(LimitFamily.MATERN, b=1.0, shape=0.5), 3, 1)
    return trace.is_nonincreasing(), f"sup errors {list(trace.sup_errors)}"


def selftest(nightly: bool = False) -> list[SelfTestCheck]:
    """Fast oracle suite; ``nightly`` adds the Hankel round trip and a convergence trace."""
    checks = [
        ("spherical_closed_form", _check_spherical),
        ("three_path_agreement", _check_three_paths),
        ("bessel_mixture_identity", _check_mixture_identity),
        ("cnd_variogram", _check_cnd),
        ("askey_gram_psd", _check_gram),
    ]
    if nightly:
        checks += [("hankel_roundtrip", _check_hankel), ("matern_convergence", _check_matern)]
    out: list[SelfTestCheck] = []
    for name, fn in checks:
        try:
            passed, detail = fn()
        except KernelError as exc:
            passed, detail = False, f"{exc.code.value}: {exc.detail}"
        logger.info("selftest %s: %s (%s)", name, "pass" if passed else "FAIL", detail)
        out.append(SelfTestCheck(name, passed, detail))
    return out
