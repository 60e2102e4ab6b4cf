"""
Univariate Gauss hypergeometric covariance.

Parameter space, closed-form evaluation, spectral density, smoothness,
dimension-walking operators (restriction, extension, montée, descente),
special-case constructors and the asymptotic limit kernels.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from . import specfun
from .contracts import (
    DomainError,
    FloatArray,
    KernelParams,
    LimitFamily,
    LimitKernelSpec,
    ParamSpaceError,
    ParamSpaceReport,
    PrecisionBudget,
    PreconditionError,
    ProvisoError,
    ReasonCode,
    SignedLog,
    SmoothnessReport,
    ValidationError,
)

logger = logging.getLogger(__name__)

# equality window of the boundary flag (relative to the larger side)
BOUNDARY_TOL = 1e-12

# kernel evaluations get a larger term budget than the generic default
KERNEL_BUDGET = PrecisionBudget(max_terms=200_000)

# integrality window of the truncated-polynomial conditions
INTEGER_TOL = 1e-12


class DimensionChange(NamedTuple):
    params: KernelParams
    d: int


class DimensionWalk(NamedTuple):
    params: KernelParams
    d: int
    scale: float


# ---------------------------------------------------------------------------
# parameter space
# ---------------------------------------------------------------------------


def _near(lhs: float, rhs: float) -> bool:
    return abs(lhs - rhs) <= BOUNDARY_TOL * max(1.0, abs(lhs), abs(rhs))


def check_param_space(alpha: float, beta: float, gamma_: float, d: int) -> ParamSpaceReport:
    """
    Membership of (α, β, γ) in the sufficient validity set 𝒫_d.

    d = 0 selects the spectral-nonnegativity set 𝒫₀ (α > 0 instead of α > d/2).
    The inequalities are evaluated on the given floats without tolerance;
    ``boundary`` flags a condition that holds with equality within BOUNDARY_TOL.
    """
    if isinstance(d, bool) or not isinstance(d, int) or d < 0:
        raise ValidationError("d must be a nonnegative integer", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
    for v in (alpha, beta, gamma_):
        if not math.isfinite(v):
            raise ValidationError("shape parameter is not finite", code=ReasonCode.GHK_ERROR_BAD_NUMBER)
    half_d = d / 2.0
    prod = 2.0 * (beta - alpha) * (gamma_ - alpha)
    total = 2.0 * (beta + gamma_)
    rhs_sum = 6.0 * alpha + 1.0
    cond_alpha = alpha > half_d
    cond_product = prod >= alpha
    cond_sum = total >= rhs_sum
    boundary = _near(alpha, half_d) or _near(prod, alpha) or _near(total, rhs_sum)
    return ParamSpaceReport(
        dimension=d,
        in_space=cond_alpha and cond_product and cond_sum,
        cond_alpha=cond_alpha,
        cond_product=cond_product,
        cond_sum=cond_sum,
        boundary=boundary,
    )


def _require_space(p: KernelParams, d: int) -> ParamSpaceReport:
    report = check_param_space(p.alpha, p.beta, p.gamma_, d)
    if not report.in_space:
        raise ParamSpaceError(
            f"(alpha, beta, gamma)={p.shapes} outside P_{d}: {', '.join(report.failing_conditions())}",
            report=report,
        )
    return report


def _require_dimension(d: int, *, minimum: int = 1) -> None:
    if isinstance(d, bool) or not isinstance(d, int) or d < minimum:
        raise ValidationError(f"d must be an integer >= {minimum}", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)


def _require_shapes_above(p: KernelParams, d: int) -> None:
    half_d = d / 2.0
    if not (p.alpha > half_d and p.beta > half_d and p.gamma_ > half_d):
        raise PreconditionError(
            f"alpha, beta, gamma must all exceed d/2={half_d}",
            context={"params": p.to_dict(), "d": d},
        )


# ---------------------------------------------------------------------------
# normalization and closed form
# ---------------------------------------------------------------------------


def _log_zeta(p: KernelParams, d: int) -> SignedLog:
    half_d = d / 2.0
    g = specfun.log_gamma_ratio(
        [p.alpha, p.beta - half_d, p.gamma_ - half_d],
        [p.alpha - half_d, p.beta, p.gamma_],
    )
    return SignedLog(log_abs=half_d * math.log(math.pi) + d * math.log(p.a) + g.log_abs, sign=g.sign)


def zeta_normalizer(p: KernelParams, d: int) -> float:
    """Normalization of the spectral density so that the covariance equals σ² at the origin."""
    _require_dimension(d)
    _require_space(p, d)
    return _log_zeta(p, d).value


def _log_prefactor(p: KernelParams, d: int) -> SignedLog:
    half_d = d / 2.0
    C = p.beta - p.alpha + p.gamma_ - half_d
    return specfun.log_gamma_ratio([p.beta - half_d, p.gamma_ - half_d], [C, p.alpha - half_d])


def _abc(p: KernelParams, d: int) -> tuple[float, float, float]:
    return p.beta - p.alpha, p.gamma_ - p.alpha, p.beta - p.alpha + p.gamma_ - d / 2.0


def radial_eval(p: KernelParams, d: int, r: float) -> float:
    """
    Closed form of the radial part without the 𝒫_d membership check.

    Used for the radial functions produced by montée and descente, whose
    parameter triples may sit outside the sufficient set in the formula's
    dimension. Needs α, β, γ > d/2.
    """
    _require_dimension(d)
    _require_shapes_above(p, d)
    r = float(r)
    if not (r >= 0.0):
        raise DomainError(f"radius must be >= 0, got {r}")
    if r == 0.0:
        return p.sigma2
    if r >= p.a:
        return 0.0
    A, B, C = _abc(p, d)
    pref = _log_prefactor(p, d)
    y = (r / p.a) ** 2
    val = specfun.hyp2f1_weighted(A, B, C, 1.0 - y, pref.log_abs, KERNEL_BUDGET, complement=y)
    return p.sigma2 * pref.sign * val


def cov_eval(p: KernelParams, d: int, r: float) -> float:
    """σ²·g_d(r; a, α, β, γ): compactly supported on [0, a), equal to σ² at r = 0."""
    _require_dimension(d)
    _require_space(p, d)
    return radial_eval(p, d, r)


def cov_eval_many(p: KernelParams, d: int, radii: Iterable[float]) -> FloatArray:
    _require_dimension(d)
    _require_space(p, d)
    return np.array([radial_eval(p, d, float(r)) for r in radii], dtype=float)


def cov_derivative(p: KernelParams, d: int, r: float) -> float:
    """
    Radial derivative dG/dr.

    Uses d/dx[x^{C−1}F(A,B;C;x)] = (C−1)·x^{C−2}·F(A,B;C−1;x) with x = 1 − r²/a².
    At the origin the derivative is 0 when α − d/2 > 1/2 and −inf otherwise.
    """
    _require_dimension(d)
    _require_space(p, d)
    r = float(r)
    if not (r >= 0.0):
        raise DomainError(f"radius must be >= 0, got {r}")
    A, B, C = _abc(p, d)
    if r > p.a:
        return 0.0
    if r == 0.0:
        s = p.alpha - d / 2.0
        if s > 0.5:
            return 0.0
        if s < 0.5:
            return -math.inf
        # g = 1 + c·r/a + O(r²) when α − d/2 = ½
        slope = specfun.log_gamma_ratio([p.beta - d / 2.0, p.gamma_ - d / 2.0, -s], [p.alpha - d / 2.0, A, B])
        return p.sigma2 * slope.value / p.a
    pref = _log_prefactor(p, d)
    chain = -2.0 * r / p.a**2
    if r == p.a:
        if C > 2.0:
            return 0.0
        if C < 2.0:
            return -math.inf
        return p.sigma2 * pref.sign * math.exp(pref.log_abs) * chain
    y = (r / p.a) ** 2
    inner = specfun.hyp2f1_weighted(
        A, B, C - 1.0, 1.0 - y, pref.log_abs + math.log(C - 1.0), KERNEL_BUDGET, complement=y
    )
    return p.sigma2 * pref.sign * inner * chain


def origin_expansion(p: KernelParams, d: int, r: float) -> tuple[float, float]:
    """
    The two series of g about the origin at radius 0 < r < a.

    Returns (power series in r², r^{2α−d}-multiplied series); their sum is
    cov_eval / σ². Integer α − d/2 has no such split and raises PoleError.
    """
    _require_dimension(d)
    _require_space(p, d)
    if not (0.0 < r < p.a):
        raise DomainError(f"origin expansion needs 0 < r < a, got {r}")
    A, B, C = _abc(p, d)
    pref = _log_prefactor(p, d)
    regular, singular, _ = specfun.connection_parts(A, B, C, (r / p.a) ** 2, pref.log_abs, KERNEL_BUDGET)
    return pref.sign * regular, pref.sign * singular


# ---------------------------------------------------------------------------
# spectral density
# ---------------------------------------------------------------------------


def spectral_eval(p: KernelParams, d: int, u_norm: float) -> float:
    """σ²·ζ_d·1F2(α; β, γ; −(π·a·‖u‖)²)."""
    _require_dimension(d)
    _require_space(p, d)
    u_norm = float(u_norm)
    if not (u_norm >= 0.0):
        raise DomainError(f"frequency norm must be >= 0, got {u_norm}")
    zeta = _log_zeta(p, d).value
    z2 = (math.pi * p.a * u_norm) ** 2
    return p.sigma2 * zeta * specfun.hyp1f2_neg(p.alpha, p.beta, p.gamma_, z2, KERNEL_BUDGET)


def spectral_eval_many(p: KernelParams, d: int, freqs: Iterable[float]) -> FloatArray:
    return np.array([spectral_eval(p, d, float(u)) for u in freqs], dtype=float)


def spherical_spectral_closed_form(d: int, kappa: int, a: float, u_norm: float) -> float:
    """
    Spectral density of the spherical family for integer κ as a squared Bessel function:

        ζ_d·Γ(α+½)²·(π·a·u/2)^{1−2α}·J_{α−½}(π·a·u)²,  α = (d+1)/2 + κ.
    """
    _require_dimension(d)
    if isinstance(kappa, bool) or not isinstance(kappa, int) or kappa < 0:
        raise PreconditionError("closed form needs a nonnegative integer kappa")
    p = make_spherical(d, float(kappa), a)
    zeta = _log_zeta(p, d).value
    if u_norm == 0.0:
        return zeta
    z = math.pi * a * float(u_norm)
    nu = p.alpha - 0.5
    log_mag = 2.0 * special.gammaln(p.alpha + 0.5) + (1.0 - 2.0 * p.alpha) * math.log(z / 2.0)
    return zeta * math.exp(log_mag) * specfun.bessel_j(nu, z) ** 2


# ---------------------------------------------------------------------------
# smoothness
# ---------------------------------------------------------------------------


def smoothness(p: KernelParams, d: int) -> SmoothnessReport:
    """
    Differentiability orders at the origin and at the range.

    k_origin = max{k >= 0 : α > (k+d)/2}, k_range = max{k >= 0 : β−α+γ > k+d/2+1};
    both strict. The parameter set is not checked so the triples produced by
    montée and descente can be inspected in the formula's dimension.
    """
    _require_dimension(d)
    origin_gap = 2.0 * p.alpha - d
    range_gap = p.beta - p.alpha + p.gamma_ - d / 2.0 - 1.0
    if not (origin_gap > 0.0 and range_gap > 0.0):
        raise PreconditionError(
            "kernel is not continuous: needs alpha > d/2 and beta - alpha + gamma > d/2 + 1",
            context={"params": p.to_dict(), "d": d},
        )
    k_origin = math.ceil(origin_gap) - 1
    k_range = math.ceil(range_gap) - 1
    return SmoothnessReport(k_origin=k_origin, k_range=k_range, ms_diff_order=k_origin // 2)


# ---------------------------------------------------------------------------
# dimension walking
# ---------------------------------------------------------------------------


def _require_order(k: int) -> None:
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise PreconditionError(f"order k must be a nonnegative integer, got {k!r}")


def restrict(p: KernelParams, d: int, k: int) -> DimensionChange:
    """Restriction to ℝ^{d−k}; the radial function is unchanged."""
    _require_dimension(d)
    _require_order(k)
    if k >= d:
        raise PreconditionError(f"restriction order k={k} must be below d={d}")
    _require_space(p, d)
    return DimensionChange(p.shifted(-k / 2.0), d - k)


def max_extension_order(p: KernelParams, d: int, k_max: int | None = None) -> int:
    """
    Largest k >= 0 such that the shifted triple (α+k/2, β+k/2, γ+k/2) lies in 𝒫_{d+k}.

    Returns −1 when the input itself is outside 𝒫_d.
    """
    _require_dimension(d)

    def admissible(k: int) -> bool:
        q = p.shifted(k / 2.0)
        return check_param_space(q.alpha, q.beta, q.gamma_, d + k).in_space

    if not admissible(0):
        return -1
    bound = min(
        4.0 * (p.beta - p.alpha) * (p.gamma_ - p.alpha) - 2.0 * p.alpha,
        2.0 * (p.beta + p.gamma_) - 6.0 * p.alpha - 1.0,
    )
    k = max(0, int(math.floor(bound)))
    if k_max is not None:
        k = min(k, k_max)
    # the float floor can be off by one on either side of an exact boundary
    while k > 0 and not admissible(k):
        k -= 1
    while (k_max is None or k < k_max) and admissible(k + 1):
        k += 1
    return k


def extend(p: KernelParams, d: int, k: int) -> DimensionChange:
    """Extension to ℝ^{d+k}, subject to the shifted triple lying in 𝒫_{d+k}."""
    _require_dimension(d)
    _require_order(k)
    q = p.shifted(k / 2.0)
    report = check_param_space(q.alpha, q.beta, q.gamma_, d + k)
    if not report.in_space:
        k_ok = max_extension_order(p, d)
        raise ProvisoError(
            f"extension by k={k} leaves P_{d + k} ({', '.join(report.failing_conditions())}); "
            f"largest admissible order is {k_ok}",
            context={"failing": report.failing_conditions(), "max_k": k_ok},
        )
    return DimensionChange(q, d + k)


def montee(p: KernelParams, d: int, k: int) -> DimensionWalk:
    """
    Montée of order k: a covariance in ℝ^{d−k} with the same radial spectral density.

    The returned triple is (α, β, γ) + k/2. The radial part of the montée equals
    ``scale·radial_eval(params, d, r)``, which is also ``scale·cov_eval(p, d−k, r)``;
    ``scale`` is ζ_d/ζ_{d−k} at the input triple.
    """
    _require_dimension(d)
    _require_order(k)
    if k >= d:
        raise PreconditionError(f"montee order k={k} must be below d={d}")
    _require_space(p, d)
    if k == 0:
        return DimensionWalk(p, d, 1.0)
    scale = math.exp(_log_zeta(p, d).log_abs - _log_zeta(p, d - k).log_abs)
    logger.debug("montee k=%d: d=%d -> %d, scale=%.6g", k, d, d - k, scale)
    return DimensionWalk(p.shifted(k / 2.0), d - k, scale)


def descente(p: KernelParams, d: int, k: int) -> DimensionWalk:
    """
    Descente of order k into ℝ^{d+k}.

    The downgraded triple (α, β, γ) − k/2 must lie in 𝒫_{d+k}; the scale is the
    reciprocal of the montée that maps it back.
    """
    _require_dimension(d)
    _require_order(k)
    q = p.shifted(-k / 2.0)
    if k == 0:
        return DimensionWalk(p, d, 1.0)
    report = check_param_space(q.alpha, q.beta, q.gamma_, d + k)
    if not report.in_space:
        raise ProvisoError(
            f"descente by k={k} needs {q.shapes} in P_{d + k}: {', '.join(report.failing_conditions())}",
            context={"failing": report.failing_conditions(), "params": q.to_dict(), "d": d + k},
        )
    scale = math.exp(_log_zeta(q, d).log_abs - _log_zeta(q, d + k).log_abs)
    return DimensionWalk(q, d + k, scale)


# ---------------------------------------------------------------------------
# special cases
# ---------------------------------------------------------------------------


def make_spherical(d: int, kappa: float, a: float = 1.0) -> KernelParams:
    """
    Spherical family (Euclid's hat) and its montées: α=(d+1)/2+κ, β=d/2+1+κ, γ=d+1+2κ.

    κ = 0 is the d-dimensional spherical kernel, κ = 1 the cubic, κ = 2 the penta;
    non-integer κ > −½ gives the fractional montée or descente.
    """
    _require_dimension(d)
    if not (math.isfinite(kappa) and kappa > -0.5):
        raise PreconditionError(f"spherical family needs kappa > -1/2, got {kappa}")
    p = KernelParams(a=a, alpha=(d + 1) / 2.0 + kappa, beta=d / 2.0 + 1.0 + kappa, gamma_=d + 1.0 + 2.0 * kappa)
    _require_space(p, d)
    return p


def make_askey(d: int, ell: float, a: float = 1.0) -> KernelParams:
    """Askey truncated power (1 − r/a)₊^ℓ, valid for ℓ >= (d+1)/2."""
    _require_dimension(d)
    if not (math.isfinite(ell) and ell >= (d + 1) / 2.0):
        raise PreconditionError(f"Askey exponent ell={ell} below (d+1)/2={(d + 1) / 2.0}")
    p = KernelParams(a=a, alpha=(d + 1) / 2.0, beta=(d + ell + 1) / 2.0, gamma_=(d + ell) / 2.0 + 1.0)
    _require_space(p, d)
    return p


def make_wendland(d: int, kappa: float, ell: float, a: float = 1.0) -> KernelParams:
    """Generalized Wendland kernel; κ = 0 is the Askey kernel."""
    _require_dimension(d)
    if not (math.isfinite(kappa) and kappa >= 0.0):
        raise PreconditionError(f"Wendland smoothness kappa={kappa} must be >= 0")
    if not (math.isfinite(ell) and ell >= (d + 1) / 2.0 + kappa):
        raise PreconditionError(f"Wendland exponent ell={ell} below (d+1)/2 + kappa")
    p = KernelParams(
        a=a,
        alpha=(d + 1) / 2.0 + kappa,
        beta=(d + ell + 1) / 2.0 + kappa,
        gamma_=(d + ell) / 2.0 + 1.0 + kappa,
    )
    _require_space(p, d)
    return p


@dataclass(frozen=True)
class TruncatedPolynomial:
    """
    g(r) = Σ even[n]·(r/a)^{2n} + Σ shifted[n]·(r/a)^{2n+2α−d} on [0, a), zero beyond.
    """

    a: float
    sigma2: float
    shift_exponent: float
    even: tuple[float, ...]
    shifted: tuple[float, ...]

    def evaluate(self, r: float) -> float:
        if r >= self.a:
            return 0.0
        u = r / self.a
        total = sum(c * u ** (2 * n) for n, c in enumerate(self.even))
        if u > 0.0:
            total += sum(c * u ** (2 * n + self.shift_exponent) for n, c in enumerate(self.shifted))
        return self.sigma2 * total


def _as_count(x: float) -> int | None:
    n = round(x)
    if abs(x - n) <= INTEGER_TOL * max(1.0, abs(x)):
        return int(n)
    return None


def truncated_poly_coeffs(p: KernelParams, d: int) -> TruncatedPolynomial:
    """
    Finite power expansion when β − d/2 = N ∈ ℕ, γ − α = M ∈ ℕ and α − d/2 ∉ ℕ
    (or the same with β and γ exchanged, the kernel being symmetric in them).
    """
    _require_dimension(d)
    _require_space(p, d)
    half_d = d / 2.0
    s = p.alpha - half_d
    if _as_count(s) is not None:
        raise PreconditionError(f"alpha - d/2 = {s} is an integer: no finite expansion")
    N = _as_count(p.beta - half_d)
    M = _as_count(p.gamma_ - p.alpha)
    if N is None or N < 1 or M is None or M < 0:
        N = _as_count(p.gamma_ - half_d)
        M = _as_count(p.beta - p.alpha)
    if N is None or N < 1 or M is None or M < 0:
        raise PreconditionError(
            "finite expansion needs beta - d/2 and gamma - alpha (or gamma - d/2 and beta - alpha) "
            "to be integers",
            context={"params": p.to_dict(), "d": d},
        )
    common = specfun.log_gamma_ratio([half_d - p.alpha + 1.0, float(N)], [half_d - p.alpha - M + 1.0])
    even: list[float] = []
    for n in range(N):
        g = specfun.log_gamma_ratio(
            [half_d - p.alpha - M + 1.0 + n], [half_d - p.alpha + 1.0 + n, float(N - n), n + 1.0]
        )
        even.append((-1) ** n * common.sign * g.sign * math.exp(common.log_abs + g.log_abs))
    # common carries (−1)^M; the shifted series needs (−1)^N
    shifted: list[float] = []
    for n in range(M):
        g = specfun.log_gamma_ratio([s - N + 1.0 + n], [s + 1.0 + n, float(M - n), n + 1.0])
        shifted.append((-1) ** (n + N + M) * common.sign * g.sign * math.exp(common.log_abs + g.log_abs))
    return TruncatedPolynomial(
        a=p.a, sigma2=p.sigma2, shift_exponent=2.0 * s, even=tuple(even), shifted=tuple(shifted)
    )


# ---------------------------------------------------------------------------
# asymptotic limits
# ---------------------------------------------------------------------------


def limit_kernel_eval(spec: LimitKernelSpec, r: float) -> float:
    """Value at radius r of the limit kernel named by ``spec``."""
    r = float(r)
    if not (r >= 0.0):
        raise DomainError(f"radius must be >= 0, got {r}")
    b = spec.b
    x = (r / b) ** 2
    fam = spec.family
    if fam is LimitFamily.GAUSSIAN:
        return math.exp(-x)
    if fam is LimitFamily.ERFC:
        return float(special.erfc(r / b))
    if fam is LimitFamily.INC_GAMMA:
        return specfun.reg_inc_gamma_q(spec.shape, x)
    if fam is LimitFamily.MATERN:
        if r == 0.0:
            return 1.0
        nu = spec.shape
        log_mag = math.log(2.0) - special.gammaln(nu) + nu * math.log(r / (2.0 * b))
        return math.exp(log_mag) * specfun.bessel_k(nu, r / b)
    assert spec.shape2 is not None
    if fam is LimitFamily.LAGUERRE:
        # Γ(β−d/2)/Γ(α−d/2)·L(d/2−β+1, d/2−α+1, r²/b²)
        ratio = specfun.log_gamma_ratio([spec.shape2], [spec.shape])
        return ratio.value * specfun.laguerre_second_kind(1.0 - spec.shape2, 1.0 - spec.shape, x)
    # Tricomi: Γ(d/2−β+2n+1)/Γ(2n)·U(d/2−β+1, 1−2n, −r²/b²)
    two_n = 2.0 * spec.shape
    ratio = specfun.log_gamma_ratio([two_n + 1.0 - spec.shape2], [two_n])
    return ratio.value * specfun.tricomi_u(1.0 - spec.shape2, 1.0 - two_n, -x)


GAUSSIAN_ROUTES = ("beta_to_alpha", "joint")


def limit_path(spec: LimitKernelSpec, d: int, step: int, gaussian_route: str = "beta_to_alpha") -> KernelParams:
    """
    Point ``step`` (m >= 1) of a parameter path converging to the limit kernel.

    Matérn: β = γ = 10^m, a = 2b·10^m. Laguerre, Tricomi, IncGamma, Erfc: γ = 10^m,
    a = b·√γ, with α and β held at their limit values (α = d/2 + 2n for Tricomi). Gaussian ``beta_to_alpha``: β = α + 10^{−m}, γ = α + α·10^m/2,
    a = b·√γ. Gaussian ``joint``: α, β, γ grow together with a = b·√(βγ/α).
    """
    _require_dimension(d)
    if isinstance(step, bool) or not isinstance(step, int) or step < 1:
        raise PreconditionError(f"path step must be a positive integer, got {step!r}")
    half_d = d / 2.0
    big = 10.0**step
    fam = spec.family
    b = spec.b
    if fam is LimitFamily.MATERN:
        return KernelParams(a=2.0 * b * big, alpha=half_d + spec.shape, beta=big, gamma_=big)
    if fam is LimitFamily.GAUSSIAN:
        if gaussian_route == "beta_to_alpha":
            alpha = half_d + (spec.shape if spec.shape > 0.0 else 1.0)
            beta = alpha + 10.0**-step
            eps = beta - alpha
            # the product condition is tight here; nudge gamma off the boundary
            gamma_ = alpha + alpha / (2.0 * eps) * (1.0 + 1e-12)
            return KernelParams(a=b * math.sqrt(gamma_), alpha=alpha, beta=beta, gamma_=gamma_)
        if gaussian_route == "joint":
            alpha = half_d + 2.0 * step
            beta = 2.0 * alpha
            gamma_ = alpha * big
            return KernelParams(a=b * math.sqrt(beta * gamma_ / alpha), alpha=alpha, beta=beta, gamma_=gamma_)
        raise ValidationError(
            f"unknown Gaussian route {gaussian_route!r}; expected one of {GAUSSIAN_ROUTES}",
            code=ReasonCode.GHK_ERROR_INVALID_REQUEST,
        )
    a = b * math.sqrt(big)
    if fam is LimitFamily.INC_GAMMA:
        return KernelParams(a=a, alpha=half_d + spec.shape, beta=half_d + 1.0, gamma_=big)
    if fam is LimitFamily.ERFC:
        return KernelParams(a=a, alpha=half_d + 0.5, beta=half_d + 1.0, gamma_=big)
    assert spec.shape2 is not None
    if fam is LimitFamily.LAGUERRE:
        return KernelParams(a=a, alpha=half_d + spec.shape, beta=half_d + spec.shape2, gamma_=big)
    return KernelParams(a=a, alpha=half_d + 2.0 * spec.shape, beta=half_d + spec.shape2, gamma_=big)
