"""
Special-function engine for the Gauss hypergeometric kernels.

Gamma, Bessel and incomplete-gamma values come from ``scipy.special`` behind
validating wrappers. The generalized hypergeometric series, the kernel form of
2F1 (direct series plus connection expansion), the large-argument 1F2 beta
mixture and the negative-argument Tricomi combination are evaluated here.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy import special
from scipy.integrate import IntegrationWarning, quad

from .contracts import (
    DomainError,
    FloatArray,
    HypParams,
    NonConvergenceError,
    PoleError,
    PrecisionBudget,
    PreconditionError,
    QuadratureError,
    SeriesResult,
    SignedLog,
)

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = PrecisionBudget()

# 1F2(.; .; -z^2) switches to the beta mixture above this z^2 (the alternating
# series peaks near exp(2z) and loses every digit by z^2 ~ 400)
MIXTURE_SWITCH = 36.0

# log case of the connection formula: |s - round(s)| below the window is
# evaluated at s -/+ LOG_CASE_EPS and averaged
LOG_CASE_WINDOW = 1e-6
LOG_CASE_EPS = 1e-5

# consecutive small terms required before a series is declared converged
STALL_RUN = 3

# connection sums whose largest term exceeds the result by this factor fall back
# to the positive series (perturbed log cases included)
CANCELLATION_LIMIT = 1e8

# term cap of that fallback
KERNEL_MAX_TERMS = 20_000_000

_EPS = float(np.finfo(float).eps)


# ---------------------------------------------------------------------------
# gamma family
# ---------------------------------------------------------------------------


def _is_pole(x: float) -> bool:
    return x <= 0.0 and float(x).is_integer()


def log_gamma(x: float) -> SignedLog:
    """ln|Γ(x)| and the sign of Γ(x)."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"log_gamma argument {x} is not finite")
    if _is_pole(x):
        raise PoleError(f"Γ has a pole at {x}", context={"x": x})
    return SignedLog(log_abs=float(special.gammaln(x)), sign=int(special.gammasgn(x)))


def log_gamma_ratio(numer: Sequence[float], denom: Sequence[float]) -> SignedLog:
    """
    ln|∏Γ(numer)/∏Γ(denom)| with sign.

    A pole in the denominator makes the ratio exactly zero (sign 0, log −inf);
    a pole in the numerator is an error.
    """
    log_abs = 0.0
    sign = 1
    for v in denom:
        if _is_pole(v):
            return SignedLog(log_abs=-math.inf, sign=0)
    for v in numer:
        g = log_gamma(v)
        log_abs += g.log_abs
        sign *= g.sign
    for v in denom:
        g = log_gamma(v)
        log_abs -= g.log_abs
        sign *= g.sign
    return SignedLog(log_abs=log_abs, sign=sign)


def reg_inc_gamma_q(s: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(s, x)."""
    if not (math.isfinite(s) and s > 0.0):
        raise DomainError(f"Q(s, x) needs s > 0, got s={s}")
    if not (x >= 0.0):
        raise DomainError(f"Q(s, x) needs x >= 0, got x={x}")
    if x == 0.0:
        return 1.0
    return float(special.gammaincc(s, x))


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------


def bessel_j(nu: float, x: float) -> float:
    if nu < -1.0:
        raise DomainError(f"Bessel order {nu} below -1 is not supported")
    if not (x >= 0.0):
        raise DomainError(f"J_nu needs x >= 0, got {x}")
    return float(special.jv(nu, x))


def bessel_k(nu: float, x: float) -> float:
    if not (x > 0.0):
        raise DomainError(f"K_nu needs x > 0, got {x}")
    return float(special.kv(nu, x))


# ---------------------------------------------------------------------------
# generalized hypergeometric series
# ---------------------------------------------------------------------------


def _series(
    upper: Sequence[float],
    lower: Sequence[float],
    x: float,
    budget: PrecisionBudget,
) -> tuple[SeriesResult, float]:
    """Sum of a generalized hypergeometric series; also returns the largest |term| seen."""
    total = 1.0
    term = 1.0
    max_abs = 1.0
    small_run = 0
    n = 0
    while n < budget.max_terms:
        num = x
        for a in upper:
            num *= a + n
        den = float(n + 1)
        for b in lower:
            den *= b + n
        ratio = num / den
        term *= ratio
        total += term
        n += 1
        at = abs(term)
        if at > max_abs:
            max_abs = at
        if term == 0.0:
            # terminating (polynomial) series
            return SeriesResult(total, _EPS * max_abs * n, n), max_abs
        if at <= budget.abs_tol + budget.rel_tol * abs(total) and abs(ratio) < 1.0:
            small_run += 1
            if small_run >= STALL_RUN:
                err = at + _EPS * max_abs * math.sqrt(n)
                return SeriesResult(total, err, n), max_abs
        else:
            small_run = 0
        if not math.isfinite(total):
            break
    raise NonConvergenceError(
        f"series did not reach tolerance within {budget.max_terms} terms",
        partial_sum=total,
        terms=n,
        context={"upper": list(upper), "lower": list(lower), "x": x},
    )


def hyp_pfq(params: HypParams, x: float, budget: PrecisionBudget = DEFAULT_BUDGET) -> SeriesResult:
    """
    Generalized hypergeometric series pFq(upper; lower; x).

    Returns the truncated sum with an error estimate (last retained term plus
    a rounding allowance proportional to the largest term).
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"argument {x} is not finite")
    if x == 0.0:
        return SeriesResult(1.0, 0.0, 1)
    polynomial = any(_is_pole(a) for a in params.upper)
    if not polynomial:
        k, kp = params.k, params.k_prime
        if k > kp + 1:
            raise DomainError(f"{k}F{kp} series diverges for x != 0")
        if k == kp + 1:
            if abs(x) > 1.0 or (abs(x) == 1.0 and not sum(params.upper) < sum(params.lower)):
                raise DomainError(
                    f"{k}F{kp} outside its convergence region at x={x}",
                    context={"x": x, "upper": list(params.upper), "lower": list(params.lower)},
                )
    result, _ = _series(params.upper, params.lower, x, budget)
    return result


def hyp1f1(a: float, b: float, x: float, budget: PrecisionBudget = DEFAULT_BUDGET) -> float:
    """Kummer's function M(a, b, x)."""
    return hyp_pfq(HypParams((a,), (b,)), x, budget).value


# ---------------------------------------------------------------------------
# quadrature helper
# ---------------------------------------------------------------------------


def adaptive_quad(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    epsabs: float = 1e-13,
    epsrel: float = 1e-11,
    limit: int = 200,
    accept_abs: float | None = None,
    **kwargs: Any,
) -> tuple[float, float]:
    """
    ``scipy.integrate.quad`` with warnings turned into a fail-closed check.

    A QUADPACK warning is tolerated when the reported error estimate stays
    below ``accept_abs`` (default: 1000x the requested tolerance).
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        val, err = quad(func, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit, **kwargs)
    val = float(val)
    err = float(err)
    flagged = [w for w in caught if issubclass(w.category, IntegrationWarning)]
    if flagged or not math.isfinite(val):
        bound = accept_abs if accept_abs is not None else 1e3 * max(epsabs, epsrel * abs(val))
        if not math.isfinite(val) or err > bound:
            raise QuadratureError(
                f"quadrature on [{lo}, {hi}] did not converge: {flagged[0].message if flagged else 'non-finite'}",
                context={"value": val, "abs_error": err},
            )
        logger.debug("quad warning accepted (err=%.3e <= %.3e)", err, bound)
    return val, err


# ---------------------------------------------------------------------------
# 1F2 at negative argument
# ---------------------------------------------------------------------------


def hyp1f2_neg(
    alpha: float,
    beta: float,
    gamma_: float,
    z2: float,
    budget: PrecisionBudget = DEFAULT_BUDGET,
) -> float:
    """
    1F2(α; β, γ; −z²).

    Direct series up to ``MIXTURE_SWITCH``; beyond it the beta mixture of
    0F1 kernels over the larger lower parameter, which must exceed α.
    """
    if not (z2 >= 0.0) or not math.isfinite(z2):
        raise DomainError(f"1F2 mixture argument z^2 must be >= 0, got {z2}")
    # symmetric in the lower parameters; fix their order
    beta, gamma_ = max(beta, gamma_), min(beta, gamma_)
    if z2 <= MIXTURE_SWITCH:
        return hyp_pfq(HypParams((alpha,), (beta, gamma_)), -z2, budget).value
    if not beta > alpha > 0.0:
        logger.warning(
            "1F2(%g; %g, %g; -%g): no lower parameter exceeds alpha, using the direct series",
            alpha, beta, gamma_, z2,
        )
        return hyp_pfq(HypParams((alpha,), (beta, gamma_)), -z2, budget).value
    logger.debug("1F2 beta-mixture path: z^2=%g", z2)
    return beta_mixture_1f2(alpha, beta, gamma_, z2)


def beta_mixture_1f2(alpha: float, lo: float, other: float, z2: float) -> float:
    """Γ(lo)/(Γ(α)Γ(lo−α)) ∫₀¹ t^{α−1}(1−t)^{lo−α−1} 0F1(; other; −t z²) dt."""
    if not (lo > alpha > 0.0):
        raise PreconditionError(f"beta mixture needs lo > alpha > 0 (lo={lo}, alpha={alpha})")
    coef = log_gamma_ratio([lo], [alpha, lo - alpha])

    def inner(t: float) -> float:
        return float(special.hyp0f1(other, -t * z2))

    val, _ = adaptive_quad(
        inner,
        0.0,
        1.0,
        weight="alg",
        wvar=(alpha - 1.0, lo - alpha - 1.0),
        epsabs=1e-15,
        epsrel=1e-12,
        limit=400,
        accept_abs=1e-10,
    )
    return coef.sign * math.exp(coef.log_abs) * val


# Gauss–Jacobi nodes of the vectorized mixture; enough for 2z up to ~200
GRID_MIXTURE_NODES = 512


def hyp1f2_neg_grid(
    alpha: float,
    beta: float,
    gamma_: float,
    z2: npt.ArrayLike,
    budget: PrecisionBudget = DEFAULT_BUDGET,
    nodes: int = GRID_MIXTURE_NODES,
) -> FloatArray:
    """
    1F2(α; β, γ; −z²) on an array of z².

    Same split as ``hyp1f2_neg``; the mixture part uses one Gauss–Jacobi rule
    for the Beta(α, max(β, γ)−α) weight shared by every grid point.
    """
    z2 = np.asarray(z2, dtype=float)
    if np.any(~np.isfinite(z2)) or np.any(z2 < 0.0):
        raise DomainError("1F2 grid arguments must be finite and >= 0")
    # symmetric in the lower parameters; fix their order
    beta, gamma_ = max(beta, gamma_), min(beta, gamma_)
    out = np.empty_like(z2)
    small = z2 <= MIXTURE_SWITCH
    for idx in np.flatnonzero(small):
        out.flat[idx] = hyp_pfq(HypParams((alpha,), (beta, gamma_)), -float(z2.flat[idx]), budget).value
    if np.all(small):
        return out
    if not beta > alpha > 0.0:
        raise PreconditionError(f"beta mixture needs a lower parameter above alpha={alpha}")
    # Jacobi weight (1−x)^{β−α−1}(1+x)^{α−1} on [−1, 1], t = (1+x)/2
    x, w = special.roots_jacobi(nodes, beta - alpha - 1.0, alpha - 1.0)
    t = 0.5 * (1.0 + x)
    w = w / w.sum()
    big = z2[~small]
    vals = special.hyp0f1(gamma_, -np.outer(big, t)) @ w
    out[~small] = vals
    return out


# ---------------------------------------------------------------------------
# 2F1 in kernel form
# ---------------------------------------------------------------------------

_DIRECT_CHUNK_MIN = 256
_DIRECT_CHUNK_MAX = 65_536


def _direct_log_sum(A: float, B: float, C: float, x: float, max_terms: int, rel_tol: float) -> float:
    """ln Σ (A)_n (B)_n / ((C)_n n!) xⁿ for A, B, C > 0 and 0 < x < 1 (all terms positive)."""
    log_x = math.log(x)
    total = 0.0
    running = 0.0
    n0 = 0
    chunk = _DIRECT_CHUNK_MIN
    prev_lr = math.inf
    stop_log = math.log(rel_tol * 1e-3)
    while n0 < max_terms:
        n = np.arange(n0, min(n0 + chunk, max_terms), dtype=float)
        lr = np.log(A + n) + np.log(B + n) - np.log(C + n) - np.log1p(n) + log_x
        logs = running + np.cumsum(lr)
        total = float(np.logaddexp(total, special.logsumexp(logs)))
        running = float(logs[-1])
        last = float(lr[-1])
        n0 += len(n)
        if last < 0.0:
            # ratios that are still rising approach x from below
            r_hat = math.exp(last) if last <= prev_lr else max(math.exp(last), x)
            if r_hat < 1.0:
                tail = running + math.log(r_hat) - math.log1p(-r_hat)
                if tail < total + stop_log:
                    return total
        prev_lr = last
        chunk = min(chunk * 2, _DIRECT_CHUNK_MAX)
    raise NonConvergenceError(
        f"positive 2F1 series needs more than {max_terms} terms",
        partial_sum=math.exp(total) if total < 700 else math.inf,
        terms=n0,
        context={"A": A, "B": B, "C": C, "x": x},
    )


def _direct_weighted(
    A: float, B: float, C: float, x: float, log_scale: float, budget: PrecisionBudget
) -> float:
    weight = log_scale + (C - 1.0) * math.log(x)
    if A > 0.0 and B > 0.0 and C > 0.0:
        return math.exp(weight + _direct_log_sum(A, B, C, x, budget.max_terms, budget.rel_tol))
    res, _ = _series((A, B), (C,), x, budget)
    return math.exp(weight) * res.value


def connection_parts(
    A: float,
    B: float,
    C: float,
    y: float,
    log_scale: float = 0.0,
    budget: PrecisionBudget = DEFAULT_BUDGET,
) -> tuple[float, float, float]:
    """
    The two sums of x^{C−1}·2F1(A,B;C;x) expanded about x = 1 in y = 1 − x:

        c1·2F1(1−C+A, 1−C+B; 1−s; y) + c2·y^s·2F1(1−A, 1−B; 1+s; y),  s = C−A−B.

    Returns (regular part, y^s part, largest scaled term). Integer s is a pole
    of one of the connection coefficients and raises PoleError.
    """
    if not (0.0 < y < 1.0):
        raise DomainError(f"connection expansion needs y in (0, 1), got {y}")
    s = C - A - B
    c1 = log_gamma_ratio([C, s], [C - A, C - B])
    c2 = log_gamma_ratio([C, -s], [A, B])
    f1, m1 = _series((1.0 - C + A, 1.0 - C + B), (1.0 - s,), y, budget)
    part1 = c1.sign * math.exp(log_scale + c1.log_abs) * f1.value
    big = abs(c1.sign) * math.exp(log_scale + c1.log_abs) * m1
    part2 = 0.0
    if c2.sign != 0:
        f2, m2 = _series((1.0 - A, 1.0 - B), (1.0 + s,), y, budget)
        scale2 = math.exp(log_scale + c2.log_abs + s * math.log(y))
        part2 = c2.sign * scale2 * f2.value
        big = max(big, scale2 * m2, abs(part1), abs(part2))
    return part1, part2, big


def _connection_weighted(
    A: float,
    B: float,
    C: float,
    x: float,
    log_scale: float,
    budget: PrecisionBudget,
    complement: float | None = None,
) -> tuple[float, float]:
    """Connection value and its cancellation ratio (largest term / |value|)."""
    y = 1.0 - x if complement is None else complement
    part1, part2, big = connection_parts(A, B, C, y, log_scale, budget)
    value = part1 + part2
    loss = big / abs(value) if value != 0.0 else math.inf
    return value, loss


def hyp2f1_weighted(
    A: float,
    B: float,
    C: float,
    x: float,
    log_scale: float = 0.0,
    budget: PrecisionBudget = DEFAULT_BUDGET,
    complement: float | None = None,
) -> float:
    """
    exp(log_scale)·x^{C−1}·2F1(A, B; C; x) for x ∈ [0, 1].

    ``complement`` is 1 − x when the caller knows it exactly (small radii).

    Direct series for x ≤ ½, connection expansion for x > ½ with the log
    case (integer C−A−B) handled by symmetric perturbation. When the
    connection sums cancel badly and every parameter is positive, the
    positive-term direct series is used instead.
    """
    x = float(x)
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"2F1 kernel form needs x in [0, 1], got {x}")
    for v in (A, B, C, log_scale):
        if not math.isfinite(v):
            raise DomainError("2F1 parameters must be finite")
    if _is_pole(C):
        raise PoleError(f"2F1 lower parameter C={C} is a pole")
    if x == 0.0:
        if C > 1.0:
            return 0.0
        if C == 1.0:
            return math.exp(log_scale)
        raise DomainError("x^(C-1) is unbounded at x = 0 for C < 1")
    s = C - A - B
    if x == 1.0:
        if s <= 0.0:
            raise PreconditionError(f"Gauss summation needs C-A-B > 0, got {s}")
        g = log_gamma_ratio([C, s], [C - A, C - B])
        return g.sign * math.exp(log_scale + g.log_abs)
    if x <= 0.5:
        return _direct_weighted(A, B, C, x, log_scale, budget)

    if abs(s - round(s)) < LOG_CASE_WINDOW:
        logger.debug("2F1 log case (s=%r): averaging C -/+ %g", s, LOG_CASE_EPS)
        lo = hyp2f1_weighted(A, B, C - LOG_CASE_EPS, x, log_scale, budget, complement)
        hi = hyp2f1_weighted(A, B, C + LOG_CASE_EPS, x, log_scale, budget, complement)
        return 0.5 * (lo + hi)

    try:
        value, loss = _connection_weighted(A, B, C, x, log_scale, budget, complement)
    except NonConvergenceError:
        if not (A > 0.0 and B > 0.0 and C > 0.0):
            raise
        loss = math.inf
        value = math.nan
    if loss > CANCELLATION_LIMIT and A > 0.0 and B > 0.0 and C > 0.0:
        logger.debug("2F1 connection cancellation %.1e at x=%g; using positive series", loss, x)
        big_budget = PrecisionBudget(
            rel_tol=budget.rel_tol, abs_tol=budget.abs_tol, max_terms=max(budget.max_terms, KERNEL_MAX_TERMS)
        )
        return _direct_weighted(A, B, C, x, log_scale, big_budget)
    return value


def hyp2f1_kernel_form(
    A: float,
    B: float,
    C: float,
    x: float,
    budget: PrecisionBudget = DEFAULT_BUDGET,
) -> float:
    """2F1(A, B; C; x) on [0, 1] with C − A − B > 0."""
    if not (C - A - B > 0.0):
        raise PreconditionError(f"kernel form needs C-A-B > 0, got {C - A - B}")
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"kernel form needs x in [0, 1], got {x}")
    if x == 0.0:
        return 1.0
    return hyp2f1_weighted(A, B, C, x, -(C - 1.0) * math.log(x), budget)


# ---------------------------------------------------------------------------
# confluent functions
# ---------------------------------------------------------------------------


def tricomi_u(a: float, b: float, x: float, budget: PrecisionBudget = DEFAULT_BUDGET) -> float:
    """
    Tricomi's U(a, b, x).

    x > 0 uses ``scipy.special.hyperu``. For x ≤ 0 the two-term Kummer
    combination is taken on the real branch |x|^{1−b}; integer b is reached
    by averaging b ∓ LOG_CASE_EPS.
    """
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(x)):
        raise DomainError("tricomi_u arguments must be finite")
    if a == 0.0:
        return 1.0
    if x > 0.0:
        val = float(special.hyperu(a, b, x))
        if not math.isfinite(val):
            raise NonConvergenceError(f"U({a}, {b}, {x}) did not evaluate", terms=0)
        return val
    if abs(b - round(b)) < LOG_CASE_WINDOW:
        return 0.5 * (
            tricomi_u(a, b - LOG_CASE_EPS, x, budget) + tricomi_u(a, b + LOG_CASE_EPS, x, budget)
        )
    if x == 0.0:
        if b >= 1.0:
            raise PoleError(f"U(a, b, 0) is unbounded for b={b} >= 1")
        return float(special.gamma(1.0 - b) * special.rgamma(a - b + 1.0))
    t1 = special.gamma(1.0 - b) * special.rgamma(a - b + 1.0) * hyp1f1(a, b, x, budget)
    t2 = 0.0
    inv_ga = special.rgamma(a)
    if inv_ga != 0.0:
        t2 = (
            special.gamma(b - 1.0)
            * inv_ga
            * abs(x) ** (1.0 - b)
            * hyp1f1(a - b + 1.0, 2.0 - b, x, budget)
        )
    return float(t1 + t2)


def laguerre_second_kind(alpha: float, beta: float, x: float) -> float:
    """
    L(α, β, x) = Γ(β−α)⁻¹ ∫₁^∞ e^{−ux} u^{α−1} (u−1)^{β−α−1} du.

    Shifted to t = u − 1: the algebraic endpoint on [0, 1] is integrated
    with a Jacobi weight, the tail [1, ∞) by the infinite-range rule.
    """
    if not (beta > alpha):
        raise PreconditionError(f"Laguerre function needs beta > alpha (alpha={alpha}, beta={beta})")
    if not (x >= 0.0):
        raise DomainError(f"Laguerre function needs x >= 0, got {x}")
    if x == 0.0:
        if beta >= 1.0:
            raise DomainError("L(alpha, beta, 0) diverges for beta >= 1")
        r = log_gamma_ratio([1.0 - beta], [1.0 - alpha])
        return r.sign * math.exp(r.log_abs)

    def body(t: float) -> float:
        return math.exp(-t * x) * (1.0 + t) ** (alpha - 1.0)

    def tail(t: float) -> float:
        return body(t) * t ** (beta - alpha - 1.0)

    head_val, _ = adaptive_quad(body, 0.0, 1.0, weight="alg", wvar=(beta - alpha - 1.0, 0.0))
    tail_val, _ = adaptive_quad(tail, 1.0, math.inf)
    return float(math.exp(-x) * special.rgamma(beta - alpha) * (head_val + tail_val))
