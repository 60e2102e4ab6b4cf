"""
Matrix-valued Gauss hypergeometric kernels.

Entry (i, j) of the kernel is ρ_ij·G_d(h; a_ij, α_ij, β_ij, γ_ij). This module
checks the sufficient validity condition sets, builds the three bivariate
constructions with a certified collocation bound, and assembles block Gram
matrices over point sets.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from typing import Any, NamedTuple

import numpy as np
import numpy.typing as npt
from scipy import sparse
from scipy.spatial import cKDTree

from . import specfun, univariate
from .contracts import (
    BivariateSpec,
    BivariateVariant,
    CndResult,
    ConditionSet,
    DomainError,
    FloatArray,
    GramResult,
    MultivarParams,
    ParamSpaceError,
    PoleError,
    PreconditionError,
    PsiCheckReport,
    PsiFamily,
    PsiSpec,
    ReasonCode,
    SignedLog,
    ValidationError,
    ValidityReport,
)

logger = logging.getLogger(__name__)

CND_TOL = 1e-10
PSD_TOL = 1e-10
CONSTANT_TOL = 1e-12
ANCHOR_TOL = 1e-9

# baseline witness search: log-spaced candidates per axis, then golden refinement
WITNESS_CANDIDATES = 64
GOLDEN_ITERATIONS = 48
WITNESS_MIN_GAP = 1e-6

# determinantal scan over z = π·a·‖u‖
SPECTRAL_Z_MAX = 100.0
SPECTRAL_NODES = 4096
DETERMINANTAL_FLOOR = 1e-10

GRAM_PSD_TOL = 1e-8
MAX_POINTS = 20_000

PSI_GRID_POINTS = 2001
PSI_CHECK_TOL = 1e-6

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _sym_array(m: npt.ArrayLike, name: str, tol: float) -> FloatArray:
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix", code=ReasonCode.GHK_ERROR_DIMENSION_MISMATCH)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries", code=ReasonCode.GHK_ERROR_BAD_NUMBER)
    if arr.size and float(np.max(np.abs(arr - arr.T))) > tol:
        raise ValidationError(f"{name} is not symmetric", code=ReasonCode.GHK_ERROR_ASYMMETRY)
    return 0.5 * (arr + arr.T)


# ---------------------------------------------------------------------------
# conditionally negative semidefinite matrices
# ---------------------------------------------------------------------------


def is_cnd(m: npt.ArrayLike, tol: float = CND_TOL) -> CndResult:
    """
    ωᵀmω <= 0 for every zero-sum ω.

    Projects m onto the zero-sum subspace with the centering projector and
    compares the largest eigenvalue with tol·‖m‖₂.
    """
    arr = _sym_array(m, "matrix", 1e-10)
    p = arr.shape[0]
    norm = float(np.linalg.norm(arr, 2)) if p else 0.0
    threshold = tol * max(norm, 1.0)
    if p <= 1:
        return CndResult(cnd=True, max_eig=0.0, threshold=threshold)
    proj = np.eye(p) - np.full((p, p), 1.0 / p)
    eig = np.linalg.eigvalsh(proj @ arr @ proj)
    top = float(eig[-1])
    return CndResult(cnd=top <= threshold, max_eig=top, threshold=threshold)


def cnd_exponential_check(m: npt.ArrayLike, t_grid: Sequence[float]) -> bool:
    """Schoenberg cross-check: exp(−t·m) entrywise is PSD for every t on the grid."""
    arr = _sym_array(m, "matrix", 1e-10)
    for t in t_grid:
        if not t > 0.0:
            raise PreconditionError(f"t grid must be positive, got {t}")
        e = np.exp(-t * (arr - arr.min()))
        eig = np.linalg.eigvalsh(e)
        if eig[0] < -CND_TOL * max(abs(float(eig[-1])), 1.0):
            return False
    return True


def make_variogram_matrix(
    eta: Sequence[float],
    points: npt.ArrayLike,
    psi: Callable[[float], float] | None = None,
) -> FloatArray:
    """a_ij = (η_i + η_j)/2 + ψ(‖s_i − s_j‖); CND whenever ψ is a variogram (default ψ(h) = h)."""
    eta_arr = np.asarray(eta, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] != eta_arr.shape[0]:
        raise ValidationError("eta and points lengths differ", code=ReasonCode.GHK_ERROR_DIMENSION_MISMATCH)
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    base = 0.5 * (eta_arr[:, None] + eta_arr[None, :])
    if psi is None:
        return base + dist
    return base + np.vectorize(psi, otypes=[float])(dist)


# ---------------------------------------------------------------------------
# ψ catalog
# ---------------------------------------------------------------------------


def psi_eval(spec: PsiSpec, x: float) -> float:
    """Value of the range / shape modulation function at x >= 0."""
    if not (x >= 0.0):
        raise DomainError(f"psi argument must be >= 0, got {x}")
    prm = spec.params
    fam = spec.family
    if fam is PsiFamily.TRUNC_POWER_INTEGRATED:
        a, b, c, eta = prm
        return b * x + c - max(0.0, 1.0 - x / a) ** (eta + 1.0)
    if fam is PsiFamily.LOG_BERNSTEIN:
        return 1.0 + math.log1p(x / prm[0])
    if fam is PsiFamily.POWER_BERNSTEIN:
        b, eta, theta = prm
        return (1.0 + b * x**eta) ** theta
    if fam is PsiFamily.RATIONAL_BERNSTEIN:
        b, eta = prm
        return 1.0 + x * (x + b) ** (-eta)
    xs = np.asarray(prm[0::2])
    ys = np.asarray(prm[1::2])
    return float(np.interp(x, xs, ys))


def psi_sup(spec: PsiSpec) -> float:
    """sup of ψ over ℝ₊ (inf for the unbounded catalog members)."""
    fam = spec.family
    if fam is PsiFamily.RATIONAL_BERNSTEIN and spec.params[1] == 1.0:
        return 2.0
    if fam is PsiFamily.CUSTOM:
        return float(max(spec.params[1::2]))
    return math.inf


def _psi_scale(spec: PsiSpec) -> float:
    if spec.family is PsiFamily.CUSTOM:
        return float(spec.params[-2]) or 1.0
    # first catalog parameter is the family's length scale
    return spec.params[0]


def psi_check(spec: PsiSpec) -> PsiCheckReport:
    """
    Finite-difference check that ψ > 0 and ψ′ is (q+1)-times monotone:
    (−1)^j ψ^{(j+1)} >= 0 for j = 0..q+1 on a log-spaced grid.

    Catalog families are certified analytically; the sweep is advisory and
    is the only evidence available for Custom tables.
    """
    scale = _psi_scale(spec)
    x = np.geomspace(1e-2 * scale, 1e2 * scale, PSI_GRID_POINTS)
    values = np.array([psi_eval(spec, float(v)) for v in x])
    worst = max(0.0, -float(values.min()))
    keep = np.ones_like(x, dtype=bool)
    if spec.family is PsiFamily.TRUNC_POWER_INTEGRATED:
        keep &= np.abs(x - spec.params[0]) > 0.02 * spec.params[0]
    interior = slice(10, -10)
    deriv = values
    for j in range(spec.q + 2):
        deriv = np.gradient(deriv, x, edge_order=2)
        signed = (-1.0) ** j * deriv
        mag = float(np.max(np.abs(signed[interior]))) or 1.0
        bad = -signed[interior][keep[interior]]
        if bad.size:
            worst = max(worst, float(bad.max()) / mag)
    passed = worst <= PSI_CHECK_TOL
    if not spec.analytic:
        logger.warning("psi %s certified numerically only (worst violation %.2e)", spec.family.value, worst)
    return PsiCheckReport(
        family=spec.family,
        q=spec.q,
        passed=passed,
        analytic=spec.analytic,
        worst_violation=worst,
        grid_points=PSI_GRID_POINTS,
    )


# ---------------------------------------------------------------------------
# validity condition sets
# ---------------------------------------------------------------------------


class _Ledger:
    """Collects failures and certificates while a condition set is checked."""

    def __init__(self) -> None:
        self.failures: list[tuple[str, str]] = []
        self.certificates: dict[str, dict[str, float]] = {}
        self.witnesses: dict[str, float] = {}
        self.numeric_only = False

    def require(self, ok: bool, label: str, message: str) -> bool:
        if not ok:
            self.failures.append((label, message))
        return ok

    def report(self, condition_set: ConditionSet) -> ValidityReport:
        return ValidityReport(
            condition_set=condition_set,
            satisfied=not self.failures,
            failures=tuple(self.failures),
            certificates=self.certificates,
            witnesses=self.witnesses,
            numeric_only=self.numeric_only,
        )


def _is_constant(m: FloatArray) -> bool:
    ref = float(m[0, 0])
    return bool(np.all(np.abs(m - ref) <= CONSTANT_TOL * max(1.0, abs(ref))))


def _check_cnd(ledger: _Ledger, m: FloatArray, label: str, name: str) -> None:
    res = is_cnd(m)
    ledger.certificates[label] = {"max_eig": res.max_eig, "threshold": res.threshold}
    ledger.require(res.cnd, label, f"{name} is not conditionally negative semidefinite (max eig {res.max_eig:.3e})")


def _check_entries_in_space(ledger: _Ledger, mp: MultivarParams, label: str) -> None:
    for i in range(mp.p):
        for j in range(i, mp.p):
            rep = univariate.check_param_space(
                float(mp.alpha_mat[i, j]), float(mp.beta_mat[i, j]), float(mp.gamma_mat[i, j]), mp.d
            )
            if not rep.in_space:
                ledger.require(
                    False, label, f"entry ({i}, {j}) outside P_{mp.d}: {', '.join(rep.failing_conditions())}"
                )


def _in_p0(alpha: float, beta: float, gamma_: float) -> bool:
    return univariate.check_param_space(alpha, beta, gamma_, 0).in_space


def _psd_score(entries: list[list[SignedLog]]) -> float:
    """Smallest eigenvalue over the largest magnitude of a matrix given in signed-log form."""
    p = len(entries)
    logs = np.array([[e.log_abs for e in row] for row in entries])
    signs = np.array([[e.sign for e in row] for row in entries], dtype=float)
    finite = logs[np.isfinite(logs)]
    if finite.size == 0:
        return 0.0
    top = float(finite.max())
    m = np.where(signs != 0.0, signs * np.exp(np.where(np.isfinite(logs), logs - top, -np.inf)), 0.0)
    eig = np.linalg.eigvalsh(0.5 * (m + m.T)) if p else np.zeros(1)
    span = float(np.max(np.abs(eig))) or 1.0
    return float(eig[0]) / span


def _ratio_matrix(
    mp: MultivarParams,
    numer: Callable[[int, int], list[float]],
    denom: Callable[[int, int], list[float]],
    a_power: int,
    extra_denominator: Callable[[int, int], float] | None = None,
) -> list[list[SignedLog]]:
    p = mp.p
    out = [[SignedLog(-math.inf, 0)] * p for _ in range(p)]
    for i in range(p):
        for j in range(i, p):
            rho = float(mp.rho_mat[i, j])
            if rho == 0.0:
                entry = SignedLog(-math.inf, 0)
            else:
                g = specfun.log_gamma_ratio(numer(i, j), denom(i, j))
                log_abs = g.log_abs + math.log(abs(rho)) + a_power * math.log(float(mp.a_mat[i, j]))
                sign = g.sign * (1 if rho > 0 else -1)
                if extra_denominator is not None:
                    v = extra_denominator(i, j)
                    log_abs -= math.log(abs(v))
                    sign *= 1 if v > 0 else -1
                entry = SignedLog(log_abs, sign if g.sign != 0 else 0)
            out[i][j] = entry
            out[j][i] = entry
    return out


def _golden_max(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    """Golden-section search for the maximum of f on [lo, hi]."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(GOLDEN_ITERATIONS):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _gap_grid(span: float) -> FloatArray:
    lo = WITNESS_MIN_GAP * max(1.0, span)
    if span <= lo:
        return np.array([0.5 * span])
    return np.geomspace(lo, span * (1.0 - 1e-9), WITNESS_CANDIDATES)


def _search_pair(
    beta_hi: float,
    gamma_hi: float,
    floor: float,
    score: Callable[[float, float], float],
) -> tuple[float, float, float] | None:
    """Best (β, γ) with floor < β < beta_hi, floor < γ < gamma_hi; score is −inf when infeasible."""
    if beta_hi <= floor or gamma_hi <= floor:
        return None
    gb = _gap_grid(beta_hi - floor)
    gg = _gap_grid(gamma_hi - floor)
    best: tuple[float, float, float] | None = None
    for u in gb:
        for v in gg:
            s = score(beta_hi - u, gamma_hi - v)
            if math.isfinite(s) and (best is None or s > best[2]):
                best = (beta_hi - u, gamma_hi - v, s)
    if best is None or best[2] >= -PSD_TOL:
        return best
    b0, g0, _ = best
    # coordinate refinement in log-gap space
    for _ in range(2):
        lb, ub = math.log(gb[0]), math.log(gb[-1])
        t, s = _golden_max(lambda t: score(beta_hi - math.exp(t), g0), lb, ub)
        if math.isfinite(s) and s > best[2]:
            b0 = beta_hi - math.exp(t)
            best = (b0, g0, s)
        lg, ug = math.log(gg[0]), math.log(gg[-1])
        t, s = _golden_max(lambda t: score(b0, gamma_hi - math.exp(t)), lg, ug)
        if math.isfinite(s) and s > best[2]:
            g0 = gamma_hi - math.exp(t)
            best = (b0, g0, s)
    return best


def _search_single(gamma_lo: float, gamma_hi: float, score: Callable[[float], float]) -> tuple[float, float] | None:
    if gamma_hi <= gamma_lo:
        return None
    grid = _gap_grid(gamma_hi - gamma_lo)
    best: tuple[float, float] | None = None
    for u in grid:
        s = score(gamma_hi - u)
        if math.isfinite(s) and (best is None or s > best[1]):
            best = (gamma_hi - u, s)
    if best is None or best[1] >= -PSD_TOL:
        return best
    t, s = _golden_max(lambda t: score(gamma_hi - math.exp(t)), math.log(grid[0]), math.log(grid[-1]))
    if math.isfinite(s) and s > best[1]:
        best = (gamma_hi - math.exp(t), s)
    return best


def _check_anchor_map(
    ledger: _Ledger,
    label: str,
    spec: PsiSpec,
    target: FloatArray,
    p: int,
    transform: Callable[[float], float],
    what: str,
) -> None:
    """target_ij == transform(ψ(‖s_i − s_j‖)) over the p anchors in ℝ^{<= 2q+1}."""
    anchors = spec.anchor_points
    if not ledger.require(len(anchors) == p, label, f"{what} needs {p} anchor points, got {len(anchors)}"):
        return
    dims = {len(pt) for pt in anchors}
    if not ledger.require(len(dims) == 1, label, "anchor points have mixed dimensions"):
        return
    dim = dims.pop()
    ledger.require(
        dim <= 2 * spec.q + 1, label, f"anchors live in R^{dim}, beyond R^{2 * spec.q + 1} allowed by q={spec.q}"
    )
    pts = np.array(anchors, dtype=float)
    worst = 0.0
    for i in range(p):
        for j in range(p):
            want = transform(psi_eval(spec, float(np.linalg.norm(pts[i] - pts[j]))))
            got = float(target[i, j])
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    ledger.certificates[label] = {"max_relative_mismatch": worst}
    ledger.require(worst <= ANCHOR_TOL, label, f"{what} does not match psi at the anchors (mismatch {worst:.3e})")
    if not spec.analytic:
        ledger.numeric_only = True
        chk = psi_check(spec)
        ledger.require(chk.passed, label, f"custom psi fails the monotonicity sweep ({chk.worst_violation:.3e})")


def _condition_a_structure(ledger: _Ledger, a: FloatArray, label: str) -> None:
    """a_ij = max(ε_i, ε_j) off the diagonal, a_ii = ε_i − δ_i with 0 <= δ_i < ε_i."""
    p = a.shape[0]
    if p == 1:
        ledger.certificates[label] = {"eps_0": float(a[0, 0]), "delta_0": 0.0}
        return
    eps = np.array([min(float(a[i, j]) for j in range(p) if j != i) for i in range(p)])
    for i in range(p):
        for j in range(p):
            if i != j and abs(a[i, j] - max(eps[i], eps[j])) > CONSTANT_TOL * max(1.0, a[i, j]):
                ledger.require(False, label, f"a[{i},{j}] is not max(eps_{i}, eps_{j})")
                return
    delta = eps - np.diag(a)
    ok = bool(np.all(delta >= -CONSTANT_TOL) and np.all(np.diag(a) > 0.0))
    ledger.certificates[label] = {f"eps_{i}": float(eps[i]) for i in range(p)} | {
        f"delta_{i}": float(max(delta[i], 0.0)) for i in range(p)
    }
    ledger.require(ok, label, "diagonal ranges must satisfy 0 <= delta_i < eps_i")


def _condition_a_common(ledger: _Ledger, a: FloatArray, label: str) -> float:
    """a_ij = a off the diagonal, a_ii = a − δ_i with 0 <= δ_i < a."""
    p = a.shape[0]
    off = [float(a[i, j]) for i in range(p) for j in range(p) if i != j]
    common = off[0] if off else float(a[0, 0])
    same = all(abs(v - common) <= CONSTANT_TOL * max(1.0, common) for v in off)
    diag = np.diag(a)
    ledger.require(same, label, "off-diagonal ranges must share one value")
    ledger.require(
        bool(np.all(diag <= common * (1.0 + CONSTANT_TOL)) and np.all(diag > 0.0)),
        label,
        "diagonal ranges must satisfy 0 <= delta_i < a",
    )
    return common


def _validate_shared_alpha(
    mp: MultivarParams, cs: ConditionSet, psi1: PsiSpec | None, ledger: _Ledger
) -> None:
    """Condition sets 1 to 3: common α, CND β and γ, baseline witness (β, γ)."""
    tag = {ConditionSet.C1: "(1)", ConditionSet.C2: "(2)", ConditionSet.C3: "(3)"}[cs]
    d = mp.d
    half_d = d / 2.0
    if cs is ConditionSet.C1:
        ledger.require(_is_constant(mp.a_mat), f"{tag}(i)", "a is not proportional to the all-ones matrix")
        shift = 0.0
        a_power = 0
    elif cs is ConditionSet.C2:
        _condition_a_structure(ledger, mp.a_mat, f"{tag}(i)")
        shift = 1.0
        a_power = d
    else:
        assert psi1 is not None
        _check_anchor_map(ledger, f"{tag}(i)", psi1, mp.a_mat**2, mp.p, lambda v: v, "a^2")
        shift = psi1.q + 2.0
        a_power = d
    alpha_ok = ledger.require(
        _is_constant(mp.alpha_mat), f"{tag}(ii)", "alpha is not proportional to the all-ones matrix"
    )
    _check_cnd(ledger, mp.beta_mat, f"{tag}(iii)", "beta")
    _check_cnd(ledger, mp.gamma_mat, f"{tag}(iv)", "gamma")
    _check_entries_in_space(ledger, mp, f"{tag}(v)")
    if not alpha_ok:
        return
    alpha = float(mp.alpha_mat[0, 0])
    beta_hi = float(mp.beta_mat.min())
    gamma_hi = float(mp.gamma_mat.min())

    def numer(i: int, j: int) -> list[float]:
        return [float(mp.beta_mat[i, j]) - half_d, float(mp.gamma_mat[i, j]) - half_d]

    def score(beta: float, gamma_: float) -> float:
        if not _in_p0(alpha + shift, beta + shift, gamma_ + shift):
            return -math.inf
        try:
            mat = _ratio_matrix(
                mp,
                numer,
                lambda i, j: [float(mp.beta_mat[i, j]) - beta, float(mp.gamma_mat[i, j]) - gamma_],
                a_power,
            )
        except PoleError:
            return -math.inf
        return _psd_score(mat)

    found = _search_pair(beta_hi, gamma_hi, alpha, score)
    if found is None:
        ledger.require(False, f"{tag}(vi)", "no baseline (beta, gamma) below the matrix entries lies in P_0")
        return
    beta, gamma_, best = found
    ledger.witnesses.update({"beta": beta, "gamma": gamma_})
    ledger.certificates[f"{tag}(vii)"] = {"min_eig_normalized": best}
    logger.debug("%s witness beta=%.6g gamma=%.6g score=%.3e", tag, beta, gamma_, best)
    ledger.require(
        best >= -PSD_TOL,
        f"{tag}(vii)",
        f"gamma-ratio rho matrix is not PSD for any baseline found (min eig {best:.3e})",
    )


def _validate_varying_alpha(
    mp: MultivarParams, cs: ConditionSet, psi1: PsiSpec | None, psi2: PsiSpec | None, ledger: _Ledger
) -> None:
    """Condition sets 4 and 5: α_ij from ψ₂, CND β − α − 1 and γ, baseline witness γ."""
    tag = "(4)" if cs is ConditionSet.C4 else "(5)"
    assert psi2 is not None
    d = mp.d
    half_d = d / 2.0
    if cs is ConditionSet.C4:
        _condition_a_common(ledger, mp.a_mat, f"{tag}(i)")
        a_power = d
    else:
        assert psi1 is not None
        _check_anchor_map(ledger, f"{tag}(i)", psi1, mp.a_mat**2, mp.p, lambda v: v, "a^2")
        a_power = d + 2
    _check_anchor_map(ledger, f"{tag}(ii)", psi2, mp.alpha_mat, mp.p, lambda v: v, "alpha")
    excess = mp.beta_mat - mp.alpha_mat - 1.0
    ledger.require(bool(np.all(excess > 0.0)), f"{tag}(iii)", "beta - alpha - 1 must have positive entries")
    _check_cnd(ledger, excess, f"{tag}(iii)", "beta - alpha - 1")
    _check_cnd(ledger, mp.gamma_mat, f"{tag}(iv)", "gamma")
    sup = psi_sup(psi2)
    if psi2.upper_bound is not None:
        ledger.require(sup <= psi2.upper_bound, f"{tag}(ii)", f"psi2 exceeds its declared bound {psi2.upper_bound}")
    q = psi1.q if psi1 is not None else 0
    gamma_hi = float(mp.gamma_mat.min())

    def feasible(gamma_: float) -> bool:
        bound = (2.0 * gamma_ - 1.0) / 4.0
        if not (gamma_ > 0.5 and sup <= bound):
            return False
        if psi2.upper_bound is not None and psi2.upper_bound > bound:
            return False
        if cs is ConditionSet.C5:
            return all(
                _in_p0(float(al) + q + 3.0, float(al) + q + 4.0, gamma_ + q + 3.0) for al in mp.alpha_mat.flat
            )
        return True

    def score(gamma_: float) -> float:
        if not feasible(gamma_):
            return -math.inf
        try:
            mat = _ratio_matrix(
                mp,
                lambda i, j: [float(mp.beta_mat[i, j]) - half_d, float(mp.gamma_mat[i, j]) - half_d],
                lambda i, j: [
                    float(mp.alpha_mat[i, j]) - half_d,
                    float(mp.beta_mat[i, j] - mp.alpha_mat[i, j]) - 1.0,
                    float(mp.gamma_mat[i, j]) - gamma_,
                ],
                a_power,
                extra_denominator=lambda i, j: float(mp.alpha_mat[i, j]),
            )
        except PoleError:
            return -math.inf
        return _psd_score(mat)

    found = _search_single(0.5, gamma_hi, score)
    label_psd = f"{tag}(v)" if cs is ConditionSet.C4 else f"{tag}(vi)"
    if found is None:
        label = f"{tag}(v)" if cs is ConditionSet.C5 else f"{tag}(ii)"
        ledger.require(
            False, label, "no baseline gamma below the gamma entries satisfies the psi2 bound and P_0 conditions"
        )
        return
    gamma_, best = found
    ledger.witnesses["gamma"] = gamma_
    ledger.certificates[label_psd] = {"min_eig_normalized": best}
    ledger.require(best >= -PSD_TOL, label_psd, f"gamma-ratio rho matrix is not PSD (min eig {best:.3e})")


def validate(
    mp: MultivarParams,
    condition_set: ConditionSet | str,
    psi1: PsiSpec | None = None,
    psi2: PsiSpec | None = None,
) -> ValidityReport:
    """
    Check one sufficient validity condition set literally.

    A failed report means "not certified" by this set; the conditions are
    sufficient only.
    """
    cs = ConditionSet(condition_set)
    if cs in (ConditionSet.C3, ConditionSet.C5, ConditionSet.C5_SWAPPED) and psi1 is None:
        raise ValidationError(f"condition set {cs.value} needs psi1", code=ReasonCode.GHK_ERROR_MISSING_PSI)
    if cs in (ConditionSet.C4, ConditionSet.C5, ConditionSet.C4_SWAPPED, ConditionSet.C5_SWAPPED) and psi2 is None:
        raise ValidationError(f"condition set {cs.value} needs psi2", code=ReasonCode.GHK_ERROR_MISSING_PSI)
    ledger = _Ledger()
    if cs in (ConditionSet.C1, ConditionSet.C2, ConditionSet.C3):
        _validate_shared_alpha(mp, cs, psi1, ledger)
    elif cs in (ConditionSet.C4, ConditionSet.C5):
        _validate_varying_alpha(mp, cs, psi1, psi2, ledger)
    else:
        base = ConditionSet.C4 if cs is ConditionSet.C4_SWAPPED else ConditionSet.C5
        _validate_varying_alpha(mp.swapped(), base, psi1, psi2, ledger)
    report = ledger.report(cs)
    logger.info("validate %s: %s (%d failures)", cs.value, report.verdict, len(report.failures))
    return report


def validity_from_doc(doc: dict[str, Any]) -> ValidityReport:
    """Parse a multivariate model document and validate its condition set (default C1)."""
    mp = MultivarParams.from_dict(doc)
    raw_cs = doc.get("condition_set", ConditionSet.C1.value)
    try:
        cs = ConditionSet(raw_cs)
    except ValueError as exc:
        raise ValidationError(f"unknown condition set {raw_cs!r}", code=ReasonCode.GHK_ERROR_INVALID_REQUEST) from exc
    psi1 = PsiSpec.from_dict(doc["psi1"]) if doc.get("psi1") is not None else None
    psi2 = PsiSpec.from_dict(doc["psi2"]) if doc.get("psi2") is not None else None
    return validate(mp, cs, psi1, psi2)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _index(mp: MultivarParams, i: int, j: int) -> None:
    if not (0 <= i < mp.p and 0 <= j < mp.p):
        raise ValidationError(f"index ({i}, {j}) outside a {mp.p}-variate model", code=ReasonCode.GHK_ERROR_DIMENSION_MISMATCH)


def cross_eval(mp: MultivarParams, i: int, j: int, r: float) -> float:
    """ρ_ij·G_d(r; θ_ij)."""
    _index(mp, i, j)
    return float(mp.rho_mat[i, j]) * univariate.cov_eval(mp.entry(i, j), mp.d, r)


def cross_spectral_eval(mp: MultivarParams, i: int, j: int, u_norm: float) -> float:
    """ρ_ij·G̃_d(u; θ_ij)."""
    _index(mp, i, j)
    return float(mp.rho_mat[i, j]) * univariate.spectral_eval(mp.entry(i, j), mp.d, u_norm)


def _spectral_profile(mp: MultivarParams, i: int, j: int, u: FloatArray) -> FloatArray:
    e = mp.entry(i, j)
    zeta = univariate.zeta_normalizer(e, mp.d)
    z2 = (math.pi * e.a * u) ** 2
    return zeta * specfun.hyp1f2_neg_grid(e.alpha, e.beta, e.gamma_, z2)


class SpectralScan(NamedTuple):
    min_eig_normalized: float
    u_at_min: float


def spectral_matrix_scan(mp: MultivarParams, u_grid: npt.ArrayLike) -> SpectralScan:
    """
    Smallest eigenvalue of [ρ_ij·G̃_ij(u)] relative to its largest magnitude, over the grid.

    The matrix-valued kernel is valid iff this matrix is PSD at every frequency.
    """
    u = np.asarray(u_grid, dtype=float)
    p = mp.p
    stack = np.zeros((u.size, p, p))
    for i in range(p):
        for j in range(i, p):
            prof = float(mp.rho_mat[i, j]) * _spectral_profile(mp, i, j, u)
            stack[:, i, j] = prof
            stack[:, j, i] = prof
    eig = np.linalg.eigvalsh(stack)
    span = np.maximum(np.max(np.abs(eig), axis=1), np.finfo(float).tiny)
    rel = eig[:, 0] / span
    k = int(np.argmin(rel))
    return SpectralScan(float(rel[k]), float(u[k]))


def gram_multivar(mp: MultivarParams, points: npt.ArrayLike) -> GramResult:
    """
    Block Gram matrix [ρ_ij·G_d(x_k − x_l; θ_ij)], variable-major ordering.

    Pairs at distance >= max a_ij are skipped through a k-d tree.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[1] != mp.d:
        raise ValidationError(
            f"points must have shape (n, {mp.d}), got {pts.shape}", code=ReasonCode.GHK_ERROR_DIMENSION_MISMATCH
        )
    n = pts.shape[0]
    if n > MAX_POINTS:
        raise ValidationError(f"{n} points exceed the limit {MAX_POINTS}", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
    p = mp.p
    for i in range(p):
        for j in range(i, p):
            e = mp.entry(i, j)
            rep = univariate.check_param_space(e.alpha, e.beta, e.gamma_, mp.d)
            if not rep.in_space:
                raise ParamSpaceError(f"entry ({i}, {j}) outside P_{mp.d}", report=rep)
    reach = float(mp.a_mat.max())
    tree = cKDTree(pts)
    pairs = tree.query_pairs(reach, output_type="ndarray")
    dists = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1) if len(pairs) else np.zeros(0)
    rows: list[FloatArray] = []
    cols: list[FloatArray] = []
    data: list[FloatArray] = []
    diag_idx = np.arange(n)
    for i in range(p):
        for j in range(p):
            e = mp.entry(i, j)
            rho = float(mp.rho_mat[i, j])
            vals = np.array([rho * univariate.radial_eval(e, mp.d, float(r)) for r in dists])
            # diagonal pairs (x_k, x_k)
            rows.append(i * n + diag_idx)
            cols.append(j * n + diag_idx)
            data.append(np.full(n, rho * e.sigma2))
            if len(pairs):
                rows.extend([i * n + pairs[:, 0], i * n + pairs[:, 1]])
                cols.extend([j * n + pairs[:, 1], j * n + pairs[:, 0]])
                data.extend([vals, vals])
    size = p * n
    mat = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
    ).tocsr()
    mat.eliminate_zeros()
    nnz_fraction = mat.nnz / float(size * size)
    logger.debug("gram: n=%d p=%d pairs=%d nnz=%.3f", n, p, len(pairs), nnz_fraction)
    dense = mat.toarray()
    dense = 0.5 * (dense + dense.T)
    eig = np.linalg.eigvalsh(dense)
    min_eig, max_eig = float(eig[0]), float(eig[-1])
    psd = min_eig >= -GRAM_PSD_TOL * max(abs(max_eig), 1.0)
    dense.setflags(write=False)
    return GramResult(matrix=dense, min_eig=min_eig, max_eig=max_eig, psd=psd, nnz_fraction=nnz_fraction)


# ---------------------------------------------------------------------------
# bivariate constructions
# ---------------------------------------------------------------------------


def _bivariate_matrices(
    variant: BivariateVariant, a: float, s1: float, s2: float, c: float
) -> dict[str, list[list[float]]]:
    a_mat = [[a, a], [a, a]]
    if variant is BivariateVariant.I:
        alpha = c
        return {
            "a": a_mat,
            "alpha": [[alpha, alpha], [alpha, alpha]],
            "beta": [[s1, alpha + 0.5], [alpha + 0.5, s2]],
            "gamma": [[3 * alpha + 0.5 - s1, 2 * alpha], [2 * alpha, 3 * alpha + 0.5 - s2]],
        }
    beta = c
    alpha_mat = [[s1, beta - 0.5], [beta - 0.5, s2]]
    if variant is BivariateVariant.II:
        gamma = [[s1 + beta - 0.5, 2 * beta - 1], [2 * beta - 1, s2 + beta - 0.5]]
    else:
        gamma = [[2 * s1, 2 * beta - 1], [2 * beta - 1, 2 * s2]]
    return {"a": a_mat, "alpha": alpha_mat, "beta": [[beta, beta], [beta, beta]], "gamma": gamma}


def _check_bivariate_bounds(variant: BivariateVariant, d: int, s1: float, s2: float, c: float) -> None:
    half_d = d / 2.0
    if variant is BivariateVariant.I:
        ok = c > half_d and c + 0.5 < s1 <= 2 * c and c + 0.5 < s2 <= 2 * c
        rule = "alpha > d/2 and alpha + 1/2 < beta_k <= 2 alpha"
    else:
        ok = s1 > half_d and s2 > half_d and c >= max(s1, s2) + 0.5
        rule = "alpha_k > d/2 and beta >= max(alpha_1, alpha_2) + 1/2"
    if not ok:
        raise PreconditionError(
            f"variant {variant.value} shapes violate {rule}",
            context={"shape1": s1, "shape2": s2, "common_shape": c, "d": d},
        )


def _closed_form_rho_max(variant: BivariateVariant, d: int, s1: float, s2: float, c: float) -> float | None:
    half_d = d / 2.0
    if variant is BivariateVariant.I:
        # the printed bound repeats its last two gamma factors above and below the bar
        return None
    beta = c
    if variant is BivariateVariant.II:
        numer = [s1, s2, s1 + beta - (d + 1) / 2.0, s2 + beta - (d + 1) / 2.0]
        denom = [s1 - half_d, s2 - half_d, s1 + beta - 0.5, s2 + beta - 0.5]
    else:
        numer = [s1, s2, 2 * s1 - half_d, 2 * s2 - half_d]
        denom = [s1 - half_d, s2 - half_d, 2 * s1, 2 * s2]
    numer += [beta - (d + 1) / 2.0] * 2 + [2 * beta - 1.0] * 2
    denom += [beta - 0.5] * 2 + [2 * beta - 1.0 - half_d] * 2
    g = specfun.log_gamma_ratio(numer, denom)
    if g.sign <= 0:
        return 0.0
    return math.exp(0.5 * g.log_abs)


def determinantal_bound(
    mp: MultivarParams, z_max: float = SPECTRAL_Z_MAX, nodes: int = SPECTRAL_NODES
) -> float:
    """
    inf over π·a·u ∈ [0, z_max] of √(G̃₁₁·G̃₂₂)/|G̃₁₂| for a bivariate model with a common range.

    Nodes where |G̃₁₂| is below DETERMINANTAL_FLOOR of its peak are skipped.
    """
    if mp.p != 2:
        raise ValidationError("determinantal bound needs p = 2", code=ReasonCode.GHK_ERROR_DIMENSION_MISMATCH)
    a = float(mp.a_mat[0, 1])
    u = np.linspace(0.0, z_max, nodes) / (math.pi * a)
    g11 = _spectral_profile(mp, 0, 0, u)
    g22 = _spectral_profile(mp, 1, 1, u)
    g12 = np.abs(_spectral_profile(mp, 0, 1, u))
    mask = g12 > DETERMINANTAL_FLOOR * float(g12.max(initial=0.0))
    ratio = np.sqrt(np.clip(g11[mask] * g22[mask], 0.0, None)) / g12[mask]
    return float(ratio.min()) if ratio.size else math.inf


def make_bivariate(
    variant: BivariateVariant | str,
    d: int,
    a: float,
    shape1: float,
    shape2: float,
    common_shape: float,
    rho: float | None = None,
) -> tuple[BivariateSpec, MultivarParams]:
    """
    One of the three bivariate kernels valid under a determinantal inequality.

    Variant I: common α, shape1/shape2 = β₁/β₂. Variants II and III: common β,
    shape1/shape2 = α₁/α₂. The certified bound on |ρ| is the smaller of the
    closed form (when usable) and the numeric determinantal infimum.
    """
    var = BivariateVariant(variant)
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise ValidationError("d must be a positive integer", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
    if not (math.isfinite(a) and a > 0.0):
        raise ValidationError("range a must be > 0", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
    _check_bivariate_bounds(var, d, shape1, shape2, common_shape)
    mats = _bivariate_matrices(var, a, shape1, shape2, common_shape)
    unit_rho = MultivarParams(
        p=2,
        d=d,
        a_mat=np.array(mats["a"]),
        alpha_mat=np.array(mats["alpha"]),
        beta_mat=np.array(mats["beta"]),
        gamma_mat=np.array(mats["gamma"]),
        rho_mat=np.eye(2),
    )
    closed = _closed_form_rho_max(var, d, shape1, shape2, common_shape)
    numeric = determinantal_bound(unit_rho)
    rho_max = numeric if closed is None else min(closed, numeric)
    chosen = rho_max if rho is None else float(rho)
    spec = BivariateSpec(
        variant=var,
        d=d,
        a=a,
        shape1=shape1,
        shape2=shape2,
        common_shape=common_shape,
        rho=chosen,
        rho_max=rho_max,
        rho_max_closed_form=closed,
        rho_max_numeric=numeric,
    )
    logger.info("bivariate %s: rho_max=%.6g (closed=%s, numeric=%.6g)", var.value, rho_max, closed, numeric)
    mp = MultivarParams(
        p=2,
        d=d,
        a_mat=unit_rho.a_mat,
        alpha_mat=unit_rho.alpha_mat,
        beta_mat=unit_rho.beta_mat,
        gamma_mat=unit_rho.gamma_mat,
        rho_mat=np.array([[1.0, chosen], [chosen, 1.0]]),
    )
    return spec, mp
