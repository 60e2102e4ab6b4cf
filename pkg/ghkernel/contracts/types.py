from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any

import numpy as np
import numpy.typing as npt

from .errors import PoleError, ValidationError
from .hashing import canonical_sha256
from .reason_codes import ReasonCode

FloatArray = npt.NDArray[np.float64]

SYMMETRY_TOL = 1e-12

_ALLOWED_BUDGET_KEYS = {"rel_tol", "abs_tol", "max_terms"}
_ALLOWED_KERNEL_KEYS = {"a", "alpha", "beta", "gamma", "gamma_", "sigma2"}
_ALLOWED_QUAD_KEYS = {"method", "abs_tol", "max_subdivisions"}
_ALLOWED_PSI_KEYS = {"family", "params", "q", "upper_bound", "anchor_points"}
_ALLOWED_MULTIVAR_KEYS = {
    "p",
    "d",
    "a",
    "alpha",
    "beta",
    "gamma",
    "rho",
    "psi1",
    "psi2",
    "condition_set",
}


def _number(raw: Any, name: str) -> float:
    """Strict numeric coercion: bools and non-numbers are invalid, NaN/Inf are BAD_NUMBER."""
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ValidationError(f"{name} must be a real number", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
    value = float(raw)
    if not math.isfinite(value):
        raise ValidationError(f"{name} is not finite", code=ReasonCode.GHK_ERROR_BAD_NUMBER)
    return value


def _integer(raw: Any, name: str, *, minimum: int) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ValidationError(f"{name} must be an integer", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
    if raw < minimum:
        raise ValidationError(f"{name} must be >= {minimum}", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
    return raw


def _reject_unknown(raw: dict[str, Any], allowed: set[str], where: str) -> None:
    unknown = set(raw.keys()) - allowed
    if unknown:
        raise ValidationError(
            f"unknown keys in {where}: {sorted(unknown)}", code=ReasonCode.GHK_ERROR_UNKNOWN_KEY
        )


def _require_dict(raw: Any, where: str) -> dict[str, Any]:
    if not isinstance(raw, dict):
        raise ValidationError(f"{where} must be an object", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
    return raw


# ---------------------------------------------------------------------------
# special-function records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrecisionBudget:
    """Series truncation control."""

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_terms: int = 10_000

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rel_tol) and self.rel_tol > 0.0):
            raise ValidationError("rel_tol must be > 0", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        if not (math.isfinite(self.abs_tol) and self.abs_tol > 0.0):
            raise ValidationError("abs_tol must be > 0", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        if isinstance(self.max_terms, bool) or not isinstance(self.max_terms, int) or self.max_terms < 1:
            raise ValidationError("max_terms must be >= 1", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)

    @staticmethod
    def from_dict(raw: dict[str, Any]) -> PrecisionBudget:
        raw = _require_dict(raw, "budget")
        _reject_unknown(raw, _ALLOWED_BUDGET_KEYS, "budget")
        base = PrecisionBudget()
        return PrecisionBudget(
            rel_tol=_number(raw.get("rel_tol", base.rel_tol), "rel_tol"),
            abs_tol=_number(raw.get("abs_tol", base.abs_tol), "abs_tol"),
            max_terms=_integer(raw.get("max_terms", base.max_terms), "max_terms", minimum=1),
        )


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and float(x).is_integer()


@dataclass(frozen=True)
class HypParams:
    upper: tuple[float, ...]
    lower: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        for v in self.upper + self.lower:
            if not math.isfinite(v):
                raise ValidationError("hypergeometric parameter is not finite", code=ReasonCode.GHK_ERROR_BAD_NUMBER)
        for v in self.lower:
            if _is_nonpositive_integer(v):
                raise PoleError(f"lower parameter {v} is a series pole", context={"lower": list(self.lower)})

    @property
    def k(self) -> int:
        return len(self.upper)

    @property
    def k_prime(self) -> int:
        return len(self.lower)


@dataclass(frozen=True)
class SeriesResult:
    value: float
    abs_error: float
    terms: int


@dataclass(frozen=True)
class SignedLog:
    """ln|x| together with the sign of x."""

    log_abs: float
    sign: int

    @property
    def value(self) -> float:
        return self.sign * math.exp(self.log_abs)


# ---------------------------------------------------------------------------
# univariate records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelParams:
    """Range ``a``, shapes ``alpha``/``beta``/``gamma_`` and variance ``sigma2``."""

    a: float
    alpha: float
    beta: float
    gamma_: float
    sigma2: float = 1.0

    def __post_init__(self) -> None:
        for name in ("a", "alpha", "beta", "gamma_", "sigma2"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValidationError(f"{name} must be a real number", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
            if not math.isfinite(float(v)):
                raise ValidationError(f"{name} is not finite", code=ReasonCode.GHK_ERROR_BAD_NUMBER)
            object.__setattr__(self, name, float(v))
        if self.a <= 0.0:
            raise ValidationError("range a must be > 0", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        if self.sigma2 <= 0.0:
            raise ValidationError("sigma2 must be > 0", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)

    @property
    def shapes(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma_)

    def shifted(self, delta: float) -> KernelParams:
        """Shift all three shape parameters by ``delta`` (montée/descente arithmetic)."""
        return replace(
            self, alpha=self.alpha + delta, beta=self.beta + delta, gamma_=self.gamma_ + delta
        )

    def to_dict(self) -> dict[str, float]:
        return {
            "a": self.a,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma_,
            "sigma2": self.sigma2,
        }

    @staticmethod
    def from_dict(raw: dict[str, Any]) -> KernelParams:
        raw = _require_dict(raw, "kernel params")
        _reject_unknown(raw, _ALLOWED_KERNEL_KEYS, "kernel params")
        if "gamma" in raw and "gamma_" in raw:
            raise ValidationError("give either gamma or gamma_", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        for key in ("a", "alpha", "beta"):
            if key not in raw:
                raise ValidationError(f"missing {key}", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        g = raw.get("gamma", raw.get("gamma_"))
        if g is None:
            raise ValidationError("missing gamma", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        return KernelParams(
            a=_number(raw["a"], "a"),
            alpha=_number(raw["alpha"], "alpha"),
            beta=_number(raw["beta"], "beta"),
            gamma_=_number(g, "gamma"),
            sigma2=_number(raw.get("sigma2", 1.0), "sigma2"),
        )


@dataclass(frozen=True)
class ParamSpaceReport:
    dimension: int
    in_space: bool
    cond_alpha: bool
    cond_product: bool
    cond_sum: bool
    boundary: bool

    def failing_conditions(self) -> list[str]:
        out: list[str] = []
        if not self.cond_alpha:
            out.append("cond_alpha")
        if not self.cond_product:
            out.append("cond_product")
        if not self.cond_sum:
            out.append("cond_sum")
        return out

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["failing_conditions"] = self.failing_conditions()
        return out

    def fingerprint(self) -> str:
        return canonical_sha256(self.to_dict())


@dataclass(frozen=True)
class SmoothnessReport:
    k_origin: int
    k_range: int
    ms_diff_order: int

    def to_dict(self) -> dict[str, int]:
        return asdict(self)


class LimitFamily(str, Enum):
    MATERN = "Matern"
    LAGUERRE = "Laguerre"
    TRICOMI = "Tricomi"
    INC_GAMMA = "IncGamma"
    ERFC = "Erfc"
    GAUSSIAN = "Gaussian"


@dataclass(frozen=True)
class LimitKernelSpec:
    """
    Target of an asymptotic path.

    shape:  Matérn / IncGamma smoothness α−d/2; Laguerre α−d/2; Tricomi n
            with α−d/2 = 2n.
    shape2: Laguerre / Tricomi β−d/2 (unused elsewhere). Must exceed α−d/2;
            β and γ are interchangeable, so the finite one is named β.
    """

    family: LimitFamily
    b: float
    shape: float = 0.0
    shape2: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", LimitFamily(self.family))
        if not (math.isfinite(self.b) and self.b > 0.0):
            raise ValidationError("scale b must be > 0", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        if not math.isfinite(self.shape):
            raise ValidationError("shape is not finite", code=ReasonCode.GHK_ERROR_BAD_NUMBER)
        fam = self.family
        if fam in (LimitFamily.MATERN, LimitFamily.INC_GAMMA, LimitFamily.LAGUERRE) and self.shape <= 0.0:
            raise ValidationError(f"{fam.value} shape must be > 0", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        if fam is LimitFamily.TRICOMI and (self.shape < 1 or not float(self.shape).is_integer()):
            raise ValidationError("Tricomi shape n must be a positive integer", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        if fam in (LimitFamily.LAGUERRE, LimitFamily.TRICOMI):
            if self.shape2 is None or not math.isfinite(self.shape2) or self.shape2 <= 0.0:
                raise ValidationError(
                    f"{fam.value} needs shape2 = beta - d/2 > 0", code=ReasonCode.GHK_ERROR_INVALID_REQUEST
                )
        # every path point must keep beta > alpha to stay in the admissible space
        if fam is LimitFamily.INC_GAMMA and self.shape >= 1.0:
            raise ValidationError("IncGamma shape must be < 1", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        if fam is LimitFamily.LAGUERRE and self.shape2 <= self.shape:
            raise ValidationError("Laguerre needs shape2 > shape", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        if fam is LimitFamily.TRICOMI:
            excess = self.shape2 - 2.0 * self.shape
            if excess <= 0.0:
                raise ValidationError("Tricomi needs shape2 > 2n", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
            if excess >= 1.0 and float(excess).is_integer():
                raise ValidationError(
                    "Tricomi prefactor has a pole when shape2 - 2n is a positive integer",
                    code=ReasonCode.GHK_ERROR_POLE,
                )

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family.value, "b": self.b, "shape": self.shape, "shape2": self.shape2}


# ---------------------------------------------------------------------------
# multivariate records
# ---------------------------------------------------------------------------


class ConditionSet(str, Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    C5 = "C5"
    C4_SWAPPED = "C4_swapped"
    C5_SWAPPED = "C5_swapped"


def _as_matrix(raw: Any, name: str, p: int) -> FloatArray:
    try:
        m = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} is not a numeric matrix", code=ReasonCode.GHK_ERROR_MALFORMED_INPUT) from exc
    if m.shape != (p, p):
        raise ValidationError(
            f"{name} has shape {m.shape}, expected {(p, p)}",
            code=ReasonCode.GHK_ERROR_DIMENSION_MISMATCH,
        )
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries", code=ReasonCode.GHK_ERROR_BAD_NUMBER)
    diff = np.abs(m - m.T)
    if diff.size and float(diff.max()) > SYMMETRY_TOL:
        i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
        raise ValidationError(
            f"{name} is not symmetric at entry ({int(i)}, {int(j)})",
            code=ReasonCode.GHK_ERROR_ASYMMETRY,
            context={"matrix": name, "entry": [int(i), int(j)]},
        )
    m = 0.5 * (m + m.T)
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class MultivarParams:
    p: int
    d: int
    a_mat: FloatArray
    alpha_mat: FloatArray
    beta_mat: FloatArray
    gamma_mat: FloatArray
    rho_mat: FloatArray

    def __post_init__(self) -> None:
        if isinstance(self.p, bool) or not isinstance(self.p, int) or self.p < 1:
            raise ValidationError("p must be a positive integer", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        if isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 1:
            raise ValidationError("d must be a positive integer", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        for name in ("a_mat", "alpha_mat", "beta_mat", "gamma_mat", "rho_mat"):
            object.__setattr__(self, name, _as_matrix(getattr(self, name), name, self.p))
        if np.any(self.a_mat <= 0.0):
            raise ValidationError("a_mat must be entrywise positive", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        if np.any(np.diag(self.rho_mat) <= 0.0):
            raise ValidationError("rho_mat diagonal must be positive", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)

    def entry(self, i: int, j: int) -> KernelParams:
        """Scalar kernel parameters of the (i, j) entry (σ² = 1; ρ applied separately)."""
        return KernelParams(
            a=float(self.a_mat[i, j]),
            alpha=float(self.alpha_mat[i, j]),
            beta=float(self.beta_mat[i, j]),
            gamma_=float(self.gamma_mat[i, j]),
        )

    def swapped(self) -> MultivarParams:
        """Exchange the roles of the beta and gamma matrices."""
        return MultivarParams(
            p=self.p,
            d=self.d,
            a_mat=self.a_mat,
            alpha_mat=self.alpha_mat,
            beta_mat=self.gamma_mat,
            gamma_mat=self.beta_mat,
            rho_mat=self.rho_mat,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "d": self.d,
            "a": self.a_mat.tolist(),
            "alpha": self.alpha_mat.tolist(),
            "beta": self.beta_mat.tolist(),
            "gamma": self.gamma_mat.tolist(),
            "rho": self.rho_mat.tolist(),
        }

    @staticmethod
    def from_dict(raw: dict[str, Any]) -> MultivarParams:
        raw = _require_dict(raw, "multivariate document")
        _reject_unknown(raw, _ALLOWED_MULTIVAR_KEYS, "multivariate document")
        for key in ("p", "d", "a", "alpha", "beta", "gamma", "rho"):
            if key not in raw:
                raise ValidationError(f"missing {key}", code=ReasonCode.GHK_ERROR_MALFORMED_INPUT)
        p = _integer(raw["p"], "p", minimum=1)
        d = _integer(raw["d"], "d", minimum=1)
        return MultivarParams(
            p=p,
            d=d,
            a_mat=_as_matrix(raw["a"], "a", p),
            alpha_mat=_as_matrix(raw["alpha"], "alpha", p),
            beta_mat=_as_matrix(raw["beta"], "beta", p),
            gamma_mat=_as_matrix(raw["gamma"], "gamma", p),
            rho_mat=_as_matrix(raw["rho"], "rho", p),
        )


class PsiFamily(str, Enum):
    TRUNC_POWER_INTEGRATED = "TruncPowerIntegrated"
    LOG_BERNSTEIN = "LogBernstein"
    POWER_BERNSTEIN = "PowerBernstein"
    RATIONAL_BERNSTEIN = "RationalBernstein"
    CUSTOM = "Custom"


# catalog parameter arity: TruncPowerIntegrated (a, b, c, eta); LogBernstein (b,);
# PowerBernstein (b, eta, theta); RationalBernstein (b, eta); Custom: tabulated (x, y) pairs
_PSI_ARITY = {
    PsiFamily.TRUNC_POWER_INTEGRATED: 4,
    PsiFamily.LOG_BERNSTEIN: 1,
    PsiFamily.POWER_BERNSTEIN: 3,
    PsiFamily.RATIONAL_BERNSTEIN: 2,
}


@dataclass(frozen=True)
class PsiSpec:
    family: PsiFamily
    params: tuple[float, ...]
    q: int = 0
    upper_bound: float | None = None
    anchor_points: tuple[tuple[float, ...], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", PsiFamily(self.family))
        object.__setattr__(self, "params", tuple(float(v) for v in self.params))
        object.__setattr__(
            self, "anchor_points", tuple(tuple(float(c) for c in pt) for pt in self.anchor_points)
        )
        if any(not math.isfinite(v) for v in self.params):
            raise ValidationError("psi params not finite", code=ReasonCode.GHK_ERROR_BAD_NUMBER)
        if isinstance(self.q, bool) or not isinstance(self.q, int) or self.q < 0:
            raise ValidationError("q must be a nonnegative integer", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        if self.upper_bound is not None and not (math.isfinite(self.upper_bound) and self.upper_bound > 0):
            raise ValidationError("upper_bound must be > 0", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        self._check_family_bounds()

    def _check_family_bounds(self) -> None:
        fam = self.family
        prm = self.params
        if fam is PsiFamily.CUSTOM:
            if len(prm) < 4 or len(prm) % 2:
                raise ValidationError(
                    "Custom psi needs an even-length list x0,y0,x1,y1,... with at least two nodes",
                    code=ReasonCode.GHK_ERROR_INVALID_REQUEST,
                )
            xs = prm[0::2]
            if any(x1 <= x0 for x0, x1 in zip(xs, xs[1:], strict=False)) or xs[0] != 0.0:
                raise ValidationError(
                    "Custom psi abscissae must start at 0 and increase",
                    code=ReasonCode.GHK_ERROR_INVALID_REQUEST,
                )
            return
        if len(prm) != _PSI_ARITY[fam]:
            raise ValidationError(
                f"{fam.value} expects {_PSI_ARITY[fam]} parameters", code=ReasonCode.GHK_ERROR_INVALID_REQUEST
            )
        ok = True
        if fam is PsiFamily.TRUNC_POWER_INTEGRATED:
            a, b, c, eta = prm
            ok = a > 0 and b > 0 and c > 1 and eta >= self.q
        elif fam is PsiFamily.LOG_BERNSTEIN:
            ok = prm[0] > 0
        elif fam is PsiFamily.POWER_BERNSTEIN:
            b, eta, theta = prm
            ok = b > 0 and 0 < eta <= 1 and 0 < theta <= 1
        elif fam is PsiFamily.RATIONAL_BERNSTEIN:
            b, eta = prm
            ok = b > 0 and 0 < eta <= 1
        if not ok:
            raise ValidationError(
                f"{fam.value} parameters {list(prm)} outside catalog bounds",
                code=ReasonCode.GHK_ERROR_PRECONDITION,
            )

    @property
    def analytic(self) -> bool:
        return self.family is not PsiFamily.CUSTOM

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.family.value,
            "params": list(self.params),
            "q": self.q,
            "upper_bound": self.upper_bound,
            "anchor_points": [list(pt) for pt in self.anchor_points],
        }

    @staticmethod
    def from_dict(raw: dict[str, Any]) -> PsiSpec:
        raw = _require_dict(raw, "psi spec")
        _reject_unknown(raw, _ALLOWED_PSI_KEYS, "psi spec")
        fam = raw.get("family")
        try:
            family = PsiFamily(fam)
        except ValueError as exc:
            raise ValidationError(f"unknown psi family {fam!r}", code=ReasonCode.GHK_ERROR_INVALID_REQUEST) from exc
        params_raw = raw.get("params", [])
        if not isinstance(params_raw, list):
            raise ValidationError("psi params must be a list", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        anchors_raw = raw.get("anchor_points", [])
        if not isinstance(anchors_raw, list) or any(not isinstance(pt, list) for pt in anchors_raw):
            raise ValidationError("anchor_points must be a list of lists", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        ub = raw.get("upper_bound")
        return PsiSpec(
            family=family,
            params=tuple(_number(v, "psi param") for v in params_raw),
            q=_integer(raw.get("q", 0), "q", minimum=0),
            upper_bound=None if ub is None else _number(ub, "upper_bound"),
            anchor_points=tuple(tuple(_number(c, "anchor") for c in pt) for pt in anchors_raw),
        )


@dataclass(frozen=True)
class ValidityReport:
    condition_set: ConditionSet
    satisfied: bool
    failures: tuple[tuple[str, str], ...]
    certificates: dict[str, dict[str, float]] = field(default_factory=dict)
    witnesses: dict[str, float] = field(default_factory=dict)
    numeric_only: bool = False

    def __post_init__(self) -> None:
        if self.satisfied != (len(self.failures) == 0):
            raise ValueError("satisfied must be equivalent to an empty failure list")

    @property
    def verdict(self) -> str:
        return ReasonCode.GHK_OK.value if self.satisfied else ReasonCode.GHK_NOT_CERTIFIED.value

    def to_dict(self) -> dict[str, Any]:
        return {
            "condition_set": self.condition_set.value,
            "satisfied": self.satisfied,
            "verdict": self.verdict,
            "failures": [{"label": lab, "message": msg} for lab, msg in self.failures],
            "certificates": {k: dict(v) for k, v in sorted(self.certificates.items())},
            "witnesses": dict(sorted(self.witnesses.items())),
            "numeric_only": self.numeric_only,
        }

    def fingerprint(self) -> str:
        return canonical_sha256(self.to_dict())


@dataclass(frozen=True)
class CndResult:
    """Verdict of the conditionally-negative-semidefinite test and its certificate."""

    cnd: bool
    max_eig: float
    threshold: float

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class PsiCheckReport:
    family: PsiFamily
    q: int
    passed: bool
    analytic: bool
    worst_violation: float
    grid_points: int

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["family"] = self.family.value
        return out


class BivariateVariant(str, Enum):
    I = "I"  # noqa: E741
    II = "II"
    III = "III"


@dataclass(frozen=True)
class BivariateSpec:
    variant: BivariateVariant
    d: int
    a: float
    shape1: float
    shape2: float
    common_shape: float
    rho: float
    rho_max: float
    rho_max_closed_form: float | None
    rho_max_numeric: float

    def __post_init__(self) -> None:
        if abs(self.rho) > self.rho_max * (1.0 + 1e-12):
            raise ValidationError(
                f"|rho|={abs(self.rho)} exceeds certified bound {self.rho_max}",
                code=ReasonCode.GHK_ERROR_RHO_BOUND,
            )

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["variant"] = self.variant.value
        return out


# ---------------------------------------------------------------------------
# oracle records
# ---------------------------------------------------------------------------


class QuadratureMethod(str, Enum):
    ADAPTIVE_GAUSS_KRONROD = "AdaptiveGaussKronrod"
    BESSEL_ZERO_PARTITION = "BesselZeroPartition"


@dataclass(frozen=True)
class QuadratureSpec:
    method: QuadratureMethod = QuadratureMethod.ADAPTIVE_GAUSS_KRONROD
    abs_tol: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", QuadratureMethod(self.method))
        if not (math.isfinite(self.abs_tol) and self.abs_tol > 0.0):
            raise ValidationError("abs_tol must be > 0", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)
        if isinstance(self.max_subdivisions, bool) or self.max_subdivisions < 1:
            raise ValidationError("max_subdivisions must be >= 1", code=ReasonCode.GHK_ERROR_INVALID_REQUEST)

    @staticmethod
    def from_dict(raw: dict[str, Any]) -> QuadratureSpec:
        raw = _require_dict(raw, "quadrature spec")
        _reject_unknown(raw, _ALLOWED_QUAD_KEYS, "quadrature spec")
        base = QuadratureSpec()
        try:
            method = QuadratureMethod(raw.get("method", base.method.value))
        except ValueError as exc:
            raise ValidationError("unknown quadrature method", code=ReasonCode.GHK_ERROR_INVALID_REQUEST) from exc
        return QuadratureSpec(
            method=method,
            abs_tol=_number(raw.get("abs_tol", base.abs_tol), "abs_tol"),
            max_subdivisions=_integer(
                raw.get("max_subdivisions", base.max_subdivisions), "max_subdivisions", minimum=1
            ),
        )


@dataclass(frozen=True, eq=False)
class GramResult:
    matrix: FloatArray
    min_eig: float
    max_eig: float
    psd: bool
    nnz_fraction: float

    def summary(self) -> dict[str, Any]:
        return {
            "n": int(self.matrix.shape[0]),
            "min_eig": self.min_eig,
            "max_eig": self.max_eig,
            "psd": self.psd,
            "nnz_fraction": self.nnz_fraction,
        }


@dataclass(frozen=True)
class ConvergenceTrace:
    target: LimitKernelSpec
    parameter_path: tuple[tuple[float, float, float, float], ...]
    sup_errors: tuple[float, ...]
    path_name: str = ""

    def __post_init__(self) -> None:
        if len(self.parameter_path) != len(self.sup_errors):
            raise ValueError("parameter_path and sup_errors lengths differ")

    def is_nonincreasing(self, slack: float = 0.10) -> bool:
        errs = self.sup_errors
        return all(e1 <= e0 * (1.0 + slack) for e0, e1 in zip(errs, errs[1:], strict=False))

    def to_dict(self) -> dict[str, Any]:
        return {
            "target": self.target.to_dict(),
            "path_name": self.path_name,
            "parameter_path": [list(q) for q in self.parameter_path],
            "sup_errors": list(self.sup_errors),
            "nonincreasing": self.is_nonincreasing(),
        }

    def fingerprint(self) -> str:
        return canonical_sha256(self.to_dict())
