from .errors import (
    DomainError,
    KernelError,
    NonConvergenceError,
    ParamSpaceError,
    PoleError,
    PreconditionError,
    ProvisoError,
    QuadratureError,
    ValidationError,
)
from .hashing import canonical_json, canonical_sha256
from .reason_codes import ReasonCode
from .types import (
    BivariateSpec,
    BivariateVariant,
    CndResult,
    ConditionSet,
    ConvergenceTrace,
    FloatArray,
    GramResult,
    HypParams,
    KernelParams,
    LimitFamily,
    LimitKernelSpec,
    MultivarParams,
    ParamSpaceReport,
    PrecisionBudget,
    PsiCheckReport,
    PsiFamily,
    PsiSpec,
    QuadratureMethod,
    QuadratureSpec,
    SeriesResult,
    SignedLog,
    SmoothnessReport,
    ValidityReport,
)

__all__ = [
    "BivariateSpec",
    "BivariateVariant",
    "CndResult",
    "ConditionSet",
    "ConvergenceTrace",
    "DomainError",
    "FloatArray",
    "GramResult",
    "HypParams",
    "KernelError",
    "KernelParams",
    "LimitFamily",
    "LimitKernelSpec",
    "MultivarParams",
    "NonConvergenceError",
    "ParamSpaceError",
    "ParamSpaceReport",
    "PoleError",
    "PrecisionBudget",
    "PreconditionError",
    "ProvisoError",
    "PsiCheckReport",
    "PsiFamily",
    "PsiSpec",
    "QuadratureError",
    "QuadratureMethod",
    "QuadratureSpec",
    "ReasonCode",
    "SeriesResult",
    "SignedLog",
    "SmoothnessReport",
    "ValidationError",
    "ValidityReport",
    "canonical_json",
    "canonical_sha256",
]
