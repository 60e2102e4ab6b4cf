from __future__ import annotations

from collections.abc import Mapping
from typing import Any

from .reason_codes import ReasonCode


class KernelError(ValueError):
    """
    Base error for every fail-closed path in ghkernel.

    ``str(exc)`` is the stable reason-code value, so callers can match on it
    the same way they would on a plain ``ValueError(ReasonCode.X.value)``.
    The human-readable explanation lives in ``detail``.
    """

    default_code: ReasonCode = ReasonCode.GHK_ERROR_INVALID_REQUEST

    def __init__(
        self,
        detail: str = "",
        *,
        code: ReasonCode | None = None,
        context: Mapping[str, Any] | None = None,
    ) -> None:
        self.code = code if code is not None else self.default_code
        self.detail = detail
        self.context: dict[str, Any] = dict(context or {})
        super().__init__(self.code.value)

    def to_dict(self) -> dict[str, Any]:
        return {
            "reason_code": self.code.value,
            "detail": self.detail,
            "context": {k: _jsonable(v) for k, v in sorted(self.context.items())},
        }


class PoleError(KernelError):
    default_code = ReasonCode.GHK_ERROR_POLE


class DomainError(KernelError):
    default_code = ReasonCode.GHK_ERROR_DOMAIN


class NonConvergenceError(KernelError):
    default_code = ReasonCode.GHK_ERROR_NON_CONVERGENCE

    def __init__(
        self,
        detail: str = "",
        *,
        partial_sum: float = float("nan"),
        terms: int = 0,
        context: Mapping[str, Any] | None = None,
    ) -> None:
        ctx = dict(context or {})
        ctx.setdefault("partial_sum", partial_sum)
        ctx.setdefault("terms", terms)
        super().__init__(detail, context=ctx)
        self.partial_sum = partial_sum
        self.terms = terms


class QuadratureError(KernelError):
    default_code = ReasonCode.GHK_ERROR_QUADRATURE


class PreconditionError(KernelError):
    default_code = ReasonCode.GHK_ERROR_PRECONDITION


class ParamSpaceError(KernelError):
    default_code = ReasonCode.GHK_ERROR_PARAM_SPACE

    def __init__(self, detail: str = "", *, report: Any = None) -> None:
        ctx = report.to_dict() if report is not None and hasattr(report, "to_dict") else {}
        super().__init__(detail, context=ctx)
        self.report = report


class ProvisoError(KernelError):
    default_code = ReasonCode.GHK_ERROR_PROVISO


class ValidationError(KernelError):
    """Schema / document errors. The caller picks the precise reason code."""

    default_code = ReasonCode.GHK_ERROR_INVALID_REQUEST


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    if isinstance(value, float):
        return value if value == value and abs(value) != float("inf") else str(value)
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return str(value)
