from __future__ import annotations

from enum import Enum


class ReasonCode(str, Enum):
    # --- Outcome anchors (stable) ---
    GHK_OK = "GHK_OK"
    GHK_NOT_CERTIFIED = "GHK_NOT_CERTIFIED"

    # --- Special-function errors ---
    GHK_ERROR_POLE = "GHK_ERROR_POLE"
    GHK_ERROR_DOMAIN = "GHK_ERROR_DOMAIN"
    GHK_ERROR_NON_CONVERGENCE = "GHK_ERROR_NON_CONVERGENCE"
    GHK_ERROR_QUADRATURE = "GHK_ERROR_QUADRATURE"

    # --- Kernel parameter errors ---
    GHK_ERROR_PRECONDITION = "GHK_ERROR_PRECONDITION"
    GHK_ERROR_PARAM_SPACE = "GHK_ERROR_PARAM_SPACE"
    GHK_ERROR_PROVISO = "GHK_ERROR_PROVISO"
    GHK_ERROR_RHO_BOUND = "GHK_ERROR_RHO_BOUND"
    GHK_ERROR_NOT_PSD = "GHK_ERROR_NOT_PSD"

    # --- Document / schema errors (fail-closed) ---
    GHK_ERROR_INVALID_REQUEST = "GHK_ERROR_INVALID_REQUEST"
    GHK_ERROR_UNKNOWN_KEY = "GHK_ERROR_UNKNOWN_KEY"
    GHK_ERROR_BAD_NUMBER = "GHK_ERROR_BAD_NUMBER"
    GHK_ERROR_ASYMMETRY = "GHK_ERROR_ASYMMETRY"
    GHK_ERROR_DIMENSION_MISMATCH = "GHK_ERROR_DIMENSION_MISMATCH"
    GHK_ERROR_MISSING_PSI = "GHK_ERROR_MISSING_PSI"
    GHK_ERROR_MALFORMED_INPUT = "GHK_ERROR_MALFORMED_INPUT"
    GHK_ERROR_USAGE = "GHK_ERROR_USAGE"
