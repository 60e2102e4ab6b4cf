import math

import numpy as np
import pytest

from ghkernel.contracts import (
    BivariateSpec,
    BivariateVariant,
    ConditionSet,
    ConvergenceTrace,
    HypParams,
    KernelError,
    KernelParams,
    LimitFamily,
    LimitKernelSpec,
    MultivarParams,
    NonConvergenceError,
    ParamSpaceReport,
    PrecisionBudget,
    PsiFamily,
    PsiSpec,
    QuadratureSpec,
    ReasonCode,
    ValidityReport,
    canonical_json,
    canonical_sha256,
)


def _base_doc():
    return {
        "p": 2,
        "d": 1,
        "a": [[1.0, 1.0], [1.0, 1.0]],
        "alpha": [[2.0, 2.0], [2.0, 2.0]],
        "beta": [[3.0, 3.0], [3.0, 3.0]],
        "gamma": [[4.0, 4.0], [4.0, 4.0]],
        "rho": [[1.0, 0.5], [0.5, 1.0]],
    }


def test_error_str_is_the_reason_code_and_to_dict_is_stable():
    exc = NonConvergenceError("series stalled", partial_sum=0.25, terms=17)
    assert isinstance(exc, ValueError)
    assert str(exc) == ReasonCode.GHK_ERROR_NON_CONVERGENCE.value
    d = exc.to_dict()
    assert d["reason_code"] == "GHK_ERROR_NON_CONVERGENCE"
    assert d["context"] == {"partial_sum": 0.25, "terms": 17}
    assert KernelError("x").to_dict()["reason_code"] == ReasonCode.GHK_ERROR_INVALID_REQUEST.value


def test_hyp_params_reject_nonpositive_integer_lower_parameter():
    with pytest.raises(ValueError) as e:
        HypParams((1.0,), (2.0, -3.0))
    assert str(e.value) == ReasonCode.GHK_ERROR_POLE.value

    # non-integer negatives are fine
    assert HypParams((1.0,), (-2.5,)).k_prime == 1


def test_precision_budget_validation():
    with pytest.raises(ValueError) as e:
        PrecisionBudget(rel_tol=0.0)
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value

    with pytest.raises(ValueError) as e:
        PrecisionBudget.from_dict({"rel_tol": 1e-10, "oops": 1})
    assert str(e.value) == ReasonCode.GHK_ERROR_UNKNOWN_KEY.value

    with pytest.raises(ValueError) as e:
        PrecisionBudget.from_dict({"max_terms": True})
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value


def test_kernel_params_fail_closed():
    with pytest.raises(ValueError) as e:
        KernelParams(a=1.0, alpha=True, beta=2.0, gamma_=3.0)
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value

    with pytest.raises(ValueError) as e:
        KernelParams(a=1.0, alpha=math.nan, beta=2.0, gamma_=3.0)
    assert str(e.value) == ReasonCode.GHK_ERROR_BAD_NUMBER.value

    with pytest.raises(ValueError) as e:
        KernelParams(a=0.0, alpha=1.0, beta=2.0, gamma_=3.0)
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value

    with pytest.raises(ValueError) as e:
        KernelParams.from_dict({"a": 1, "alpha": 2, "beta": 2.5, "gamma": 4, "nugget": 0.1})
    assert str(e.value) == ReasonCode.GHK_ERROR_UNKNOWN_KEY.value

    with pytest.raises(ValueError) as e:
        KernelParams.from_dict({"a": 1, "alpha": 2, "beta": 2.5, "gamma": 4, "gamma_": 4})
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value


def test_kernel_params_dict_roundtrip_and_shift():
    p = KernelParams.from_dict({"a": 2, "alpha": 2, "beta": 2.5, "gamma": 4})
    assert p.to_dict() == {"a": 2.0, "alpha": 2.0, "beta": 2.5, "gamma": 4.0, "sigma2": 1.0}
    assert KernelParams.from_dict(p.to_dict()) == p
    assert p.shifted(0.5).shapes == (2.5, 3.0, 4.5)


def test_param_space_report_lists_failing_conditions_and_hashes_deterministically():
    rep = ParamSpaceReport(
        dimension=3, in_space=False, cond_alpha=True, cond_product=False, cond_sum=False, boundary=False
    )
    assert rep.failing_conditions() == ["cond_product", "cond_sum"]
    assert rep.fingerprint() == rep.fingerprint()
    assert rep.to_dict()["failing_conditions"] == ["cond_product", "cond_sum"]


def test_limit_spec_validation():
    with pytest.raises(ValueError) as e:
        LimitKernelSpec(LimitFamily.MATERN, b=1.0, shape=0.0)
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value

    with pytest.raises(ValueError) as e:
        LimitKernelSpec(LimitFamily.TRICOMI, b=1.0, shape=1.5, shape2=2.0)
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value

    with pytest.raises(ValueError) as e:
        LimitKernelSpec(LimitFamily.LAGUERRE, b=1.0, shape=1.0)
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value

    assert LimitKernelSpec("Gaussian", b=2.0).family is LimitFamily.GAUSSIAN


def test_multivar_params_fail_closed():
    doc = _base_doc()
    mp = MultivarParams.from_dict(doc)
    assert mp.entry(0, 1).shapes == (2.0, 3.0, 4.0)
    assert mp.to_dict()["rho"] == doc["rho"]

    bad = _base_doc()
    bad["rho"] = [[1.0, 0.5], [0.4, 1.0]]
    with pytest.raises(ValueError) as e:
        MultivarParams.from_dict(bad)
    assert str(e.value) == ReasonCode.GHK_ERROR_ASYMMETRY.value
    assert e.value.context["entry"] in ([0, 1], [1, 0])

    bad = _base_doc()
    bad["beta"] = [[3.0, 3.0, 3.0], [3.0, 3.0, 3.0]]
    with pytest.raises(ValueError) as e:
        MultivarParams.from_dict(bad)
    assert str(e.value) == ReasonCode.GHK_ERROR_DIMENSION_MISMATCH.value

    bad = _base_doc()
    del bad["gamma"]
    with pytest.raises(ValueError) as e:
        MultivarParams.from_dict(bad)
    assert str(e.value) == ReasonCode.GHK_ERROR_MALFORMED_INPUT.value

    bad = _base_doc()
    bad["nugget"] = 0.0
    with pytest.raises(ValueError) as e:
        MultivarParams.from_dict(bad)
    assert str(e.value) == ReasonCode.GHK_ERROR_UNKNOWN_KEY.value

    bad = _base_doc()
    bad["a"] = [[1.0, math.inf], [math.inf, 1.0]]
    with pytest.raises(ValueError) as e:
        MultivarParams.from_dict(bad)
    assert str(e.value) == ReasonCode.GHK_ERROR_BAD_NUMBER.value


def test_multivar_params_symmetry_tolerance_and_swap():
    doc = _base_doc()
    doc["rho"] = [[1.0, 0.5], [0.5 + 1e-14, 1.0]]
    mp = MultivarParams.from_dict(doc)
    assert mp.rho_mat[0, 1] == mp.rho_mat[1, 0]
    assert not mp.rho_mat.flags.writeable
    sw = mp.swapped()
    assert np.array_equal(sw.beta_mat, mp.gamma_mat)
    assert np.array_equal(sw.gamma_mat, mp.beta_mat)


def test_psi_spec_catalog_bounds():
    with pytest.raises(ValueError) as e:
        PsiSpec(PsiFamily.POWER_BERNSTEIN, (1.0, 1.5, 0.5))
    assert str(e.value) == ReasonCode.GHK_ERROR_PRECONDITION.value

    with pytest.raises(ValueError) as e:
        PsiSpec(PsiFamily.LOG_BERNSTEIN, (1.0, 2.0))
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value

    with pytest.raises(ValueError) as e:
        PsiSpec(PsiFamily.CUSTOM, (0.5, 1.0, 1.0, 2.0))
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value

    with pytest.raises(ValueError) as e:
        PsiSpec.from_dict({"family": "Hyperbolic", "params": [1.0]})
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value

    spec = PsiSpec.from_dict({"family": "LogBernstein", "params": [1.0], "anchor_points": [[0.0], [1.0]]})
    assert spec.analytic
    assert spec.anchor_points == ((0.0,), (1.0,))
    assert PsiSpec.from_dict(spec.to_dict()) == spec


def test_validity_report_verdict_and_invariant():
    ok = ValidityReport(condition_set=ConditionSet.C1, satisfied=True, failures=())
    assert ok.verdict == ReasonCode.GHK_OK.value
    bad = ValidityReport(
        condition_set=ConditionSet.C2, satisfied=False, failures=(("(2)(i)", "a is not max(eps_i, eps_j)"),)
    )
    assert bad.verdict == ReasonCode.GHK_NOT_CERTIFIED.value
    assert bad.to_dict()["failures"] == [{"label": "(2)(i)", "message": "a is not max(eps_i, eps_j)"}]
    assert bad.fingerprint() == canonical_sha256(bad.to_dict())

    with pytest.raises(ValueError):
        ValidityReport(condition_set=ConditionSet.C1, satisfied=True, failures=(("(1)(i)", "x"),))


def test_bivariate_spec_enforces_rho_bound():
    with pytest.raises(ValueError) as e:
        BivariateSpec(
            variant=BivariateVariant.II,
            d=1,
            a=1.0,
            shape1=2.0,
            shape2=2.0,
            common_shape=2.5,
            rho=0.9,
            rho_max=0.8,
            rho_max_closed_form=0.8,
            rho_max_numeric=0.85,
        )
    assert str(e.value) == ReasonCode.GHK_ERROR_RHO_BOUND.value


def test_quadrature_spec_from_dict():
    q = QuadratureSpec.from_dict({"method": "BesselZeroPartition", "abs_tol": 1e-10})
    assert q.max_subdivisions == 200
    with pytest.raises(ValueError) as e:
        QuadratureSpec.from_dict({"method": "Simpson"})
    assert str(e.value) == ReasonCode.GHK_ERROR_INVALID_REQUEST.value


def test_convergence_trace_monotonicity_slack():
    target = LimitKernelSpec(LimitFamily.GAUSSIAN, b=1.0)
    path = ((1.0, 1.5, 1.6, 10.0),) * 3
    assert ConvergenceTrace(target, path, (1e-2, 1.05e-2, 1e-3)).is_nonincreasing()
    assert not ConvergenceTrace(target, path, (1e-2, 2e-2, 1e-3)).is_nonincreasing()
    with pytest.raises(ValueError):
        ConvergenceTrace(target, path, (1e-2,))


def test_canonical_json_is_sorted_and_rejects_nan():
    assert canonical_json({"b": 1, "a": [1.5, 2]}) == '{"a":[1.5,2],"b":1}'
    with pytest.raises(ValueError):
        canonical_json({"x": math.nan})
