import io
import json

import pytest

from ghkernel import cli
from ghkernel.contracts import ReasonCode


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_eval_writes_csv_rows():
    code, out, err = _run("eval", "--d", "3", "--a", "1", "--alpha", "2", "--beta", "2.5", "--gamma", "4", "--r", "0.5")
    assert code == cli.EXIT_OK
    assert out == "r,value\n0.5,0.3125\n"
    assert err == ""


def test_eval_grid_and_json_envelope():
    code, out, _ = _run(
        "eval", "--d", "1", "--alpha", "1", "--beta", "1.5", "--gamma", "2", "--r", "0:2:5", "--format", "json"
    )
    assert code == cli.EXIT_OK
    doc = json.loads(out)
    assert set(doc) == {"tool", "schema_version", "verb", "result", "ok", "context_hash"}
    assert doc["ok"] is True
    assert doc["verb"] == "eval"
    assert len(doc["result"]["rows"]) == 5
    assert doc["result"]["rows"][-1][1] == 0.0


def test_check_params_outside_the_space_is_a_validation_failure():
    code, out, err = _run("check-params", "--d", "3", "--alpha", "1", "--beta", "2", "--gamma", "3")
    assert code == cli.EXIT_VALIDATION
    assert out == ""
    envelope = json.loads(err)
    assert envelope["reason_code"] == ReasonCode.GHK_ERROR_PARAM_SPACE.value
    assert envelope["ok"] is False


def test_usage_errors_exit_64():
    code, _, err = _run("frobnicate")
    assert code == cli.EXIT_USAGE
    assert ReasonCode.GHK_ERROR_USAGE.value in err

    code, _, _ = _run("eval", "--d", "1", "--alpha", "1", "--beta", "1.5", "--gamma", "2", "--r", "0:1")
    assert code == cli.EXIT_USAGE

    code, _, _ = _run("make", "askey", "--d", "2")
    assert code == cli.EXIT_USAGE


def test_missing_points_file_exits_65(tmp_path):
    code, _, err = _run(
        "gram", "--d", "2", "--alpha", "1.5", "--beta", "2.5", "--gamma", "3", "--points", str(tmp_path / "nope.txt")
    )
    assert code == cli.EXIT_DATAERR
    assert json.loads(err)["reason_code"] == ReasonCode.GHK_ERROR_MALFORMED_INPUT.value


def test_gram_summary_from_a_points_file(tmp_path):
    pts = tmp_path / "pts.txt"
    pts.write_text("# x y\n0 0\n0.5 0\n3 3\n", encoding="utf-8")
    code, out, _ = _run("gram", "--d", "2", "--alpha", "1.5", "--beta", "2.5", "--gamma", "3", "--points", str(pts))
    assert code == cli.EXIT_OK
    header, row = out.splitlines()
    assert header == "n,min_eig,max_eig,psd,nnz_fraction"
    assert row.split(",")[0] == "3"
    assert row.split(",")[3] == "true"


def test_check_multivar_document(tmp_path):
    doc = {
        "p": 2,
        "d": 1,
        "a": [[1.0, 1.0], [1.0, 1.0]],
        "alpha": [[2.0, 2.0], [2.0, 2.0]],
        "beta": [[3.0, 3.0], [3.0, 3.0]],
        "gamma": [[4.0, 4.0], [4.0, 4.0]],
        "rho": [[1.0, 0.5], [0.5, 1.0]],
    }
    path = tmp_path / "model.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, out, _ = _run("check-multivar", "--doc", str(path), "--format", "json")
    assert code == cli.EXIT_OK
    assert json.loads(out)["result"]["satisfied"] is True

    doc["rho"] = [[1.0, 1.2], [1.2, 1.0]]
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, _, err = _run("check-multivar", "--doc", str(path))
    assert code == cli.EXIT_VALIDATION
    assert ReasonCode.GHK_NOT_CERTIFIED.value in err

    path.write_text("{not json", encoding="utf-8")
    code, _, _ = _run("check-multivar", "--doc", str(path))
    assert code == cli.EXIT_DATAERR


def test_montee_row():
    code, out, _ = _run("montee", "--d", "3", "--alpha", "2", "--beta", "2.5", "--gamma", "4", "--k", "2")
    assert code == cli.EXIT_OK
    header, row = out.splitlines()
    assert header == "a,alpha,beta,gamma,d,scale"
    fields = row.split(",")
    assert [float(x) for x in fields[1:4]] == [3.0, 3.5, 5.0]
    assert fields[4] == "1"


def test_montee_order_at_the_dimension_fails_closed():
    code, _, err = _run("montee", "--d", "2", "--alpha", "1.5", "--beta", "2.5", "--gamma", "3", "--k", "2")
    assert code == cli.EXIT_VALIDATION
    assert json.loads(err)["reason_code"] == ReasonCode.GHK_ERROR_PRECONDITION.value


def test_error_envelope_hash_is_stable():
    a = cli.Runner.error_envelope("eval", "X", "one detail")
    b = cli.Runner.error_envelope("eval", "X", "another detail")
    assert a["context_hash"] == b["context_hash"]
    assert len(a["context_hash"]) == 64


def test_make_askey_emits_json_by_default():
    code, out, _ = _run("make", "askey", "--d", "2", "--ell", "2", "--a", "1", "--emit-params")
    assert code == cli.EXIT_OK
    doc = json.loads(out)
    assert doc["result"] == {"alpha": 1.5, "beta": 2.5, "gamma": 3.0}
    assert doc["ok"] is True

    code, out, _ = _run("make", "askey", "--d", "2", "--ell", "2", "--emit-params", "--format", "csv")
    assert out == "alpha,beta,gamma\n1.5,2.5,3\n"


@pytest.mark.parametrize(
    "argv",
    [
        ("eval", "--d", "3", "--a", "1", "--alpha", "2", "--beta", "2.5", "--gamma", "4", "--r", "0.5"),
        ("check-params", "--d", "3", "--alpha", "2", "--beta", "2.1", "--gamma", "2.1"),
        ("make", "askey", "--d", "2", "--ell", "2", "--a", "1", "--emit-params"),
    ],
)
def test_documented_examples_are_byte_identical_across_runs(argv):
    assert _run(*argv) == _run(*argv)


def test_check_params_example_names_the_failing_conditions():
    code, out, err = _run("check-params", "--d", "3", "--alpha", "2", "--beta", "2.1", "--gamma", "2.1")
    assert code == cli.EXIT_VALIDATION
    assert out == ""
    envelope = json.loads(err)
    assert envelope["reason_code"] == ReasonCode.GHK_ERROR_PARAM_SPACE.value
    assert envelope["context"]["failing_conditions"] == ["cond_product", "cond_sum"]


def test_selftest_verb_exits_zero():
    code, out, _ = _run("selftest")
    assert code == cli.EXIT_OK
    rows = out.splitlines()
    assert rows[0] == "check,passed,detail"
    assert len(rows) == 6
    assert all(",true," in row for row in rows[1:])
