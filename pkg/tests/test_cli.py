import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from bergshift import io as bio
from bergshift.cli import cli, read_norms
from bergshift.errors import ParameterError


def run(*args, env=None):
    return CliRunner().invoke(cli, list(args), env=env, catch_exceptions=False)


# -- io -----------------------------------------------------------------------------

def test_json_floats_use_seventeen_digits():
    text = bio.dumps_json({"x": 0.1, "y": [1.0, math.inf], "n": 3, "s": "a"})
    assert '"x": 0.10000000000000001' in text
    assert "null" in text and '"n": 3' in text
    assert json.loads(text)["x"] == 0.1


def test_csv_round_trip_with_metadata():
    text = bio.write_csv(["a", "b"], [(1, 1 / 3), (2, math.pi)], {"k": "v", "f": 0.25})
    assert "0.333333333333" in text and "0.3333333333333" not in text
    meta, header, rows = bio.read_csv(text)
    assert meta == {"k": "v", "f": "0.25"}
    assert header == ["a", "b"] and rows[1] == ["2", "3.14159265359"]


def test_csv_reader_rejects_ragged_rows():
    with pytest.raises(ParameterError):
        bio.read_csv("a,b\n1\n")


def test_schema_violations_are_parameter_errors():
    with pytest.raises(ParameterError):
        bio.validate_witness({"m": 0, "dist1": 1.0, "dist2": 0.0, "truncation": 1})
    with pytest.raises(ParameterError):
        bio.validate_report({"space": "x"})


def test_trace_reader_checks_columns():
    meta, k, norms = bio.read_trace_csv("# truncation=5\nk,norm\n0,1\n1,0.5\n")
    assert meta["truncation"] == "5"
    np.testing.assert_array_equal(k, [0, 1])
    with pytest.raises(ParameterError):
        bio.read_trace_csv("k,norm\n0,-1\n")


# -- norms ------------------------------------------------------------------------------

def test_norms_example():
    res = run("norms", "--space", "standard:alpha=0", "--p", "2", "--n-max", "5")
    assert res.exit_code == 0
    doc = read_norms(res.output)
    for row in doc["rows"]:
        assert row["norm"] == pytest.approx(1 / math.sqrt(row["n"] + 1), rel=1e-11)


def test_norms_hardy_and_re():
    doc = read_norms(run("norms", "--space", "hardy", "--n-max", "4", "--format", "json").output)
    assert [r["norm"] for r in doc["rows"]] == [1.0] * 5
    doc = read_norms(run("norms", "--space", "re", "--n-max", "0").output)
    assert doc["rows"][0]["norm"] == pytest.approx(0.758674, abs=5e-7)


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_norms_round_trip_and_determinism(tmp_path, fmt):
    args = ["norms", "--space", "log:a=2,b=1", "--p", "3", "--n-max", "20", "--format", fmt]
    first = run(*args).output
    assert run(*args).output == first
    out = tmp_path / f"t.{fmt}"
    assert run(*args, "--out", str(out)).exit_code == 0
    assert out.read_text() == first
    doc = read_norms(first)
    assert doc["space"] == "log:a=2,b=1" and doc["p"] == 3.0 and len(doc["rows"]) == 21


# -- classify -------------------------------------------------------------------------------

def classify_doc(*args):
    res = run("classify", *args)
    assert res.exit_code == 0, res.output
    return bio.validate_report(json.loads(res.output))


def test_classify_examples():
    doc = classify_doc("--space", "standard:alpha=0", "--weights", "const:2", "--p", "2")
    assert doc["verdicts"]["mixing"] == "yes-symbolic"
    doc = classify_doc("--space", "standard:alpha=1", "--weights", "const:1", "--p", "2")
    assert doc["verdicts"]["chaotic"] == "yes-symbolic"
    doc = classify_doc("--space", "hardy", "--weights", "const:1")
    assert doc["verdicts"]["hypercyclic"] in ("no-symbolic", "evidence-no")


def test_classify_report_layout():
    doc = classify_doc("--space", "log:a=2,b=1", "--weights", "powdecay:beta=0.2", "--p", "3", "--horizon", "500")
    assert doc["horizon"] == 500 and doc["weights"] == "powdecay:beta=0.2"
    for c in doc["criteria"]:
        assert set(c) == {"name", "paper_anchor", "values_head", "values_tail", "symbolic", "verdict"}


def test_classify_with_custom_sequence(tmp_path):
    f = tmp_path / "w.csv"
    f.write_text("\n".join("2,0" for _ in range(50)))
    doc = classify_doc("--space", "standard:alpha=0", "--weights", f"custom:@{f}")
    assert doc["horizon"] == 50


# -- asymptotics --------------------------------------------------------------------------

def read_sequence(text):
    meta, header, rows = bio.read_csv(text)
    assert header == ["n", "value"]
    return meta, np.array([[float(x) for x in r] for r in rows])


def test_asymptotics_examples():
    meta, tab = read_sequence(run("asymptotics", "--check", "standard", "--alpha", "0", "--n-max", "50").output)
    assert meta["verdict"] == "convergent"
    np.testing.assert_allclose(tab[:, 1], 0.5, rtol=1e-11)
    meta, tab = read_sequence(run("asymptotics", "--check", "gamma-ratio", "--t", "2", "--x", "1",
                                  "--n-max", "1000").output)
    np.testing.assert_allclose(tab[:, 1], (tab[:, 0] + 1) / tab[:, 0], rtol=1e-11)
    assert meta["verdict"] == "convergent"
    meta, _ = read_sequence(run("asymptotics", "--check", "logbergman", "--alpha", "1", "--n-max", "2000").output)
    assert meta["verdict"] == "banded"
    assert float(meta["band_max"]) / float(meta["band_min"]) <= 10


# -- simulate -------------------------------------------------------------------------------

def test_simulate_gs_example(tmp_path):
    ptarget = tmp_path / "p.json"
    ptarget.write_text("[[1, 0], [1, 0]]")
    qtarget = tmp_path / "q.csv"
    qtarget.write_text("n,re,im\n2,1,0\n")
    res = run("simulate", "gs", "--space", "standard:alpha=0", "--weights", "const:1",
              "--ptarget", str(ptarget), "--qtarget", str(qtarget), "--m", "10")
    doc = bio.validate_witness(json.loads(res.output))
    assert doc["dist2"] == 0.0
    assert doc["dist1"] == pytest.approx(0.277350, abs=5e-7)
    res = run("simulate", "gs", "--space", "standard:alpha=0", "--weights", "powdecay:beta=1",
              "--ptarget", str(ptarget), "--qtarget", str(qtarget), "--m", "10", "--m", "50")
    assert json.loads(res.output)["dist1_decreasing"] is False


def test_simulate_orbit_terminates():
    res = run("simulate", "orbit", "--space", "standard:alpha=0", "--weights", "const:1",
              "--f", "[[0,0],[0,0],[0,0],[0,0],[0,0],[1,0]]", "--K", "7")
    meta, k, norms = bio.read_trace_csv(res.output)
    assert meta["truncation"] == "5" and meta["overflow"] == "false"
    assert norms[6] == 0.0 and norms[7] == 0.0
    assert norms[0] == pytest.approx(1 / math.sqrt(6), rel=1e-11)


def test_simulate_periodic_divergence_flag():
    res = run("simulate", "periodic", "--space", "standard:alpha=0", "--q", "2", "--n", "200")
    meta, header, rows = bio.read_csv(res.output)
    assert meta["converges"] == "false"
    assert float(meta["residual"]) == pytest.approx(float(meta["monomial_norm"]), rel=1e-11)
    assert float(meta["lambda_re"]) == -1.0 and float(meta["lambda_im"]) == 0.0
    part = np.array([float(r[1]) for r in rows])
    assert np.all(np.diff(part) > 0)


# -- kernel -------------------------------------------------------------------------------------

@pytest.mark.parametrize("p,alpha,regime", [(2, 0, "log"), (2, 1, "bounded"), (4, 0, "power")])
def test_kernel_regimes_cli(p, alpha, regime):
    res = run("kernel", "--p", str(p), "--alpha", str(alpha))
    meta, header, rows = bio.read_csv(res.output)
    assert meta["regime"] == regime
    if regime == "power":
        assert float(meta["exponent"]) == pytest.approx(2.0, abs=0.05)


# -- exit codes and environment ----------------------------------------------------------------

@pytest.mark.parametrize("args,code", [
    (["norms", "--space", "nonsense"], 2),
    (["norms", "--space", "standard:alpha=0", "--p", "0.5"], 2),
    (["classify", "--space", "standard:alpha=0", "--weights", "custom:@/nonexistent.csv"], 2),
    (["kernel", "--p", "12", "--alpha", "0", "--lambdas", "0.9,0.9999"], 3),
    (["simulate", "periodic", "--space", "standard:alpha=0", "--q", "2", "--weights", "const:2"], 4),
    (["asymptotics", "--check", "bogus"], 2),
    (["norms"], 2),
])
def test_exit_codes(args, code):
    res = CliRunner().invoke(cli, args)
    assert res.exit_code == code, res.output


def test_bsl_tol_environment_is_honoured():
    a = run("norms", "--space", "log:a=2,b=1", "--n-max", "3", "--format", "json").output
    b = run("norms", "--space", "log:a=2,b=1", "--n-max", "3", "--format", "json", env={"BSL_TOL": "1e-4"}).output
    ra, rb = read_norms(a)["rows"], read_norms(b)["rows"]
    for x, y in zip(ra, rb):
        assert y["I"] == pytest.approx(x["I"], rel=1e-4)
    bad = CliRunner().invoke(cli, ["norms", "--space", "log:a=2,b=1"], env={"BSL_TOL": "abc"})
    assert bad.exit_code == 2


def test_version_and_help():
    assert run("--version").exit_code == 0
    assert "simulate" in run("--help").output
