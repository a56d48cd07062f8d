import json
import math
import subprocess
import sys

import pytest

from affine_spectra import antiderivative_system, parse_preset, system_to_dict
from affine_spectra.cli import main

SKEW = "skew-takagi:0.3,0.5,0.25"


@pytest.fixture
def run(capsys):
    def go(*argv, expect=0):
        code = main(list(argv))
        out = capsys.readouterr()
        assert code == expect, out.err
        return out.out, out.err

    return go


def test_validate(run):
    out, _ = run("validate", "--preset", "riesz-nagy:0.3")
    doc = json.loads(out)
    assert doc["valid"] and doc["regime"] == "CaseA"
    assert doc["lambda_set"] == []
    assert doc["r"] == 2
    out, _ = run("validate", "--preset", SKEW)
    doc = json.loads(out)
    assert doc["regime"] == "CaseB" and doc["lambda_set"] == [1]


def test_validate_flags_borderline(run, tmp_path):
    anti = antiderivative_system(parse_preset("riesz-nagy:0.3"))
    path = tmp_path / "anti.json"
    path.write_text(json.dumps(system_to_dict(anti)))
    out, _ = run("validate", "--system", str(path))
    doc = json.loads(out)
    assert doc["lambda_set"] == []
    assert doc["lambda_borderline"] == [1]


def test_eval(run):
    out, _ = run("eval", "--preset", "riesz-nagy:0.3", "--x", "0.5",
                 "--tol", "1e-13")
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(0.3, abs=1e-13)
    assert doc["error_bound"] <= 1e-13
    assert doc["depth"] == 0  # vertex is exact


def test_sample_csv(run):
    out, _ = run("sample", "--preset", "takagi:1", "--points", "5")
    lines = out.splitlines()
    assert lines[0] == "x,value,error_bound"
    assert len(lines) == 6
    first = lines[1].split(",")
    assert float(first[0]) == 0.0 and float(first[1]) == 0.0


def test_coding_of_point(run):
    out, _ = run("coding", "--preset", "riesz-nagy:0.3", "--x", "0.3",
                 "--depth", "8")
    doc = json.loads(out)
    assert doc["coding"] == "1,2,1,1,2,2,1,1"
    assert doc["cut_point"] is False
    assert doc["interval"]["length"] == pytest.approx(0.5 ** 8)


def test_coding_exact_projection(run):
    out, _ = run("coding", "--preset", "riesz-nagy:0.3", "--coding", "1,2",
                 "--exact")
    assert json.loads(out)["x"] == "1/4"
    out, _ = run("coding", "--preset", "riesz-nagy:0.3", "--coding", "(1,2)",
                 "--exact")
    assert json.loads(out)["x"] == "1/3"


def test_coding_membership(run):
    out, _ = run("coding", "--preset", "riesz-nagy:0.3", "--coding", "2,(1)",
                 "--in-t")
    doc = json.loads(out)["in_t"]
    assert doc["member"] and doc["n0"] == 1
    assert doc["left"] == "1,(2)" and doc["right"] == "2,(1)"


def test_exponent_interior(run):
    out, _ = run("exponent", "--preset", "riesz-nagy:0.3", "--coding",
                 "(1,2)")
    doc = json.loads(out)
    assert doc["alpha"] == pytest.approx(1.125769383497982, abs=1e-9)
    assert doc["right"]["method"] == "exact-periodic"
    assert doc["right"]["gamma"] == doc["alpha"]
    assert doc["left"]["derivative"] == 0.0
    assert "cut" not in doc


def test_exponent_cut(run):
    out, _ = run("exponent", "--preset", SKEW, "--x", "0.3")
    doc = json.loads(out)
    assert doc["cut_point"] is True
    cut = doc["cut"]
    assert doc["alpha"] == 1.0
    assert cut["differentiable"] is False
    assert cut["derivative_right"] == pytest.approx(20.0 / 7.0, abs=1e-9)
    assert cut["derivative_left"] == pytest.approx(20.0 / 27.0, abs=1e-9)


def test_exponent_infinite_serialization(run):
    out, _ = run("exponent", "--preset", "okamoto:0.5", "--coding",
                 "2,(1,2)")
    doc = json.loads(out)
    assert doc["alpha"] == "inf"
    assert doc["right"]["infinite"] is True
    # half-flat cut: the rough left side sets the exponent
    out, _ = run("exponent", "--preset", "okamoto:0.5", "--coding", "1,2,(1)")
    doc = json.loads(out)
    assert doc["cut"]["alpha_right"] == "inf"
    assert doc["alpha"] == pytest.approx(math.log(2) / math.log(3), abs=1e-9)


def test_spectrum_round_trip(run, tmp_path):
    const_path = tmp_path / "c.json"
    run("constants", "--preset", SKEW, "--output", str(const_path))
    direct, _ = run("spectrum", "--preset", SKEW, "--points", "31")
    via_file, _ = run("spectrum", "--constants", str(const_path), "--points",
                      "31")
    assert direct == via_file
    lines = direct.splitlines()
    assert lines[0] == "alpha,dim,branch"
    assert lines[1].startswith("1,0,linear")


def test_spectrum_json_and_inf(run):
    out, _ = run("spectrum", "--preset", "okamoto:0.5", "--points", "11",
                 "--json")
    doc = json.loads(out)
    rows = doc["rows"]
    assert doc["regime"] == "CaseA"
    assert rows[-1]["alpha"] == "inf" and rows[-1]["dim"] == 1.0
    out, _ = run("spectrum", "--preset", "okamoto:0.5", "--points", "11")
    assert "inf,1,infinite" in out


def test_spectrum_threads_match(run, monkeypatch):
    plain, _ = run("spectrum", "--preset", SKEW, "--points", "51")
    monkeypatch.setenv("AFFINE_SPECTRA_THREADS", "3")
    threaded, _ = run("spectrum", "--preset", SKEW, "--points", "51")
    assert plain == threaded


def test_output_file_matches_stdout(run, tmp_path):
    path = tmp_path / "out.json"
    stdout, _ = run("constants", "--preset", "takagi:1")
    run("constants", "--preset", "takagi:1", "--output", str(path))
    assert path.read_text() == stdout


def test_verify_ae(run):
    out, _ = run("verify", "--preset", "takagi:0.5", "--mode", "ae",
                 "--points", "200", "--horizon", "2000", "--tol", "0.05")
    doc = json.loads(out)
    assert doc["pass"] is True
    assert doc["expected"] == pytest.approx(0.5, abs=1e-12)
    assert abs(doc["median"] - 0.5) < 0.05


def test_verify_exponent(run):
    out, _ = run("verify", "--preset", "riesz-nagy:0.3", "--mode",
                 "exponent", "--coding", "(1,2)")
    doc = json.loads(out)
    assert doc["pass"] is True
    assert doc["error"] < 0.05 and doc["r2"] > 0.98
    assert doc["subtracted"] is True


def test_verify_derivative(run):
    out, _ = run("verify", "--preset", "riesz-nagy:0.3", "--mode",
                 "derivative", "--coding", "2,(1)")
    doc = json.loads(out)
    assert doc["pass"] is True
    assert doc["derivative"] == 0.0
    assert doc["final_discrepancy"] < 0.01


def test_verify_failure_is_exit_zero(run):
    # a failed verification is a result, not a crash
    out, _ = run("verify", "--preset", "riesz-nagy:0.3", "--mode", "ae",
                 "--points", "50", "--horizon", "200", "--tol", "1e-9")
    assert json.loads(out)["pass"] is False


def test_gen_coding_deterministic(run):
    args = ("gen-coding", "--preset", SKEW, "--alpha", "1.2", "--length",
            "2000", "--seed", "9", "--block-ends", "100,2000")
    first, _ = run(*args)
    second, _ = run(*args)
    assert first == second
    doc = json.loads(first)
    assert doc["lam"] == pytest.approx(0.710216003160676, abs=1e-9)
    assert len(doc["digits"]) == 2000


def test_error_exit_code(run, capsys):
    _, err = run("eval", "--preset", "riesz-nagy:0.3", "--x", "1.5",
                 expect=1)
    doc = json.loads(err)
    assert doc["error"] == "OutOfDomain"
    _, err = run("validate", "--preset", "nosuch:1", expect=1)
    assert "error" in json.loads(err)
    _, err = run("exponent", "--preset", "riesz-nagy:0.3", "--coding",
                 "what", expect=1)
    assert json.loads(err)["error"] == "InvalidCoding"


def test_usage_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--preset", "takagi:1"])  # missing --x
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_console_script_runs():
    res = subprocess.run(
        [sys.executable, "-m", "affine_spectra.cli", "eval", "--preset",
         "takagi:1", "--x", "0.25"],
        capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["value"] == pytest.approx(0.5)
