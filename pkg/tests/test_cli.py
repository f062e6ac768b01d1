import json
import math
import subprocess
import sys

import pytest

from sturmq.cli import RunConfig, dumps, exit_status, format_real, main
from sturmq.errors import ConfigError, DomainError, ResolutionError

MIXED_SINES = "0.01sin(pi x) + 5sin(3pi x) + 3sin(5pi x) + 4sin(12pi x) + 5sin(20pi x)"


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eigen_single_pair(capsys):
    code, out, _ = _run(capsys, "eigen", "--preset", "airy", "--n", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["n"] == 3 and doc["lambda"] == pytest.approx(90.3266, abs=5e-4)
    assert len(doc["roots"]) == 2 and len(doc["extrema"]) == 3
    assert doc["problem"]["b"] == 1.0


def test_eigen_spectrum_csv(capsys):
    code, out, _ = _run(capsys, "eigen", "--preset", "dirichlet_laplacian", "--N", "4",
                        "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "n,lambda,sup_norm,min_extremum"
    assert [round(float(l.split(",")[1]), 8) for l in lines[1:]] == [1.0, 4.0, 9.0, 16.0]


def test_eigen_is_byte_identical(capsys):
    argv = ("eigen", "--preset", "airy", "--N", "5")
    assert _run(capsys, *argv)[1] == _run(capsys, *argv)[1]


def test_lemma(capsys, tmp_path):
    code, out, _ = _run(capsys, "lemma", "--a", "1,1", "--b", "1,4", "--eps", "0.5")
    doc = json.loads(out)
    assert code == 0 and (doc["ell"], doc["k"]) == (1, 1)
    assert doc["dominance_ratio"] == pytest.approx(1.25)
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"a": [1, 1], "b": [1, 4], "eps": 0.25}))
    doc = json.loads(_run(capsys, "lemma", "--input", str(path))[1])
    assert doc["bound"] == pytest.approx(8.1699, abs=1e-4)


def test_verify_function(capsys):
    code, out, _ = _run(capsys, "verify", "--preset", "dirichlet_laplacian", "--f", "sin(3x)")
    doc = json.loads(out)
    assert code == 0 and doc["d"] == 3 and doc["passed"] is True
    assert set(doc) >= {"kappa", "bound", "log_bound", "margin", "log_margin", "N_used"}


def test_verify_dipole_and_sweep(capsys):
    code, out, _ = _run(capsys, "verify", "--preset", "dirichlet_laplacian", "--dipole", "1.0,0.2")
    assert code == 0 and json.loads(out)["d"] == 2
    code, out, _ = _run(capsys, "verify", "--preset", "dirichlet_laplacian", "--sweep",
                        "--levels", "2", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "width,kappa,projection_ratio,margin" and len(lines) == 3


def test_flow_csv(capsys):
    problem = json.dumps({"preset": "dirichlet_laplacian", "b": 1.0})
    code, out, _ = _run(capsys, "flow", "--problem", problem, "--f", MIXED_SINES, "--N", "24",
                        "--ell-max", "6")
    rows = [l.split(",") for l in out.splitlines()]
    assert code == 0 and rows[0][0] == "ell"
    assert [int(r[1]) for r in rows[1:]] == [11, 2, 2, 0, 0, 0, 0]


def test_probe_and_oscillation(capsys):
    argv = ("probe", "--preset", "airy", "--d", "2", "--N", "5", "--iterations", "40",
            "--seed", "3", "--grid-m", "256")
    code, out, _ = _run(capsys, *argv)
    doc = json.loads(out)
    assert code == 0 and doc["d"] == 2 and doc["c"] == 1.0
    assert out == _run(capsys, *argv)[1]
    code, out, _ = _run(capsys, "oscillation", "--preset", "airy", "--m", "2", "--n", "5",
                        "--trials", "50")
    assert code == 0 and json.loads(out)["passed"] is True


def test_output_file(capsys, tmp_path):
    path = tmp_path / "out.json"
    code, out, _ = _run(capsys, "eigen", "--preset", "airy", "--n", "1", "-o", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["n"] == 1


@pytest.mark.parametrize("argv, code, err", [
    (("eigen",), 2, "config"),
    (("eigen", "--preset", "airy", "--grid-m", "63"), 2, "config"),
    (("eigen", "--preset", "nope"), 2, "config"),
    (("frobnicate",), 2, "config"),
    (("verify", "--preset", "airy"), 2, "config"),
    (("lemma", "--a", "1,x", "--b", "1", "--eps", "0.1"), 2, "config"),
    (("eigen", "--problem", "{not json"), 2, "config"),
    (("verify", "--preset", "airy", "--f", "x*sin(x)"), 3, None),
    (("lemma", "--a", "0,0", "--b", "1,2", "--eps", "0.1"), 3, None),
    (("verify", "--preset", "dirichlet_laplacian", "--dipole", "3.0,0.2"), 3, None),
    (("eigen", "--problem", '{"a": 0, "b": 1, "p": [-1], "q": [0], "w": [1]}'), 3, None),
    (("lemma", "--input", "/nonexistent/file.json"), 3, "io"),
])
def test_error_exit_codes(capsys, argv, code, err):
    got, out, stderr = _run(capsys, *argv)
    assert got == code and out == ""
    doc = json.loads(stderr.strip().splitlines()[-1])
    assert set(doc) == {"error", "detail"}
    if err:
        assert doc["error"] == err


def test_numerical_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("STURMQ_MAX_N", "4")
    code, _, err = _run(capsys, "verify", "--preset", "dirichlet_laplacian",
                        "--f", "x*(pi - x) - 1")
    assert code == 4 and json.loads(err)["error"] == "resolution"


def test_exit_status_mapping():
    assert exit_status(ConfigError("x")) == 2
    assert exit_status(DomainError("x")) == 3
    assert exit_status(ResolutionError("x")) == 4
    assert exit_status(RuntimeError("x")) == 1


def test_config_validation():
    for kw in (dict(grid_m=100 + 1), dict(N=0), dict(tau=0.5), dict(c=-1.0), dict(format="xml")):
        with pytest.raises(ConfigError):
            RunConfig("eigen", **kw)


def test_serializer():
    assert format_real(0.1) == "0.10000000000000001"
    assert format_real(math.inf) == '"inf"' and format_real(-math.inf) == '"-inf"'
    text = dumps({"v": [1, 2.5], "ok": True, "none": None, "s": "a\"b", "x": math.nan})
    doc = json.loads(text)
    assert doc == {"v": [1, 2.5], "ok": True, "none": None, "s": 'a"b', "x": "nan"}
    with pytest.raises(TypeError):
        dumps(object())


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sturmq.cli", "lemma", "--a", "1", "--b", "2",
                           "--eps", "0.1"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["ell"] == 0
    proc = subprocess.run([sys.executable, "-m", "sturmq.cli", "eigen"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 2
