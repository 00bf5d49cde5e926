import json
import subprocess
import sys

import pytest

from graphnls import __version__
from graphnls.cli import main


@pytest.fixture
def files(tmp_path):
    k2 = tmp_path / "k2.json"
    k2.write_text(json.dumps({"vertices": ["a", "b"], "edges": [["a", "b", 1.0]]}))
    p3 = tmp_path / "p3.json"
    p3.write_text(json.dumps({"vertices": ["a", "b", "c"], "edges": [["a", "b", 1.0], ["b", "c", 1.0]]}))
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"vertices": ["a", "b", "c", "d"], "edges": [["a", "b", 1], ["c", "d", 1]]}))
    u = tmp_path / "u.json"
    u.write_text(json.dumps({"a": 1.0, "b": -1.0}))
    return {"k2": str(k2), "p3": str(p3), "bad": str(bad), "u": str(u), "dir": tmp_path}


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


def test_spectrum(files, capsys):
    code, rep, _ = run(["spectrum", "--graph", files["k2"]], capsys)
    assert code == 0
    lams = [p["lambda"] for p in rep["result"]["eigenpairs"]]
    assert lams == pytest.approx([0.0, 2.0], abs=1e-10)
    assert rep["version"] == __version__
    assert len(rep["graph"]["sha256"]) == 64
    assert rep["config"]["graph"] == files["k2"] and rep["config"]["tol"] == 1e-10


def test_curvature(files, capsys):
    code, rep, _ = run(["curvature", "--graph", files["k2"], "--m", "2", "--xi", "1"], capsys)
    assert code == 0 and rep["result"]["certificate"]["holds"] is True
    code, rep, _ = run(["curvature", "--graph", files["k2"], "--m", "2", "--xi", "1.5"], capsys)
    assert rep["result"]["certificate"]["witness"]["vertex"] in ("a", "b")
    code, rep, _ = run(["curvature", "--graph", files["k2"], "--m", "2", "--best-xi"], capsys)
    assert rep["result"]["best_xi"] == pytest.approx(1.0, abs=1e-8)


def test_solve_dirichlet(files, capsys):
    argv = ["solve", "--graph", files["p3"], "--mode", "dirichlet", "--interior", "b",
            "--alpha", "0", "--family", "power", "--q", "4"]
    code, rep, _ = run(argv, capsys)
    assert code == 0
    assert rep["result"]["solution"]["u"]["b"] == pytest.approx(1.0, abs=1e-10)
    assert rep["result"]["boundary"] == ["a", "c"]
    assert rep["result"]["dirichlet_lambda1"] == pytest.approx(1.0)


def test_solve_with_hypotheses_and_start(files, capsys, tmp_path):
    u0 = tmp_path / "u0.json"
    u0.write_text(json.dumps({"a": 1.0, "b": 1.0}))
    argv = ["solve", "--graph", files["k2"], "--alpha", "-1", "--q", "4", "--p", "3",
            "--function", str(u0), "--convention", "dirichlet-energy"]
    code, rep, _ = run(argv, capsys)
    assert code == 0
    assert rep["result"]["hypotheses"]["entries"]["H4"]["status"] == "holds"
    assert rep["result"]["solution"]["accepted"]


def test_check_subcommands(files, capsys):
    code, rep, _ = run(["check", "--graph", files["k2"], "--ineq", "lambda-bound", "--m", "2", "--xi", "1"], capsys)
    assert code == 0 and rep["result"]["all_hold"] and rep["result"]["reports"][0]["slack"] == 0.0
    code, rep, _ = run(["check", "--graph", files["k2"], "--ineq", "theorem2", "--m", "2"], capsys)
    assert rep["result"]["xi_source"] == "best_xi" and rep["result"]["all_hold"]
    code, rep, _ = run(["check", "--graph", files["k2"], "--ineq", "norm-equiv", "--alpha", "2",
                        "--function", files["u"]], capsys)
    assert rep["result"]["c1"] == 0.5 and rep["result"]["function"]["ratio"] == pytest.approx(0.5)


def test_tm(files, capsys):
    code, rep, _ = run(["tm", "--graph", files["k2"], "--beta", "2", "--p", "3", "--starts", "4"], capsys)
    assert code == 0
    assert rep["result"]["empirical_sup"] == pytest.approx(3.2974425414, abs=1e-6)


def test_corpus_empty_filter(capsys):
    code, rep, _ = run(["corpus", "--families", ""], capsys)
    assert code == 0
    assert rep["result"]["count"] == 0 and rep["result"]["rows"] == []


def test_corpus_small(capsys):
    code, rep, _ = run(["corpus", "--families", "path,random", "--random-count", "3", "--jobs", "2"], capsys)
    assert code == 0 and rep["result"]["all_passed"]
    assert [r["name"] for r in rep["result"]["rows"]][:2] == ["path-2", "path-3"]


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["spectrum", "--graph", "missing.json"], "missing.json"),
        (["spectrum", "--graph", "K2", "--bogus"], "--bogus"),
        (["curvature", "--graph", "K2", "--m", "2"], "--xi"),
        (["curvature", "--graph", "K2", "--m", "1", "--xi", "0"], "m must be > 1"),
        (["check", "--graph", "K2", "--ineq", "norm-equiv", "--alpha", "4"], "indefinite"),
        (["solve", "--graph", "K2", "--alpha", "0", "--q", "1.5"], "q must be > 2"),
        (["solve", "--graph", "K2", "--alpha", "0", "--q", "4", "--mode", "dirichlet", "--interior", "z"], "'z'"),
        (["corpus", "--families", "trees"], "trees"),
        (["spectrum", "--graph", "K2", "--tol", "-1"], "-1"),
    ],
)
def test_validation_errors_exit_1(files, capsys, argv, needle):
    argv = [files["k2"] if a == "K2" else a for a in argv]
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse rejects the flag itself
        code = exc.code
    err = capsys.readouterr().err
    assert code == 1
    assert needle in err


def test_malformed_graph(files, capsys):
    code, _, err = run(["spectrum", "--graph", files["bad"]], capsys)
    assert code == 1 and "disconnected" in err and "'c'" in err


def test_numerical_failure_exit_2(files, capsys, tmp_path):
    zero = tmp_path / "a0.json"
    zero.write_text(json.dumps({"a": 0.0, "b": 0.0}))
    code, rep, err = run(["solve", "--graph", files["k2"], "--alpha", "-1", "--q", "4", "--coef", str(zero)], capsys)
    assert code == 2
    assert rep["error"]["type"] == "NoDescentEndpointError"


def test_output_file_and_determinism(files, capsys):
    out1 = files["dir"] / "r1.json"
    out2 = files["dir"] / "r2.json"
    for out in (out1, out2):
        assert main(["solve", "--graph", files["k2"], "--alpha", "-1", "--q", "4", "--output", str(out)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert capsys.readouterr().out == ""


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "graphnls", "spectrum", "--graph", files["k2"]],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["command"] == "spectrum"

