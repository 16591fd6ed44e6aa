import csv
import io
import json
import math
import subprocess
import sys

import pytest

from qidual import cli, report


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_metric_quotient_example(capsys):
    code, out, _ = run(capsys, "--command", "metric", "--params", '{"x": [0.9], "y": [0], "p": 1}')
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["quotient_dist"] == pytest.approx(0.1)
    assert rep["results"]["dist_p"] == pytest.approx(2 * math.sin(0.1 * math.pi))
    assert rep["verification"]["passed"]
    assert rep["config"]["seed"] == 0


def test_metric_identical_sequences(capsys):
    code, out, _ = run(capsys, "--command", "metric", "--params", '{"x": [0.1, 0.2], "y": [0.1, 0.2], "p": 2}')
    res = json.loads(out)["results"]
    assert code == 0 and res["dist_p"] == 0 and res["rho_p"] == 0


@pytest.mark.parametrize(
    "shift, verdict",
    [({"constant": 0.0}, "EquivalentLike"), ({"constant": 0.4}, "SingularLike"), ({"reciprocal": 3}, "EquivalentLike")],
)
def test_kakutani_examples(shift, verdict):
    rep = report.run("kakutani", {"family": "exp", "c": 1, "shift": shift, "n_max": 10_000})
    assert rep.results["verdict"] == verdict
    assert rep.passed


def test_kakutani_csv_trace(capsys):
    code, out, _ = run(
        capsys, "--command", "kakutani", "--format", "csv",
        "--params", '{"family": "exp", "c": 1, "shift": {"constant": 0.0}, "n_max": 5}',
    )
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["N", "product"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "3", "4", "5"]
    assert {float(r[1]) for r in rows[1:]} == {1.0}


def test_polar_hull_adic_examples():
    rep = report.run("polar", {"chi": {"1": 5, "2": 2}, "eps": 0.05, "p": 2})
    assert rep.results["verdict"] == rep.results["oracle_verdict"] == "NonMember"
    rep = report.run("hull", {"p": 2, "eps": 0.05, "radius": 10})
    assert rep.passed and rep.results["n_coords"] == 25339
    rep = report.run("hull", {"p": 1, "eps": 0.05, "radius": 10})
    assert rep.passed and rep.results["kind"] == "BoundedCertificate"
    rep = report.run("adic", {"op": "annihilator", "chi": {"1": 4, "2": -1}, "a": [4, 9]})
    assert rep.results["annihilator"] is True and rep.passed


@pytest.mark.parametrize(
    "params",
    [
        {"op": "digits", "x": "5/18"},
        {"op": "q_approx", "digits": [1, 1, 1, 1, 1, 1], "eps": "1/20"},
        {"op": "pair", "n": -5, "x": "1/4"},
        {"op": "norm", "x": "1/4", "p": 0},
        {"op": "quotient_reduce", "chi": {"1": 1, "2": 1, "3": 1}, "a": [4, 9, 16]},
    ],
)
def test_adic_ops_verify(params):
    assert report.run("adic", params).passed


def test_monothetic_example():
    rep = report.run("monothetic", {"n_max": 3, "omega": [0.3, 0.1], "eps": 0.2, "p": 2})
    assert rep.passed
    assert rep.results["power"]["distance"] < 0.2


def test_determinism_byte_identical(tmp_path):
    params = '{"x": [0.3, 0.7, 1.9], "y": [0.1], "p": 1.5, "samples": 30}'
    outs = []
    for i in range(2):
        target = tmp_path / f"r{i}.json"
        assert cli.main(["--command", "metric", "--params", params, "--seed", "42", "--out", str(target)]) == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["config"]["seed"] == 42
    other = tmp_path / "r_seed.json"
    cli.main(["--command", "metric", "--params", params, "--seed", "43", "--out", str(other)])
    assert other.read_bytes() != outs[0]


def test_figures_written_and_reproducible(tmp_path):
    params = '{"family": "exp", "c": 0.5, "shift": {"reciprocal": 3}, "n_max": 200}'
    blobs = []
    for i in range(2):
        d = tmp_path / f"f{i}"
        out = tmp_path / f"k{i}.json"
        assert cli.main(["--command", "kakutani", "--params", params, "--figures", str(d), "--out", str(out)]) == 0
        assert json.loads(out.read_text())["figures"] == ["kakutani.png"]
        blobs.append((d / "kakutani.png").read_bytes())
    assert blobs[0][:8] == b"\x89PNG\r\n\x1a\n"
    assert blobs[0] == blobs[1]


@pytest.mark.parametrize("command, params", [
    ("metric", {"x": [0.2, 0.4], "y": [0.0], "p": 2}),
    ("polar", {"chi": {"1": 3, "2": -1}, "eps": 0.1, "p": 2}),
    ("monothetic", {"n_max": 2}),
])
def test_other_figures(tmp_path, command, params):
    code = cli.main(["--command", command, "--params", json.dumps(params), "--figures", str(tmp_path), "--out", str(tmp_path / "r.json")])
    assert code == 0
    assert (tmp_path / f"{command}.png").stat().st_size > 1000


def test_params_from_file(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text('{"chi": {"1": 1}, "eps": 0.05, "p": 2}')
    code, out, _ = run(capsys, "--command", "polar", "--params", str(f))
    assert code == 0 and json.loads(out)["results"]["verdict"] == "Member"


@pytest.mark.parametrize(
    "argv",
    [
        ["--command", "polar", "--params", '{"chi": {"1": 1}, "eps": 0.3, "p": 2}'],
        ["--command", "polar", "--params", "not json"],
        ["--command", "metric", "--params", '{"x": "abc", "y": [0]}'],
        ["--command", "kakutani", "--params", '{"family": "cauchy"}'],
        ["--command", "adic", "--params", '{"op": "pair", "n": 1, "x": "1/11"}'],
        ["--command", "metric", "--params", '{"x": [0], "y": [0]}', "--seed", "-1"],
    ],
)
def test_parameter_errors_exit_3(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 3 and err


def test_budget_exhaustion_exit_4(capsys):
    code, _, err = run(capsys, "--command", "monothetic", "--params", '{"n_max": 3, "cap": 10}')
    assert code == 4 and "budget" in err


def test_failed_postcondition_exit_2(monkeypatch, capsys):
    def broken(command, params, seed):
        rep = report.Report(command, params, seed, {"value": 1})
        rep.check("always_fails", False)
        return rep

    monkeypatch.setattr(report, "run", broken)
    code, out, err = run(capsys, "--command", "metric", "--params", "{}")
    assert code == 2
    assert json.loads(out)["verification"]["passed"] is False
    assert "always_fails" in err


def test_timing_only_on_request(capsys):
    _, out, _ = run(capsys, "--command", "hull", "--params", '{"p": 1, "eps": 0.1}')
    assert "timing" not in json.loads(out)
    _, out, _ = run(capsys, "--command", "hull", "--params", '{"p": 1, "eps": 0.1}', "--timing")
    assert json.loads(out)["timing"]["seconds"] >= 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qidual", "--command", "adic", "--params", '{"op": "annihilator", "chi": {"1": 4, "2": -1}, "a": [4, 9]}', "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "results.annihilator,True" in proc.stdout
