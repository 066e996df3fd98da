import json
import subprocess
import sys

import pytest

from abelcycles import Kind, ParseError, ValidationError
from abelcycles.cli import execute, main, parse_config
from abelcycles.report import CENSUS_HEADER, SWEEP_HEADER

STAR = """# rotated trig example
family = trig
lambda = 0, -6.283185307179586, 0
mu = 0, 0, -6.283185307179586
"""


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_parse_examples():
    cfg = parse_config(STAR, "classify")
    assert cfg.family is Kind.TRIG and cfg.lam[1] == pytest.approx(-6.283185307179586)
    cfg = parse_config("command = lyapunov\nfamily = ShiftedPower\nalpha = 1\nbeta = 2\n"
                       "lambda = 1,0,0\nmu = 0,0,1\nquad_tol = 1e-10\n")
    assert cfg.params == (1.0, 2.0) and cfg.numerics.quad_tol == 1e-10
    cfg = parse_config("family = trinomial\nm = 0, 1, 2\n", "sharpness")
    assert cfg.params == (0, 1, 2) and cfg.lam is None


@pytest.mark.parametrize("text,exc", [
    ("family = trig\nfamily = quadratic\n", ParseError),
    ("family = trig\ncolour = red\n", ParseError),
    ("family trig\n", ParseError),
    ("family = trig\nlambda = 1, x, 0\nmu = 0,0,0\n", ParseError),
    ("family = hexagon\nlambda=0,0,0\nmu=0,0,0\n", ValidationError),
    ("family = trig\nlambda = 1, 2\nmu = 0,0,0\n", ValidationError),
    ("family = trig\nmu = 0,0,0\n", ValidationError),
    ("family = shifted\nalpha = 2\nbeta = 1\nlambda=0,0,0\nmu=0,0,0\n", ValidationError),
    ("family = trig\nlambda=0,0,0\nmu=0,0,0\ngrid_points = 2.5\n", ValidationError),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_config(text, "classify")


def test_parse_error_messages():
    with pytest.raises(ParseError, match="line 3"):
        parse_config("family = trig\n\nfoo = 1\n", "classify")
    with pytest.raises(ValidationError, match="sweep_range"):
        parse_config(STAR, "sweep")


def test_exit_codes(tmp_path, capsys):
    cfg = write(tmp_path, STAR)
    assert main(["classify", "--config", cfg]) == 0
    assert "verdict: D2Only" in capsys.readouterr().out
    assert main(["classify", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert main(["frobnicate", "--config", cfg]) == 2
    assert main(["sweep", "--config", cfg]) == 2
    bad = write(tmp_path, "family = hexagon\nlambda=0,0,0\nmu=0,0,0\n", "bad.cfg")
    assert main(["classify", "--config", bad]) == 2
    capsys.readouterr()


def test_bound_violation_exit(monkeypatch, tmp_path, capsys):
    import abelcycles.cli as cli

    def fake(cfg):
        return {"consistent": False}, False, None

    monkeypatch.setattr(cli, "_dispatch", fake)
    assert main(["cycles", "--config", write(tmp_path, STAR)]) == 3
    err = capsys.readouterr().err
    bundle = json.loads(err.split("\n", 1)[1])
    assert bundle["reproduce"]["config"] == STAR


def test_analysis_error_exit(tmp_path, capsys):
    text = "family = quadratic\nlambda=1,0,0\nmu=0,0,0\nwindow = 0.9, 2\n"
    cfg = parse_config(text, "cycles")
    code, out, _ = execute(cfg)
    assert code == 0 and "gaps" in out
    code, out, _ = execute(parse_config("family = trinomial\nm = 1, 2, 3\nlambda=1,0,0\n"
                                        "mu=0,0,1\nsweep_range = 0, 1\n", "sweep"))
    assert code == 1 and "PreconditionViolated" in out


def test_csv_headers(tmp_path, capsys):
    cfg = write(tmp_path, STAR.replace("0, -6.283185307179586, 0", "-0.05, -6.283185307179586, 0")
                + "sweep_range = -0.1, -0.05\nsweep_steps = 8\n")
    assert main(["cycles", "--config", cfg, "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# command=cycles")
    assert any(l.startswith("# numerics=") for l in lines)
    assert [l for l in lines if not l.startswith("#")][0] == ",".join(CENSUS_HEADER)
    assert main(["sweep", "--config", cfg, "--format", "csv"]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
    assert lines[0] == ",".join(SWEEP_HEADER)


def test_json_and_out_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["lyapunov", "--config", write(tmp_path, STAR), "--format", "json",
                 "--out", str(out)]) == 0
    body = json.loads(out.read_text())
    assert body["result"]["origin_multiplicity"] == 4
    assert body["numerics"]["ode_rel_tol"] == 1e-10


def test_overrides(tmp_path, capsys):
    cfg = write(tmp_path, STAR)
    assert main(["cycles", "--config", cfg, "--format", "json", "--grid", "40",
                 "--tol", "1e-9", "--seed", "7"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["numerics"]["grid_points"] == 40
    assert body["numerics"]["ode_abs_tol"] == pytest.approx(1e-11)
    assert body["seed"] == 7


def test_determinism(tmp_path, capsys):
    cfg = write(tmp_path, STAR)
    outs = []
    for _ in range(2):
        assert main(["chebyshev", "--config", cfg, "--format", "json", "--seed", "3"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]


def test_config_dir_env(tmp_path, monkeypatch, capsys):
    write(tmp_path, STAR, "star.cfg")
    monkeypatch.setenv("ABEL_CONFIG_DIR", str(tmp_path))
    monkeypatch.chdir("/")
    assert main(["classify", "--config", "star.cfg"]) == 0
    capsys.readouterr()


def test_console_script(tmp_path):
    cfg = write(tmp_path, STAR)
    r = subprocess.run([sys.executable, "-m", "abelcycles.cli", "classify", "--config", cfg],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and "verdict: D2Only" in r.stdout
