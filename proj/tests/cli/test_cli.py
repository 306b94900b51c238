"""Black-box checks of the lzmeas command line."""

import json
import math
import os
import subprocess
from pathlib import Path

import pytest

BIN = os.environ.get("LZMEAS_BIN", "lzmeas")


def run(*args, cwd=None):
    return subprocess.run([BIN, *map(str, args)], cwd=cwd, capture_output=True, text=True)


def read_rows(path):
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_simulate_lz_limit(tmp_path):
    out = tmp_path / "run.csv"
    r = run("simulate", "--z", 0.5, "--lambda", 0, "--protocol", "diabatic", "--out", out)
    assert r.returncode == 0, r.stderr
    header, rows = read_rows(out)
    assert header == "t,p1_dia,p2_dia,p1_adi,p2_adi,re_rho12,im_rho12,purity".split(",")
    assert abs(float(rows[-1]["p1_dia"]) - 0.208) < 0.01
    manifest = json.loads((tmp_path / "run.manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert manifest["config"]["z"] == 0.5
    assert manifest["outputs"] == ["run.csv"]


def test_simulate_is_deterministic(tmp_path):
    for name in ("a.csv", "b.csv"):
        assert run("simulate", "--lambda", 1, "--t-start", -20, "--t-end", 20, "--out", tmp_path / name).returncode == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


@pytest.mark.parametrize(
    "args, flag",
    [
        (["--dt", "-1"], "--dt"),
        (["--dt", "0.05"], "--dt"),
        (["--z", "abc"], "--z"),
        (["--protocol", "sideways"], "--protocol"),
        (["--stride", "0"], "--stride"),
        (["--t-end", "-300"], "--t-end"),
    ],
)
def test_simulate_rejects_bad_flags(tmp_path, args, flag):
    r = run("simulate", "--z", 0.5, "--lambda", 0, *args, "--out", tmp_path / "x.csv")
    if "--z" in args:
        r = run("simulate", *args, "--out", tmp_path / "x.csv")
    assert r.returncode == 2
    assert flag in r.stderr
    assert not (tmp_path / "x.csv").exists()


def test_unknown_flag_exits_2():
    assert run("simulate", "--colour", "red").returncode == 2


def test_integration_abort_exits_3(tmp_path):
    r = run("simulate", "--z", 5, "--stepper", "rk4", "--pin-window", "--out", tmp_path / "x.csv")
    assert r.returncode == 3
    assert "reduce the step size" in r.stderr


def test_config_file_and_manifest_replay(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"z": 1.0, "lambda": 0.5, "t-start": -30, "t-end": 30}))
    assert run("simulate", "--config", cfg, "--lambda", 2, "--out", tmp_path / "a.csv").returncode == 0
    manifest = json.loads((tmp_path / "a.manifest.json").read_text())
    assert manifest["config"]["z"] == 1.0
    assert manifest["config"]["lambda"] == 2.0
    assert run("simulate", "--config", tmp_path / "a.manifest.json", "--out", tmp_path / "b.csv").returncode == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    cfg.write_text(json.dumps({"zz": 1}))
    r = run("simulate", "--config", cfg)
    assert r.returncode == 2 and "zz" in r.stderr


def test_csv_round_trip(tmp_path):
    out = tmp_path / "a.csv"
    assert run("simulate", "--lambda", 3, "--t-start", -10, "--t-end", 10, "--out", out).returncode == 0
    text = out.read_text()
    for line in text.splitlines()[1:]:
        for cell in line.split(","):
            assert repr(float(cell)) == repr(float(repr(float(cell))))
            assert float(cell) == float(f"{float(cell):.17g}")


def test_sweep_determinism_and_lz_row(tmp_path):
    args = ["sweep", "--z-grid", "0.05,0.5", "--lambda-grid", "0,2", "--protocol", "adiabatic"]
    assert run(*args, "--jobs", 1, "--out", tmp_path / "j1.csv").returncode == 0
    assert run(*args, "--jobs", 8, "--out", tmp_path / "j8.csv").returncode == 0
    assert (tmp_path / "j1.csv").read_bytes() == (tmp_path / "j8.csv").read_bytes()
    header, rows = read_rows(tmp_path / "j1.csv")
    assert header == ["z", "lambda", "survival", "spread", "converged"]
    assert [(float(r["z"]), float(r["lambda"])) for r in rows] == [(0.05, 0), (0.05, 2), (0.5, 0), (0.5, 2)]
    for r in rows:
        if float(r["lambda"]) == 0:
            assert abs(float(r["survival"]) - (1 - math.exp(-math.pi * float(r["z"])))) < 0.02
    assert (tmp_path / "j1.manifest.json").exists()


def test_sweep_cell_matches_simulate(tmp_path):
    assert run("sweep", "--z-grid", 0.5, "--lambda-grid", 1, "--protocol", "diabatic",
               "--out", tmp_path / "s.csv").returncode == 0
    assert run("simulate", "--z", 0.5, "--lambda", 1, "--protocol", "diabatic", "--initial", "diabatic-level-one",
               "--out", tmp_path / "t.csv").returncode == 0
    _, cell = read_rows(tmp_path / "s.csv")
    _, traj = read_rows(tmp_path / "t.csv")
    t_end = float(traj[-1]["t"])
    t_start = float(traj[0]["t"])
    tail = [float(r["p2_adi"]) for r in traj if float(r["t"]) >= t_end - 0.1 * (t_end - t_start)]
    assert abs(float(cell[0]["survival"]) - sum(tail) / len(tail)) < 1e-12


def test_sweep_failures(tmp_path):
    r = run("sweep", "--z-grid", 0.5, "--lambda-grid", 0, "--pin-window", "--t-end", 1.0013, "--t-start", -1,
            "--out", tmp_path / "s.csv")
    assert r.returncode == 3
    _, rows = read_rows(tmp_path / "s.csv")
    assert rows[0]["survival"] == "nan" and rows[0]["converged"] == "false"
    assert run("sweep", "--z-grid", "log:1:0.1:3").returncode == 2


def test_oracle_gate(tmp_path):
    r = run("oracle", "--z", 0.5, "--lambda", 1, "--window", "-20,20", "--dt-meas", "1e-3")
    assert r.returncode == 0, r.stderr
    err = float(r.stdout.splitlines()[1].split(",")[1])
    assert err <= 1e-3
    r = run("oracle", "--z", 0.5, "--lambda", 0, "--window", "-20,20", "--dt-meas", "1e-3", "--tolerance", 1e-6)
    assert r.returncode == 0
    r = run("oracle", "--z", 0.5, "--lambda", 1, "--window", "-20,20", "--dt-meas", "0.02", "--tolerance", 1e-9)
    assert r.returncode == 4


def test_oracle_zeno():
    r = run("oracle", "--zeno", "--V", 1, "--T", 1, "--N-list", "10,100,1000")
    assert r.returncode == 0
    survival = [float(line.split(",")[1]) for line in r.stdout.splitlines()[1:]]
    assert survival == sorted(survival) and survival[-1] < 1


def test_validate_catches_corrupted_gauge():
    r = run("validate", "--criterion", 7, "--corrupt-gauge")
    assert r.returncode == 1
    assert "[FAIL]" in r.stdout
    r = run("validate", "--criterion", 7)
    assert r.returncode == 0 and "[PASS]" in r.stdout


def test_plot(tmp_path):
    csv = tmp_path / "s.csv"
    assert run("sweep", "--z-grid", "0.5,5", "--lambda-grid", "0,1,5", "--out", csv).returncode == 0
    for kind in ("surface", "asymptote"):
        a, b = tmp_path / f"{kind}1.svg", tmp_path / f"{kind}2.svg"
        assert run("plot", "--in", csv, "--kind", kind, "--out", a).returncode == 0
        assert run("plot", "--in", csv, "--kind", kind, "--out", b).returncode == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().startswith("<svg")
    assert (tmp_path / "surface1.svg").read_text().count('class="cell"') == 6
    bad = tmp_path / "bad.csv"
    bad.write_text("z,lambda,survival,spread,converged\n0.5,0,0.7,0,true\n0.5,1,what,0,true\n")
    r = run("plot", "--in", bad, "--kind", "surface", "--out", tmp_path / "x.svg")
    assert r.returncode == 2 and "line 3" in r.stderr


def test_figure(tmp_path):
    r = run("figure", "--fig", "2b", "--fast", "--plot", "--out-dir", tmp_path)
    assert r.returncode == 0, r.stderr
    for name in ("fig2b.csv", "fig2b.manifest.json", "fig2b.svg"):
        assert (tmp_path / name).exists()
    assert run("figure", "--fig", "9z").returncode == 2
