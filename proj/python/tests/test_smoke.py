import math

import numpy as np
import pytest

import lzmeas


def test_lz_limit():
    run = lzmeas.simulate(z=0.5, lambda_=0.0, protocol="diabatic")
    assert run["t"][0] == -200.0 and run["t"][-1] == 200.0
    assert abs(run["p1_dia"][-1] - math.exp(-math.pi / 2)) < 0.01
    assert np.allclose(run["p1_dia"] + run["p2_dia"], 1.0)
    assert np.all(np.abs(run["purity"] - 1.0) < 1e-10)


def test_measurement_decoheres():
    run = lzmeas.simulate(z=0.5, lambda_=2.0, t_start=-20.0, t_end=20.0, pin_window=True)
    assert np.all(np.diff(run["purity"]) <= 1e-12)


def test_bad_options_name_the_flag():
    with pytest.raises(ValueError, match="--dt"):
        lzmeas.simulate(dt=-1.0)
    with pytest.raises(ValueError, match="colour"):
        lzmeas.simulate(colour=1.0)


def test_integration_abort():
    with pytest.raises(lzmeas.IntegrationAbort):
        lzmeas.simulate(z=5.0, stepper="rk4", pin_window=True)


def test_sweep_and_oracle():
    cells = lzmeas.sweep(z_grid="0.5", lambda_grid="0,1", protocol="adiabatic")
    assert [c["lambda"] for c in cells] == [0.0, 1.0]
    assert abs(cells[0]["survival"] - (1 - math.exp(-math.pi / 2))) < 0.02
    assert lzmeas.oracle_error(0.5, 1.0, 1e-3) < 1e-3


def test_zeno_and_criterion():
    assert lzmeas.projective_zeno_simulate(1.0, 1.0, 1000) == pytest.approx(
        lzmeas.zeno_projective_survival(1.0, 1.0, 1000), abs=1e-4)
    assert lzmeas.run_criterion(8)["passed"]


def test_figure_and_plot(tmp_path):
    csv = lzmeas.reproduce_figure("2b", str(tmp_path), fast=True)
    svg = lzmeas.render_svg(csv, "timeseries")
    assert svg.startswith("<svg") and 'class="curve"' in svg
    bad = tmp_path / "bad.csv"
    bad.write_text("t,p1_dia\n0,x\n")
    with pytest.raises(lzmeas.CsvError, match="line 2"):
        lzmeas.render_svg(str(bad), "timeseries")
