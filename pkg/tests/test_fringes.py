import csv
import io
import json

import numpy as np
import pytest

from topophase.fringes import (
    FIGURE_T, FIGURES, N_T, FormulaId, FormulaParamError, ScenarioMismatch, closed_form,
    coincidence_curve, cross_validate, figure_data, t_grid, theta_grid,
)
from topophase.optics import prepare
from topophase.paths import NAMED_PATHS, PhasePath, named_path

PI = np.pi
THETA = theta_grid()


def test_grids():
    assert len(THETA) == 256 and THETA[0] == 0 and THETA[-1] < 2 * PI
    ts = t_grid()
    assert ts[0] == 0 and ts[-1] == 1 and set(FIGURE_T) <= set(ts)
    assert len(t_grid(N_T, highlighted=False)) == N_T


def test_curve_examples():
    x, ux1 = prepare("x"), named_path("UX1")
    c = coincidence_curve(x, ux1, 0.0, [0.0], c0=3.0)
    assert abs(c.samples[0] - 6.0) < 1e-12
    c = coincidence_curve(x, ux1, 1.0)
    assert np.max(np.abs(c.samples - (1 - np.sin(THETA)))) < 1e-12
    c = coincidence_curve(prepare("prod_x"), ux1, 1.0)
    assert np.max(np.abs(c.samples - 1)) < 1e-12


def test_curve_rejects_bad_c0():
    with pytest.raises(ValueError):
        coincidence_curve(prepare("x"), named_path("UX1"), 0.5, c0=0)


def test_curve_serialization():
    c = coincidence_curve(prepare("x"), named_path("UX1"), 1.0, theta_grid(4))
    rows = list(csv.reader(io.StringIO(c.to_csv())))
    assert rows[0] == ["theta", "C(t/T=1)"]
    assert rows[1:] == [["0.000000000", "1"], ["1.570796327", "0"],
                        ["3.141592654", "1"], ["4.712388980", "2"]]
    d = c.to_dict()
    assert d["V"] == 1.0 and d["Phi"] == 1.57079633


@pytest.mark.parametrize("name", ["x", "ghz", "bghz", "prod_x", "prod_bghz"])
@pytest.mark.parametrize("path", NAMED_PATHS)
def test_curve_bounds_and_mean(name, path):
    psi, p = prepare(name), named_path(path)
    for t in np.linspace(0, 1, 9):
        c = coincidence_curve(psi, p, t, c0=1.5)
        assert c.samples.min() >= -1e-12 and c.samples.max() <= 3.0 + 1e-12
        assert abs(c.samples.mean() - 1.5) < 1e-9


def test_closed_form_examples():
    assert abs(closed_form("C1_X_UX1", 0.0, t=1.0) - 1) < 1e-15
    assert abs(closed_form(FormulaId.C31_GHZ, 0.0, t=0.0) - 2) < 1e-15
    cp = closed_form(FormulaId.CP_PROD, THETA, phases=(-PI, -PI, -PI))
    assert np.max(np.abs(cp - 1)) < 1e-15


def test_closed_form_parameter_checks():
    with pytest.raises(FormulaParamError):
        closed_form("C1_X_UX1", THETA, phases=(0, 0, 0))
    with pytest.raises(FormulaParamError):
        closed_form("CP_PROD", THETA, t=0.5)
    with pytest.raises(ValueError):
        closed_form("C9", THETA, t=0.5)


def test_c1_is_c0_on_the_ux1_ramp():
    for t in np.linspace(0, 1, 33):
        a = closed_form("C1_X_UX1", THETA, t=t)
        b = closed_form("C0_X_GENERAL", THETA, phases=(-PI * t,) * 3)
        assert np.max(np.abs(a - b)) < 1e-12


def test_c2_heaviside_pieces():
    # dark middle third, and the endpoint shifted by pi/2
    assert np.max(np.abs(closed_form("C2_X_UX2", THETA, t=0.5) - 1)) < 1e-15
    assert np.max(np.abs(closed_form("C2_X_UX2", THETA, t=1.0) - (1 - np.sin(THETA)))) < 1e-12


@pytest.mark.parametrize("formula,state,path", [
    ("C0_X_GENERAL", "x", "UX1"), ("C0_X_GENERAL", "x", "UX2"), ("C0_X_GENERAL", "x", "UBGHZ"),
    ("C1_X_UX1", "x", "UX1"), ("C2_X_UX2", "x", "UX2"),
    ("CP_PROD", "prod_x", "UX1"), ("CP_PROD", "prod_x", "UX2"), ("CP_PROD", "prod_x", "UBGHZ"),
    ("C31_GHZ", "ghz", "UBGHZ"), ("C3P_PRODBGHZ", "prod_bghz", "UBGHZ"),
])
def test_cross_validation_passes(formula, state, path):
    report = cross_validate(prepare(state), named_path(path), formula)
    assert report.passed and report.max_abs_dev < 1e-9


def test_c3_bghz_sign_record():
    t_values = np.linspace(0, 1, N_T)
    report = cross_validate(prepare("bghz"), named_path("UBGHZ"), "C3_BGHZ")
    expected = np.max(np.abs(np.sin(THETA))) * np.max(np.abs(np.sin(PI * t_values)))
    assert not report.passed
    assert abs(report.max_abs_dev - expected) < 1e-9
    assert report.sign_flip_dev < 1e-9
    assert report.to_dict()["pass"] is False


def test_cross_validate_scenario_checks():
    with pytest.raises(ScenarioMismatch):
        cross_validate(prepare("ghz"), named_path("UX1"), "C1_X_UX1")
    with pytest.raises(ScenarioMismatch):
        cross_validate(prepare("x"), named_path("UX2"), "C1_X_UX1")


def test_c0_general_on_random_paths(rng):
    x = prepare("x")
    for _ in range(20):
        path = PhasePath.linear(rng.uniform(-3 * PI, 3 * PI, size=3))
        assert cross_validate(x, path, "C0_X_GENERAL", t_values=np.linspace(0, 1, 9)).passed


def test_figure_columns():
    d4 = figure_data("balgor4")
    names = [n for n, _ in d4.columns()]
    assert names[:5] == [f"left:x:t/T={t}" for t in ("0", "0.25", "0.5", "0.75", "1")]
    assert names[5:] == [f"right:prod_x:t/T={t}" for t in ("0", "0.25", "0.5", "0.75", "1")]
    assert len(figure_data("balgor3").columns()) == 20
    assert set(FIGURES) == {"balgor3", "balgor4", "balgor5"}


def test_figure_panel_values():
    cols = dict(figure_data("balgor4").columns())
    assert np.max(np.abs(cols["left:x:t/T=1"] - (1 - np.sin(THETA)))) < 1e-12
    cols = dict(figure_data("balgor3").columns())
    assert np.max(np.abs(cols["lower-left:ghz:t/T=0.5"] - 1)) < 1e-12
    cols = dict(figure_data("balgor5").columns())
    assert np.max(np.abs(cols["left:x:t/T=0.5"] - 1)) < 1e-12


def test_figure_data_deterministic():
    for name in FIGURES:
        a, b = figure_data(name), figure_data(name)
        assert a.to_csv() == b.to_csv()
        assert a.to_json() == b.to_json()
    data = json.loads(figure_data("balgor5").to_json())
    assert data["panels"]["left"]["path"] == "UX2"


def test_figure_csv_layout():
    rows = list(csv.reader(io.StringIO(figure_data("balgor5").to_csv())))
    assert rows[0][0] == "theta" and len(rows) == 257
    assert all(len(r) == 11 for r in rows)
    assert rows[2][0] == f"{2 * PI / 256:.9f}"


def test_unknown_figure():
    with pytest.raises(ValueError):
        figure_data("balgor9")
