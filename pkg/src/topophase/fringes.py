"""Franson coincidence fringes, their reference closed forms, and cross-checks.

The coincidence rate for total dynamical phase ``theta`` is

    C(theta) = C0 * (1 + Re(O e^{i theta})) = C0 * (1 + V cos(theta + Phi))

where O = <psi|U(p_s) (x) U(p_o) (x) U(p_i)|psi>.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .numfmt import fmt, fmt_fixed, rounded
from .optics import PreparationRecipe, prepare, target_state
from .paths import PhasePath, evolved_overlap, named_path, pancharatnam
from .state import ThreeQubitState, phase_distance

FIGURE_T = (0.0, 0.25, 0.5, 0.75, 1.0)
N_THETA = 256
N_T = 64


def theta_grid(n: int = N_THETA) -> np.ndarray:
    """``n`` uniform points over [0, 2*pi)."""
    return np.linspace(0.0, 2 * np.pi, n, endpoint=False)


def t_grid(n: int = N_T, highlighted: bool = True) -> np.ndarray:
    ts = np.linspace(0.0, 1.0, n)
    if highlighted:
        ts = np.union1d(ts, FIGURE_T)
    return ts


@dataclass(frozen=True, eq=False)
class FringeCurve:
    t: float
    theta: np.ndarray
    samples: np.ndarray
    c0: float = 1.0
    visibility: float = float("nan")
    phase: float | None = None

    def to_dict(self) -> dict:
        return {
            "t": rounded(self.t),
            "C0": rounded(self.c0),
            "V": rounded(self.visibility),
            "Phi": None if self.phase is None else rounded(self.phase),
            "theta": [rounded(x) for x in self.theta],
            "samples": [rounded(x) for x in self.samples],
        }

    def to_csv(self) -> str:
        lines = [f"theta,C(t/T={fmt(self.t)})"]
        lines += [f"{fmt_fixed(th)},{fmt(c)}" for th, c in zip(self.theta, self.samples)]
        return "\n".join(lines) + "\n"


def coincidence_curve(psi: ThreeQubitState, path: PhasePath, t: float,
                      theta=None, c0: float = 1.0) -> FringeCurve:
    """Coincidence counts over ``theta`` after evolving ``psi`` to time ``t``."""
    if not c0 > 0:
        raise ValueError("C0 must be positive")
    theta = theta_grid() if theta is None else np.asarray(theta, dtype=float)
    sample = pancharatnam(psi, path, t)
    samples = c0 * (1 + np.real(sample.overlap * np.exp(1j * theta)))
    return FringeCurve(float(t), theta, samples, float(c0), sample.visibility, sample.phase)


class FormulaId(enum.Enum):
    C0_X_GENERAL = "C0_X_GENERAL"
    C1_X_UX1 = "C1_X_UX1"
    C2_X_UX2 = "C2_X_UX2"
    CP_PROD = "CP_PROD"
    C31_GHZ = "C31_GHZ"
    C3_BGHZ = "C3_BGHZ"
    C3P_PRODBGHZ = "C3P_PRODBGHZ"


# formulas written in the endpoint phases rather than in t
PHASE_FORMULAS = {FormulaId.C0_X_GENERAL, FormulaId.CP_PROD}


class FormulaParamError(ValueError):
    pass


class ScenarioMismatch(ValueError):
    pass


def _heaviside(x):
    return np.heaviside(x, 0.5)


def closed_form(formula: FormulaId | str, theta, *, t: float | None = None,
                phases: Sequence[float] | None = None):
    """Reference closed-form coincidence formula with C0 = 1.

    C0_X_GENERAL and CP_PROD take ``phases=(p_s, p_o, p_i)``; the rest take
    the normalized time ``t``.
    """
    formula = FormulaId(formula)
    theta = np.asarray(theta, dtype=float)
    if formula in PHASE_FORMULAS:
        if phases is None or t is not None:
            raise FormulaParamError(f"{formula.value} takes phases=(phi_s, phi_o, phi_i)")
        ps, po, pi_ = (float(p) for p in phases)
    else:
        if t is None or phases is not None:
            raise FormulaParamError(f"{formula.value} takes t")
        t = float(t)

    cos, sin, pi = np.cos, np.sin, np.pi
    if formula is FormulaId.C0_X_GENERAL:
        return (1 + 0.5 * cos(theta + ps / 2) * cos((po + pi_) / 2)
                + 0.5 * cos(theta - ps / 2) * cos((po - pi_) / 2))
    if formula is FormulaId.C1_X_UX1:
        return 1 + 0.25 * cos(theta - 3 * pi * t / 2) + 0.75 * cos(theta + pi * t / 2)
    if formula is FormulaId.C2_X_UX2:
        return (1 + _heaviside(1 - 3 * t) * cos(theta) * cos(3 * pi * t / 2)
                + _heaviside(3 * t - 2) * sin(theta) * sin(3 * pi * t / 2))
    if formula is FormulaId.CP_PROD:
        return 1 + cos(theta) * cos(ps / 2) * cos(po / 2) * cos(pi_ / 2)
    if formula is FormulaId.C31_GHZ:
        return 1 + cos(theta) * cos(pi * t)
    if formula is FormulaId.C3_BGHZ:
        return 1 + cos(theta) * cos(pi * t) - 0.5 * sin(theta) * sin(pi * t)
    # C3P_PRODBGHZ
    y = pi * t / 3
    return (1 + cos(theta) * cos(y) * (1 - 7 / 4 * sin(y) ** 2)
            + 1.5 * sin(theta) * sin(y) * (1 - 13 / 12 * sin(y) ** 2))


# (state recipe, required named path or None for any path)
SCENARIOS = {
    FormulaId.C0_X_GENERAL: ("x", None),
    FormulaId.C1_X_UX1: ("x", "UX1"),
    FormulaId.C2_X_UX2: ("x", "UX2"),
    FormulaId.CP_PROD: ("prod_x", None),
    FormulaId.C31_GHZ: ("ghz", "UBGHZ"),
    FormulaId.C3_BGHZ: ("bghz", "UBGHZ"),
    FormulaId.C3P_PRODBGHZ: ("prod_bghz", "UBGHZ"),
}


def paths_equal(a: PhasePath, b: PhasePath, tol: float = 1e-12) -> bool:
    for pa, pb in zip((a.s, a.o, a.i), (b.s, b.o, b.i)):
        if len(pa) != len(pb) or np.max(np.abs(np.subtract(pa, pb))) > tol:
            return False
    return True


def _check_scenario(psi: ThreeQubitState, path: PhasePath, formula: FormulaId) -> None:
    state_name, path_name = SCENARIOS[formula]
    if phase_distance(target_state(PreparationRecipe(state_name)), psi) > 1e-9:
        raise ScenarioMismatch(f"{formula.value} is written for the {state_name} state")
    if path_name is not None and not paths_equal(path, named_path(path_name)):
        raise ScenarioMismatch(f"{formula.value} is written for the {path_name} path")


@dataclass(frozen=True)
class CrossValidation:
    formula: FormulaId
    max_abs_dev: float
    sign_flip_dev: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", self.max_abs_dev < self.tol)

    def to_dict(self) -> dict:
        return {"formula": self.formula.value, "max_abs_dev": self.max_abs_dev,
                "sign_flip_dev": self.sign_flip_dev, "pass": self.passed, "tol": self.tol}


def cross_validate(psi: ThreeQubitState, path: PhasePath, formula: FormulaId | str,
                   t_values=None, theta=None, tol: float = 1e-9) -> CrossValidation:
    """Compare simulated fringes with a reference formula over a (t, theta) grid.

    ``sign_flip_dev`` is the deviation against the formula with its
    sin(theta) term negated. Every formula here has the shape
    1 + A cos(theta) + B sin(theta), so that is the formula at -theta.
    """
    formula = FormulaId(formula)
    _check_scenario(psi, path, formula)
    t_values = np.linspace(0.0, 1.0, N_T) if t_values is None else np.asarray(t_values, float)
    theta = theta_grid() if theta is None else np.asarray(theta, dtype=float)
    dev = flip = 0.0
    for t in t_values:
        sim = 1 + np.real(evolved_overlap(psi, path(t)) * np.exp(1j * theta))
        if formula in PHASE_FORMULAS:
            kw = {"phases": path(t)}
        else:
            kw = {"t": t}
        dev = max(dev, float(np.max(np.abs(sim - closed_form(formula, theta, **kw)))))
        flip = max(flip, float(np.max(np.abs(sim - closed_form(formula, -theta, **kw)))))
    return CrossValidation(formula, dev, flip, tol)


# ---------------------------------------------------------------------------
# figure datasets
# ---------------------------------------------------------------------------

FIGURES = {
    "balgor4": (("left", "x", "UX1"), ("right", "prod_x", "UX1")),
    "balgor5": (("left", "x", "UX2"), ("right", "prod_x", "UX2")),
    "balgor3": (("upper-left", "bghz", "UBGHZ"), ("upper-right", "prod_bghz", "UBGHZ"),
                ("lower-left", "ghz", "UBGHZ"), ("lower-right", "prod_x", "UBGHZ")),
}


@dataclass(frozen=True, eq=False)
class FigureDataset:
    name: str
    theta: np.ndarray
    t_values: tuple
    # panel -> (state, path, array of shape (len(t_values), len(theta)))
    panels: dict

    def columns(self) -> list[tuple[str, np.ndarray]]:
        cols = []
        for panel, (state, _, curves) in self.panels.items():
            for t, curve in zip(self.t_values, curves):
                cols.append((f"{panel}:{state}:t/T={fmt(t)}", curve))
        return cols

    def to_csv(self) -> str:
        cols = self.columns()
        lines = [",".join(["theta"] + [name for name, _ in cols])]
        for row, th in enumerate(self.theta):
            lines.append(",".join([fmt_fixed(th)] + [fmt(c[row]) for _, c in cols]))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "figure": self.name,
            "theta": [rounded(x) for x in self.theta],
            "panels": {
                panel: {"state": state, "path": path,
                        "curves": {f"t={fmt(t)}": [rounded(x) for x in curve]
                                   for t, curve in zip(self.t_values, curves)}}
                for panel, (state, path, curves) in self.panels.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"


def figure_data(figure: str, theta=None, t_values=FIGURE_T) -> FigureDataset:
    """Theta sweeps (C0 = 1) for every panel of one of the fringe figures."""
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {sorted(FIGURES)}")
    theta = theta_grid() if theta is None else np.asarray(theta, dtype=float)
    panels = {}
    for panel, state_name, path_name in FIGURES[figure]:
        psi = prepare(state_name)
        path = named_path(path_name)
        curves = np.array([coincidence_curve(psi, path, t, theta).samples for t in t_values])
        panels[panel] = (state_name, path_name, curves)
    return FigureDataset(figure, theta, tuple(t_values), panels)
