"""Jones-calculus optical elements and the state preparation pipelines.

Conventions (linear basis, H/h first):

* HWP(t)  = [[cos 2t, sin 2t], [sin 2t, -cos 2t]]          (det = -1)
* QWP(t)  = R(t) diag(1, i) R(-t)
* Dove prism at t acts on the OAM qubit exactly as HWP(t) on polarization.
* ModeConverter(t) is the pi/2 astigmatic converter: the OAM analogue of a
  QWP at ``t + pi/4``, sending LG+1 to the HG mode oriented at ``t``.

With these, two HWPs at t and t + d give diag(e^{-2id}, e^{2id}) in the
circular basis, so the diagonal phase gate U(phi) needs d = -phi/4.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .state import (
    CIRCULAR, CIRCULAR3, LINEAR, LINEAR3, SingleQubitGate, ThreeQubitState,
    TwoQubitGate, align_global_phase, apply_local, apply_two_qubit,
    change_basis, identity_gate, phase_distance,
)


class ElementKind(enum.Enum):
    HWP = "HWP"
    QWP = "QWP"
    DOVE_PRISM = "DovePrism"
    MODE_CONVERTER = "ModeConverter"
    DIAGONAL_PHASE = "DiagonalPhase"
    SPIN_ORBIT_CNOT = "SpinOrbitCNOT"


def _rot(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _half_wave(t: float) -> np.ndarray:
    c, s = np.cos(2 * t), np.sin(2 * t)
    return np.array([[c, s], [s, -c]], dtype=complex)


def _quarter_wave(t: float) -> np.ndarray:
    return _rot(t) @ np.diag([1, 1j]) @ _rot(-t)


def element_gate(kind: ElementKind | str, angle: float) -> SingleQubitGate:
    """Jones matrix of a single-slot element, in the linear basis.

    Parameters
    ----------
    kind : ElementKind or str
        HWP, QWP, DovePrism or ModeConverter.
    angle : float
        Orientation of the fast axis (prism axis, converter axis) in radians.
    """
    kind = ElementKind(kind)
    if not np.isfinite(angle):
        raise ValueError("element angle must be finite")
    if kind in (ElementKind.HWP, ElementKind.DOVE_PRISM):
        m = _half_wave(angle)
    elif kind is ElementKind.QWP:
        m = _quarter_wave(angle)
    elif kind is ElementKind.MODE_CONVERTER:
        m = _quarter_wave(angle + np.pi / 4)
    else:
        raise ValueError(f"{kind.value} is not a single-slot oriented element")
    return SingleQubitGate(m, LINEAR)


def diagonal_phase(phi: float) -> SingleQubitGate:
    """U(phi) = diag(e^{i phi/2}, e^{-i phi/2}) in the circular basis."""
    if not np.isfinite(phi):
        raise ValueError("phase must be finite")
    return SingleQubitGate(np.diag([np.exp(0.5j * phi), np.exp(-0.5j * phi)]), CIRCULAR)


def wave_pair(kind: str, theta: float, delta: float) -> SingleQubitGate:
    """Two half-wave elements at ``theta`` then ``theta + delta``.

    ``kind`` is ``"DHWP"`` (polarization) or ``"DDP"`` (pair of Dove prisms
    on the OAM qubit). The composite is returned in the linear basis.
    """
    element = {"DHWP": ElementKind.HWP, "DDP": ElementKind.DOVE_PRISM}.get(kind)
    if element is None:
        raise ValueError(f"wave pair kind must be DHWP or DDP, got {kind!r}")
    return element_gate(element, theta + delta) @ element_gate(element, theta)


def calibrate_offset(phi: float) -> float:
    """Relative orientation of a wave pair realizing ``diagonal_phase(phi)``."""
    if not np.isfinite(phi):
        raise ValueError("phase must be finite")
    return -phi / 4


def spin_orbit_cnot(dove_angle: float = np.pi / 4) -> TwoQubitGate:
    """Polarizing Mach-Zehnder with a Dove prism in the V arm.

    H passes untouched; V picks up the Dove prism at ``dove_angle``. The
    default 45 degree prism swaps h <-> v, i.e. a CNOT controlled by V.
    """
    m = np.zeros((4, 4), dtype=complex)
    m[:2, :2] = np.eye(2)
    m[2:, 2:] = _half_wave(dove_angle)
    return TwoQubitGate(m, (LINEAR, LINEAR), (0, 1))


def gates_equal_up_to_phase(a: SingleQubitGate, b: SingleQubitGate) -> float:
    """Max entry deviation between ``a`` and ``b`` after removing a global phase."""
    b = b.in_basis(a.basis)
    inner = np.trace(b.matrix.conj().T @ a.matrix)
    if abs(inner) == 0:
        return float(np.max(np.abs(a.matrix - b.matrix)))
    return float(np.max(np.abs(a.matrix - b.matrix * inner / abs(inner))))


# ---------------------------------------------------------------------------
# preparation
# ---------------------------------------------------------------------------

TARGETS = ("x", "ghz", "bghz", "prod_x", "prod_bghz")
DEFAULT_ALPHA = 0.5
DEFAULT_BETA = np.sqrt(3) / 2


class InvalidRecipe(ValueError):
    pass


@dataclass(frozen=True)
class PreparationRecipe:
    target: str
    alpha: complex = DEFAULT_ALPHA
    beta: complex = DEFAULT_BETA

    def __post_init__(self):
        target = self.target.replace("-", "_")
        if target not in TARGETS:
            raise InvalidRecipe(f"unknown target {self.target!r}; choose from {TARGETS}")
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        if target in ("bghz", "prod_bghz"):
            a, b = self.alpha, self.beta
            if not (np.isfinite(a) and np.isfinite(b)):
                raise InvalidRecipe("alpha and beta must be finite")
            norm = abs(a) ** 2 + abs(b) ** 2
            if abs(norm - 1) > 1e-12:
                raise InvalidRecipe(f"normalization violated: |alpha|^2+|beta|^2 = {norm:.12g}")
            if target == "bghz" and abs(abs(a) - abs(b)) <= 1e-9:
                raise InvalidRecipe("biased GHZ needs |alpha| != |beta|")


@dataclass(frozen=True)
class Step:
    """One optical element placed on a slot (or on the signal pair)."""

    label: str
    slots: tuple[int, ...]
    gate: SingleQubitGate | TwoQubitGate


def _source(terms: dict[str, complex]) -> ThreeQubitState:
    # SPDC output after postselection: polarization in H/V, signal OAM in LG
    return ThreeQubitState.from_terms(terms)


def _elliptic_settings(alpha: complex, beta: complex) -> tuple[float, float]:
    """Angles (a, q) with QWP(q) . L(a) proportional to alpha|+> + beta|->.

    L(a) is linear polarization (or HG mode) at angle ``a``. In circular
    components QWP(q) L(a) = cos(u) e^{-iq}|+> + sin(u) e^{iq}|->, with
    u = pi/4 - (a - q).
    """
    u = np.arctan2(abs(beta), abs(alpha))
    q = (np.angle(beta) - np.angle(alpha)) / 2 if abs(alpha) and abs(beta) else 0.0
    return q + np.pi / 4 - u, q


def pipeline(recipe: PreparationRecipe) -> tuple[ThreeQubitState, list[Step]]:
    """Source state and element sequence of the preparation setup for ``recipe``.

    Single-slot steps are in the linear basis; run with :func:`run_pipeline`.
    """
    t = recipe.target
    if t == "x":
        source = _source({"H+H": 1 / np.sqrt(2), "V+V": -1j / np.sqrt(2)})
        steps = [
            Step("ModeConverter(0)", (1,), element_gate(ElementKind.MODE_CONVERTER, 0.0)),
            Step("CNOT[DP(45)]", (0, 1), spin_orbit_cnot(np.pi / 4)),
        ]
    elif t in ("ghz", "bghz"):
        a, b = (1 / np.sqrt(2), 1 / np.sqrt(2)) if t == "ghz" else (recipe.alpha, recipe.beta)
        source = _source({"H+H": a, "V+V": b})
        # the 90 degree prism gives |+> -> -|->, cancelling the i*i picked up
        # by the two QWPs on the V branch
        steps = [
            Step("CNOT[DP(90)]", (0, 1), spin_orbit_cnot(np.pi / 2)),
            Step("QWP-s(-45)", (0,), element_gate(ElementKind.QWP, -np.pi / 4)),
            Step("QWP-i(-45)", (2,), element_gate(ElementKind.QWP, -np.pi / 4)),
        ]
    elif t == "prod_x":
        source = _source({"H+H": 1.0})
        steps = [
            Step("ModeConverter(45)", (1,), element_gate(ElementKind.MODE_CONVERTER, np.pi / 4)),
            Step("CNOT[DP(45)]", (0, 1), spin_orbit_cnot(np.pi / 4)),
            Step("HWP-s(22.5)", (0,), element_gate(ElementKind.HWP, np.pi / 8)),
            Step("HWP-i(22.5)", (2,), element_gate(ElementKind.HWP, np.pi / 8)),
        ]
    else:  # prod_bghz
        a, q = _elliptic_settings(recipe.alpha, recipe.beta)
        source = _source({"H+H": 1.0})
        steps = [
            Step("ModeConverter(a)", (1,), element_gate(ElementKind.MODE_CONVERTER, a)),
            Step("ModeConverter(q-45)", (1,),
                 element_gate(ElementKind.MODE_CONVERTER, q - np.pi / 4)),
            Step("CNOT[DP(45)]", (0, 1), spin_orbit_cnot(np.pi / 4)),
            Step("HWP-s(a/2)", (0,), element_gate(ElementKind.HWP, a / 2)),
            Step("QWP-s(q)", (0,), element_gate(ElementKind.QWP, q)),
            Step("HWP-i(a/2)", (2,), element_gate(ElementKind.HWP, a / 2)),
            Step("QWP-i(q)", (2,), element_gate(ElementKind.QWP, q)),
        ]
    return source, steps


def run_pipeline(source: ThreeQubitState, steps: Sequence[Step]) -> ThreeQubitState:
    """Propagate ``source`` through ``steps``; the result is in the circular basis."""
    psi = change_basis(source, LINEAR3)
    for step in steps:
        if isinstance(step.gate, TwoQubitGate):
            psi = apply_two_qubit(step.gate, psi)
            continue
        gates = [identity_gate(LINEAR)] * 3
        gates[step.slots[0]] = step.gate.in_basis(LINEAR)
        psi = apply_local(*gates, psi)
    return change_basis(psi, CIRCULAR3)


def target_state(recipe: PreparationRecipe) -> ThreeQubitState:
    """Closed-form target of ``recipe`` in the circular basis."""
    t = recipe.target
    if t == "x":
        return ThreeQubitState.from_terms({"+++": .5, "+--": .5, "-+-": .5, "--+": .5})
    if t == "ghz":
        return ThreeQubitState.from_terms({"+++": 1 / np.sqrt(2), "---": 1 / np.sqrt(2)})
    if t == "bghz":
        return ThreeQubitState.from_terms({"+++": recipe.alpha, "---": recipe.beta})
    if t == "prod_x":
        q = np.array([np.exp(-0.25j * np.pi), np.exp(0.25j * np.pi)]) / np.sqrt(2)
        return ThreeQubitState.product(q, q, q)
    q = np.array([recipe.alpha, recipe.beta])
    return ThreeQubitState.product(q, q, q)


def prepare(recipe: PreparationRecipe | str, **params) -> ThreeQubitState:
    """Build the named state through its optical pipeline.

    The pipeline output is checked against the closed-form target (up to a
    global phase) and returned with that global phase removed.
    """
    if isinstance(recipe, str):
        recipe = PreparationRecipe(recipe, **params)
    built = run_pipeline(*pipeline(recipe))
    target = target_state(recipe)
    dist = phase_distance(target, built)
    if dist > 1e-9:
        raise RuntimeError(f"pipeline for {recipe.target} misses its target by {dist:.3g}")
    return align_global_phase(built, target)
