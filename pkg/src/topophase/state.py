"""Three-qubit state vectors and gates with named per-qubit bases.

Qubit order is fixed as (signal polarization, signal OAM, idler polarization)
and the amplitude index is ``4*q0 + 2*q1 + q2``. Each slot carries a basis
tag:

* ``"circular"``: |+>, |-> (circular polarization, or LG+1 / LG-1 for OAM)
* ``"linear"``: |H>, |V> for polarization, |h>, |v> (HG modes) for OAM

The two are related by |+-> = (|H> +- i|V>)/sqrt(2) on every slot.
The idler OAM is not represented; it is fixed by postselection.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import ALGEBRAIC_TOL

CIRCULAR = "circular"
LINEAR = "linear"
BASIS_TAGS = (CIRCULAR, LINEAR)
QUBIT_NAMES = ("signal-pol", "signal-oam", "idler-pol")

CIRCULAR3 = (CIRCULAR, CIRCULAR, CIRCULAR)
LINEAR3 = (LINEAR, LINEAR, LINEAR)

# columns are |+>, |-> written in linear coordinates
_CIRC_IN_LIN = np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2)

_LABELS = {
    CIRCULAR: ("+-", "+-", "+-"),
    LINEAR: ("HV", "hv", "HV"),
}


class BasisMismatch(ValueError):
    """Operands are expressed in different bases."""


class NotUnitary(ValueError):
    """A gate matrix failed the unitarity check."""


class NotNormalized(ValueError):
    """A state vector does not have unit norm."""


def _check_basis(basis: Iterable[str]) -> tuple[str, str, str]:
    basis = tuple(basis)
    if len(basis) != 3 or any(tag not in BASIS_TAGS for tag in basis):
        raise ValueError(f"basis needs exactly three tags from {BASIS_TAGS}, got {basis!r}")
    return basis


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def basis_change_matrix(source: str, target: str) -> np.ndarray:
    """Matrix taking single-qubit coordinates in ``source`` to ``target``."""
    if source == target:
        return np.eye(2, dtype=complex)
    if source == CIRCULAR and target == LINEAR:
        return _CIRC_IN_LIN
    if source == LINEAR and target == CIRCULAR:
        return _CIRC_IN_LIN.conj().T
    raise ValueError(f"unknown basis pair {source!r} -> {target!r}")


@dataclass(frozen=True, eq=False)
class ThreeQubitState:
    """Normalized pure state of the three photonic qubits.

    Instances are immutable; the amplitude array is read-only.
    """

    amps: np.ndarray
    basis: tuple[str, str, str] = CIRCULAR3

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape != (8,):
            raise ValueError(f"expected 8 amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > ALGEBRAIC_TOL:
            raise NotNormalized(f"sum |amp|^2 = {norm2!r}, expected 1")
        object.__setattr__(self, "amps", _frozen(amps))
        object.__setattr__(self, "basis", _check_basis(self.basis))

    @classmethod
    def from_amplitudes(cls, amps, basis=CIRCULAR3, normalize=False) -> "ThreeQubitState":
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        if normalize:
            norm = np.linalg.norm(amps)
            if not np.isfinite(norm) or norm == 0:
                raise NotNormalized("cannot normalize a zero or non-finite vector")
            amps = amps / norm
        return cls(amps, tuple(basis))

    @classmethod
    def from_terms(cls, terms: Mapping[str, complex], normalize=False) -> "ThreeQubitState":
        """Build a state from labelled kets, e.g. ``{"+++": a, "--+": d}``.

        Labels use ``+``/``-`` for circular slots and ``H``/``V`` (``h``/``v``
        on the OAM slot) for linear ones; all terms must agree on the basis.
        """
        basis = None
        amps = np.zeros(8, dtype=complex)
        for label, amp in terms.items():
            if len(label) != 3:
                raise ValueError(f"ket label must have three symbols: {label!r}")
            tags, index = [], 0
            for slot, ch in enumerate(label):
                for tag in BASIS_TAGS:
                    symbols = _LABELS[tag][slot]
                    if ch in symbols:
                        tags.append(tag)
                        index = 2 * index + symbols.index(ch)
                        break
                else:
                    raise ValueError(f"bad symbol {ch!r} in ket label {label!r}")
            if basis is None:
                basis = tuple(tags)
            elif tuple(tags) != basis:
                raise BasisMismatch(f"ket {label!r} disagrees with basis {basis}")
            amps[index] += amp
        if basis is None:
            raise ValueError("no terms given")
        return cls.from_amplitudes(amps, basis, normalize=normalize)

    @classmethod
    def product(cls, q0, q1, q2, basis=CIRCULAR3, normalize=False) -> "ThreeQubitState":
        amps = np.kron(np.kron(np.asarray(q0, complex), np.asarray(q1, complex)),
                       np.asarray(q2, complex))
        return cls.from_amplitudes(amps, basis, normalize=normalize)

    def labels(self) -> list[str]:
        out = []
        for index in range(8):
            bits = ((index >> 2) & 1, (index >> 1) & 1, index & 1)
            out.append("".join(_LABELS[tag][slot][bit]
                               for slot, (tag, bit) in enumerate(zip(self.basis, bits))))
        return out

    def tensor(self) -> np.ndarray:
        return self.amps.reshape(2, 2, 2)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def allclose(self, other: "ThreeQubitState", tol: float = ALGEBRAIC_TOL) -> bool:
        """Exact comparison (same basis, amplitudes within ``tol``)."""
        if self.basis != other.basis:
            return False
        return bool(np.max(np.abs(self.amps - other.amps)) <= tol)

    def equal_up_to_phase(self, other: "ThreeQubitState", tol: float = ALGEBRAIC_TOL) -> bool:
        """True when |<self|other>| = 1 within ``tol``, after aligning bases."""
        return phase_distance(self, other) <= tol

    def to_dict(self) -> dict:
        return {"basis": list(self.basis),
                "amps": [[float(a.real), float(a.imag)] for a in self.amps]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping) -> "ThreeQubitState":
        try:
            basis = tuple(data["basis"])
            pairs = data["amps"]
            amps = [complex(float(re), float(im)) for re, im in pairs]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed state JSON: {exc}") from None
        return cls.from_amplitudes(amps, basis)

    @classmethod
    def from_json(cls, text: str) -> "ThreeQubitState":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        terms = [f"({a.real:+.6g}{a.imag:+.6g}j)|{lab}>"
                 for a, lab in zip(self.amps, self.labels()) if abs(a) > 1e-12]
        return f"ThreeQubitState({' + '.join(terms) or '0'})"


@dataclass(frozen=True, eq=False)
class SingleQubitGate:
    """2x2 unitary acting on one qubit slot, written in ``basis``."""

    matrix: np.ndarray
    basis: str = LINEAR
    special: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"single-qubit gate must be 2x2, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("gate entries must be finite")
        if self.basis not in BASIS_TAGS:
            raise ValueError(f"unknown basis tag {self.basis!r}")
        err = np.max(np.abs(m.conj().T @ m - np.eye(2)))
        if err > ALGEBRAIC_TOL:
            raise NotUnitary(f"U^dagger U deviates from identity by {err:.3g}")
        if self.special:
            m = m / np.sqrt(np.linalg.det(m))
        object.__setattr__(self, "matrix", _frozen(m))

    def in_basis(self, basis: str) -> "SingleQubitGate":
        if basis == self.basis:
            return self
        s = basis_change_matrix(basis, self.basis)  # target coords -> own coords
        return SingleQubitGate(s.conj().T @ self.matrix @ s, basis, self.special)

    def __matmul__(self, other: "SingleQubitGate") -> "SingleQubitGate":
        other = other.in_basis(self.basis)
        return SingleQubitGate(self.matrix @ other.matrix, self.basis)

    @property
    def dagger(self) -> "SingleQubitGate":
        return SingleQubitGate(self.matrix.conj().T, self.basis, self.special)


@dataclass(frozen=True, eq=False)
class TwoQubitGate:
    """4x4 unitary on a declared pair of slots (only the signal pair is wired)."""

    matrix: np.ndarray
    basis: tuple[str, str] = (LINEAR, LINEAR)
    targets: tuple[int, int] = (0, 1)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"two-qubit gate must be 4x4, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("gate entries must be finite")
        err = np.max(np.abs(m.conj().T @ m - np.eye(4)))
        if err > ALGEBRAIC_TOL:
            raise NotUnitary(f"U^dagger U deviates from identity by {err:.3g}")
        for tag in self.basis:
            if tag not in BASIS_TAGS:
                raise ValueError(f"unknown basis tag {tag!r}")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "targets", tuple(self.targets))


IDENTITY = np.eye(2, dtype=complex)


def identity_gate(basis: str = CIRCULAR) -> SingleQubitGate:
    return SingleQubitGate(IDENTITY, basis)


def apply_local(g_s: SingleQubitGate, g_o: SingleQubitGate, g_i: SingleQubitGate,
                psi: ThreeQubitState) -> ThreeQubitState:
    """Apply ``g_s (x) g_o (x) g_i`` to ``psi``.

    Each gate must be written in the basis of the slot it acts on.
    """
    gates = (g_s, g_o, g_i)
    for slot, gate in enumerate(gates):
        if not isinstance(gate, SingleQubitGate):
            raise TypeError(f"expected SingleQubitGate for {QUBIT_NAMES[slot]}")
        if gate.basis != psi.basis[slot]:
            raise BasisMismatch(
                f"{QUBIT_NAMES[slot]} gate is {gate.basis}, state slot is {psi.basis[slot]}")
    out = np.einsum("ai,bj,ck,ijk->abc", g_s.matrix, g_o.matrix, g_i.matrix, psi.tensor())
    return ThreeQubitState(out.reshape(8), psi.basis)


def apply_two_qubit(g: TwoQubitGate, psi: ThreeQubitState) -> ThreeQubitState:
    """Apply a two-qubit gate on (signal-pol, signal-oam), identity on the idler."""
    if tuple(g.targets) != (0, 1):
        raise ValueError(f"two-qubit gates must target (0, 1), got {g.targets}")
    if tuple(g.basis) != tuple(psi.basis[:2]):
        raise BasisMismatch(f"gate basis {g.basis} vs state signal basis {psi.basis[:2]}")
    out = (g.matrix @ psi.amps.reshape(4, 2)).reshape(8)
    return ThreeQubitState(out, psi.basis)


def overlap(psi: ThreeQubitState, chi: ThreeQubitState) -> complex:
    """Inner product <psi|chi>."""
    if psi.basis != chi.basis:
        raise BasisMismatch(f"overlap of states in bases {psi.basis} and {chi.basis}")
    return complex(np.vdot(psi.amps, chi.amps))


def change_basis(psi: ThreeQubitState, target) -> ThreeQubitState:
    """Re-express ``psi`` in ``target`` (a tag or a triple of tags)."""
    if isinstance(target, str):
        target = (target,) * 3
    target = _check_basis(target)
    mats = [basis_change_matrix(src, dst) for src, dst in zip(psi.basis, target)]
    out = np.einsum("ai,bj,ck,ijk->abc", *mats, psi.tensor())
    return ThreeQubitState(out.reshape(8), target)


def phase_distance(psi: ThreeQubitState, chi: ThreeQubitState) -> float:
    """1 - |<psi|chi>| after bringing ``chi`` into the basis of ``psi``."""
    if chi.basis != psi.basis:
        chi = change_basis(chi, psi.basis)
    return abs(1.0 - abs(overlap(psi, chi)))


def align_global_phase(psi: ThreeQubitState, reference: ThreeQubitState) -> ThreeQubitState:
    """Multiply ``psi`` by the global phase that best matches ``reference``."""
    ref = reference if reference.basis == psi.basis else change_basis(reference, psi.basis)
    ov = overlap(psi, ref)
    if abs(ov) == 0:
        return psi
    return ThreeQubitState(psi.amps * (ov / abs(ov)), psi.basis)


def random_state(rng: np.random.Generator, basis: Sequence[str] = CIRCULAR3) -> ThreeQubitState:
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    return ThreeQubitState.from_amplitudes(v, basis, normalize=True)


def random_su2(rng: np.random.Generator, basis: str = CIRCULAR) -> SingleQubitGate:
    q = rng.normal(size=4)
    a, b, c, d = q / np.linalg.norm(q)
    m = np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])
    return SingleQubitGate(m, basis)
