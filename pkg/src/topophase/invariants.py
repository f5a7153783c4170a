"""Entanglement invariants, SLOCC classes and diagonal phase spectra."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .config import ALGEBRAIC_TOL
from .state import CIRCULAR3, ThreeQubitState, change_basis

HALF_PI = np.pi / 2


class SloccClass(enum.Enum):
    PRODUCT = "Product"
    BISEPARABLE_A = "BiseparableA"
    BISEPARABLE_B = "BiseparableB"
    BISEPARABLE_C = "BiseparableC"
    W = "WClass"
    GHZ = "GhzClass"


class BorderlineClassification(ValueError):
    """An invariant fell between the 'zero' and 'nonzero' thresholds."""


def reduced_density(psi: ThreeQubitState, k: int) -> np.ndarray:
    """Single-qubit reduced density matrix of slot ``k`` (in that slot's basis)."""
    if k not in (0, 1, 2):
        raise IndexError(f"qubit index must be 0, 1 or 2, got {k}")
    t = np.moveaxis(psi.tensor(), k, 0).reshape(2, 4)
    return t @ t.conj().T


def purities(psi: ThreeQubitState) -> list[float]:
    out = []
    for k in range(3):
        rho = reduced_density(psi, k)
        out.append(float(np.real(np.trace(rho @ rho))))
    return out


def three_tangle(psi: ThreeQubitState) -> float:
    """Three-tangle 4|d1 - 2 d2 + 4 d3| from the Cayley hyperdeterminant.

    Local unitaries multiply the hyperdeterminant by a unit-modulus factor,
    so the value does not depend on the basis tags of ``psi``.
    """
    a = psi.tensor()
    a000, a001, a010, a011 = a[0, 0, 0], a[0, 0, 1], a[0, 1, 0], a[0, 1, 1]
    a100, a101, a110, a111 = a[1, 0, 0], a[1, 0, 1], a[1, 1, 0], a[1, 1, 1]
    d1 = (a000 ** 2 * a111 ** 2 + a001 ** 2 * a110 ** 2
          + a010 ** 2 * a101 ** 2 + a100 ** 2 * a011 ** 2)
    d2 = (a000 * a111 * a011 * a100 + a000 * a111 * a101 * a010
          + a000 * a111 * a110 * a001 + a011 * a100 * a101 * a010
          + a011 * a100 * a110 * a001 + a101 * a010 * a110 * a001)
    d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100
    return float(4 * abs(d1 - 2 * d2 + 4 * d3))


# values in (tol, BORDERLINE_FACTOR * tol) are refused rather than guessed
BORDERLINE_FACTOR = 1e3


def _is_zero(value: float, tol: float, what: str) -> bool:
    if value <= tol:
        return True
    if value >= BORDERLINE_FACTOR * tol:
        return False
    raise BorderlineClassification(
        f"{what} = {value:.3g} lies in the borderline band ({tol:.3g}, {BORDERLINE_FACTOR * tol:.3g})")


def classify_slocc(psi: ThreeQubitState, tol: float = 1e-9) -> SloccClass:
    """SLOCC class of a pure three-qubit state.

    GHZ when the three-tangle is nonzero; W when every qubit is mixed;
    biseparable when exactly one qubit is pure; product when all are pure.
    """
    if not _is_zero(three_tangle(psi), tol, "three-tangle"):
        return SloccClass.GHZ
    mixed = [not _is_zero(1 - p, tol, f"1 - purity[{k}]") for k, p in enumerate(purities(psi))]
    if all(mixed):
        return SloccClass.W
    if not any(mixed):
        return SloccClass.PRODUCT
    pure = [k for k, m in enumerate(mixed) if not m]
    if len(pure) != 1:
        # one pure qubit forces the other two to share a pure state
        raise BorderlineClassification(f"inconsistent purity pattern {mixed}")
    return (SloccClass.BISEPARABLE_A, SloccClass.BISEPARABLE_B, SloccClass.BISEPARABLE_C)[pure[0]]


# ---------------------------------------------------------------------------
# state families
# ---------------------------------------------------------------------------

class InvalidFamily(ValueError):
    pass


@dataclass(frozen=True)
class XClass:
    """a|+++> + b|+--> + c|-+-> + d|--+>, all coefficients nonzero."""

    a: complex = 0.5
    b: complex = 0.5
    c: complex = 0.5
    d: complex = 0.5

    def __post_init__(self):
        coeffs = [complex(v) for v in (self.a, self.b, self.c, self.d)]
        if any(abs(v) <= 1e-9 for v in coeffs):
            raise InvalidFamily("X-class coefficients must all be nonzero")
        norm = sum(abs(v) ** 2 for v in coeffs)
        if abs(norm - 1) > ALGEBRAIC_TOL:
            raise InvalidFamily(f"X-class coefficients not normalized (sum = {norm:.12g})")

    support = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))

    def state(self) -> ThreeQubitState:
        return ThreeQubitState.from_terms(
            {"+++": self.a, "+--": self.b, "-+-": self.c, "--+": self.d})


@dataclass(frozen=True)
class GhzLike:
    """alpha|+++> + beta|--->; ``biased`` demands |alpha| != |beta|."""

    alpha: complex = 1 / np.sqrt(2)
    beta: complex = 1 / np.sqrt(2)
    biased: bool = False

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        if abs(a) <= 1e-9 or abs(b) <= 1e-9:
            raise InvalidFamily("GHZ-like coefficients must be nonzero")
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > ALGEBRAIC_TOL:
            raise InvalidFamily("GHZ-like coefficients not normalized")
        if self.biased and abs(abs(a) - abs(b)) <= 1e-9:
            raise InvalidFamily("biased GHZ needs |alpha| != |beta|")

    support = ((1, 1, 1), (-1, -1, -1))

    def state(self) -> ThreeQubitState:
        return ThreeQubitState.from_terms({"+++": self.alpha, "---": self.beta})


def biased_ghz(alpha=0.5, beta=np.sqrt(3) / 2) -> GhzLike:
    return GhzLike(alpha, beta, biased=True)


@dataclass(frozen=True)
class Product:
    """Product states; their local orbit is simply connected."""


def diagonal_phase_spectrum(family) -> set[float]:
    """Topological phases reachable by cyclic evolutions diagonal in +/-.

    A diagonal evolution with endpoint phases (p_s, p_o, p_i) multiplies the
    ket with signs s by exp(i s.p/2). It is cyclic exactly when s.p/2 agrees
    modulo 2*pi over the support of the state, and the acquired phase is then
    (p_s + p_o + p_i)/2 modulo 2*pi. For the X class this forces every p_k
    into pi*Z with equal parity; for GHZ-like states only the sum is
    constrained to 2*pi*Z.
    """
    if isinstance(family, XClass):
        # p_k = pi*n_k with n_k of equal parity; residues of n mod 4 suffice
        endpoints = [n for n in itertools.product(range(4), repeat=3)
                     if len({v % 2 for v in n}) == 1]
        phases = {(np.pi * sum(n) / 2) % (2 * np.pi) for n in endpoints}
    elif isinstance(family, GhzLike):
        # p_s + p_o + p_i = 2*pi*m
        phases = {(np.pi * m) % (2 * np.pi) for m in range(4)}
    elif isinstance(family, Product):
        # single homotopy class; a 2*pi spinor sign on a product state is a
        # path-dependent geometric phase, not a topological one
        phases = {0.0}
    else:
        raise InvalidFamily(f"unsupported family {family!r}")
    return {_snap_grid(p) for p in phases}


def _snap_grid(phase: float) -> float:
    k = int(round(phase / HALF_PI)) % 4
    return k * HALF_PI


def invariants_report(psi: ThreeQubitState, family=None, tol: float = 1e-9) -> dict:
    """The quantities emitted by the ``invariants`` command."""
    psi_c = change_basis(psi, CIRCULAR3)
    try:
        slocc = classify_slocc(psi_c, tol).value
    except BorderlineClassification as exc:
        slocc = f"borderline: {exc}"
    report = {
        "tangle": three_tangle(psi_c),
        "purities": purities(psi_c),
        "slocc": slocc,
        "spectrum": None,
    }
    if family is not None:
        report["spectrum"] = sorted(diagonal_phase_spectrum(family))
    return report
