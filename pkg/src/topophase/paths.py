"""Diagonal SU(2) evolution paths and their Pancharatnam phases."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .config import PATH_TOL
from .invariants import GhzLike, InvalidFamily, XClass
from .optics import diagonal_phase
from .state import ThreeQubitState, apply_local, overlap

TWO_PI = 2 * np.pi
HALF_PI = np.pi / 2
SLOTS = ("s", "o", "i")


class InvalidPath(ValueError):
    pass


class NonCyclic(ValueError):
    pass


class SnapFailure(ValueError):
    pass


class EndpointNotCyclic(ValueError):
    pass


def _check_breakpoints(slot: str, points) -> tuple[tuple[float, float], ...]:
    pts = tuple((float(t), float(v)) for t, v in points)
    if not pts:
        raise InvalidPath(f"phase {slot} has no breakpoints")
    if pts[0][0] != 0.0 or pts[0][1] != 0.0:
        raise InvalidPath(f"phase {slot} must start at (t=0, value=0), got {pts[0]}")
    for t, v in pts:
        if not (math.isfinite(t) and math.isfinite(v)):
            raise InvalidPath(f"phase {slot} has a non-finite breakpoint")
        if not 0.0 <= t <= 1.0:
            raise InvalidPath(f"phase {slot} breakpoint t={t} outside [0, 1]")
    if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
        raise InvalidPath(f"phase {slot} breakpoints must be strictly increasing in t")
    return pts


@dataclass(frozen=True)
class PhasePath:
    """Piecewise-linear phases (p_s, p_o, p_i) over normalized time [0, 1].

    Each slot is a tuple of ``(t, value)`` breakpoints starting at (0, 0);
    the last value is held up to t = 1.
    """

    s: tuple
    o: tuple
    i: tuple

    def __post_init__(self):
        for slot in SLOTS:
            object.__setattr__(self, slot, _check_breakpoints(slot, getattr(self, slot)))

    @classmethod
    def from_breakpoints(cls, bp: Mapping[str, Sequence]) -> "PhasePath":
        missing = [k for k in SLOTS if k not in bp]
        if missing:
            raise InvalidPath(f"missing phase line(s): {', '.join(missing)}")
        return cls(bp["s"], bp["o"], bp["i"])

    @classmethod
    def linear(cls, end: Sequence[float]) -> "PhasePath":
        """Straight ramps from 0 to ``end`` over [0, 1]."""
        return cls(*(((0.0, 0.0), (1.0, float(e))) for e in end))

    def breakpoints(self) -> dict[str, tuple]:
        return {"s": self.s, "o": self.o, "i": self.i}

    def __call__(self, t):
        """Phases at ``t``; shape (3,) for a scalar, (n, 3) for an array."""
        t = np.asarray(t, dtype=float)
        cols = [np.interp(t, [p[0] for p in pts], [p[1] for p in pts])
                for pts in (self.s, self.o, self.i)]
        return np.stack(cols, axis=-1)

    def endpoint(self) -> np.ndarray:
        return self(1.0)

    def retime(self, knots: Sequence[tuple[float, float]]) -> "PhasePath":
        """Compose with a monotone piecewise-linear re-timing ``g`` of [0, 1].

        ``knots`` lists ``(u, g(u))`` with g(0) = 0, g(1) = 1, strictly
        increasing. The result is the path u -> phases(g(u)), exactly.
        """
        u = np.array([k[0] for k in knots], dtype=float)
        g = np.array([k[1] for k in knots], dtype=float)
        if (u[0], g[0], u[-1], g[-1]) != (0.0, 0.0, 1.0, 1.0):
            raise InvalidPath("re-timing must fix 0 and 1")
        if np.any(np.diff(u) <= 0) or np.any(np.diff(g) <= 0):
            raise InvalidPath("re-timing must be strictly increasing")
        new = {}
        for slot, pts in self.breakpoints().items():
            ts = np.array([p[0] for p in pts])
            times = np.union1d(u, np.interp(ts, g, u))
            vals = np.interp(np.interp(times, u, g), ts, [p[1] for p in pts])
            new[slot] = list(zip(times, vals))
        return PhasePath.from_breakpoints(new)

    def to_dict(self) -> dict:
        return {"breakpoints": {k: [[t, v] for t, v in pts]
                                for k, pts in self.breakpoints().items()}}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping) -> "PhasePath":
        try:
            bp = data["breakpoints"]
        except (KeyError, TypeError):
            raise InvalidPath("path JSON needs a 'breakpoints' object") from None
        try:
            return cls.from_breakpoints(bp)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidPath):
                raise
            raise InvalidPath(f"malformed breakpoints: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "PhasePath":
        return cls.from_dict(json.loads(text))


def named_path(name: str) -> PhasePath:
    """The three evolutions used in the fringe figures: UX1, UX2, UBGHZ."""
    key = name.upper()
    pi = np.pi
    if key == "UX1":
        return PhasePath.linear((-pi, -pi, -pi))
    if key == "UX2":
        # sequential ramps; continuity fixes the values at t = 1/3 and 2/3
        return PhasePath(
            s=((0.0, 0.0), (1 / 3, -pi), (1.0, -pi)),
            o=((0.0, 0.0), (1 / 3, 0.0), (2 / 3, -pi), (1.0, -pi)),
            i=((0.0, 0.0), (2 / 3, 0.0), (1.0, -pi)),
        )
    if key == "UBGHZ":
        return PhasePath.linear((2 * pi / 3,) * 3)
    raise ValueError(f"unknown path {name!r}; choose UX1, UX2 or UBGHZ")


NAMED_PATHS = ("UX1", "UX2", "UBGHZ")


@dataclass(frozen=True)
class PancharatnamSample:
    t: float
    visibility: float
    phase: float | None
    overlap: complex

    @property
    def defined(self) -> bool:
        return self.phase is not None


def wrap_phase(phase: float) -> float:
    """Reduce to [0, 2*pi)."""
    out = float(np.mod(phase, TWO_PI))
    return 0.0 if out >= TWO_PI else out


def evolved_overlap(psi: ThreeQubitState, phases: Sequence[float]) -> complex:
    """<psi| U(p_s) (x) U(p_o) (x) U(p_i) |psi> by explicit state evolution."""
    gates = [diagonal_phase(p).in_basis(tag) for p, tag in zip(phases, psi.basis)]
    return overlap(psi, apply_local(*gates, psi))


def pancharatnam(psi: ThreeQubitState, path: PhasePath, t: float,
                 phase_tol: float = PATH_TOL) -> PancharatnamSample:
    """Visibility |O| and Pancharatnam phase arg O at normalized time ``t``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    ov = evolved_overlap(psi, path(t))
    vis = abs(ov)
    phase = wrap_phase(np.angle(ov)) if vis >= phase_tol else None
    return PancharatnamSample(float(t), float(vis), phase, ov)


def is_cyclic(psi: ThreeQubitState, path: PhasePath, tol: float = PATH_TOL) -> bool:
    return pancharatnam(psi, path, 1.0).visibility >= 1 - tol


def snap_phase(phase: float, grid: float = HALF_PI) -> tuple[float, float]:
    """Nearest multiple of ``grid`` (wrapped to [0, 2*pi)) and the residual."""
    k = round(phase / grid)
    residual = abs(phase - k * grid)
    return wrap_phase(k * grid), residual


def topological_phase(psi: ThreeQubitState, path: PhasePath, snap_tol: float = 1e-6,
                      cyclic_tol: float = PATH_TOL) -> float:
    """Endpoint phase of a cyclic evolution, snapped to the pi/2 grid."""
    end = pancharatnam(psi, path, 1.0)
    if end.visibility < 1 - cyclic_tol:
        raise NonCyclic(f"visibility at t=1 is {end.visibility:.12g}, evolution not cyclic")
    value, residual = snap_phase(end.phase)
    if residual > snap_tol:
        raise SnapFailure(f"phase {end.phase:.12g} is {residual:.3g} away from the pi/2 grid")
    return value


def _multiple_of(x: float, unit: float, tol: float) -> bool:
    return abs(x / unit - round(x / unit)) <= tol


def homotopy_class_diagonal(family, path: PhasePath, tol: float = PATH_TOL) -> float:
    """Homotopy class of a diagonal cyclic evolution, read off its endpoints."""
    ps, po, pi_ = path.endpoint()
    total = ps + po + pi_
    if isinstance(family, XClass):
        for name, value in (("phi_s", ps), ("phi_o", po), ("phi_i", pi_)):
            if not _multiple_of(value, np.pi, tol):
                raise EndpointNotCyclic(f"{name}(1) = {value:.12g} is not in pi*Z")
        for name, value in (("phi_s+phi_o", ps + po), ("phi_s+phi_i", ps + pi_),
                            ("phi_o+phi_i", po + pi_)):
            if not _multiple_of(value, TWO_PI, tol):
                raise EndpointNotCyclic(f"{name} at t=1 = {value:.12g} is not in 2*pi*Z")
    elif isinstance(family, GhzLike):
        if not _multiple_of(total, TWO_PI, tol):
            raise EndpointNotCyclic(
                f"phi_s+phi_o+phi_i at t=1 = {total:.12g} is not in 2*pi*Z")
    else:
        raise InvalidFamily(f"homotopy classes need an X-class or GHZ-like family, got {family!r}")
    return snap_phase(wrap_phase(total / 2))[0]
