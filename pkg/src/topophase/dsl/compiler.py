"""Semantic checks and compilation of parsed scripts into experiment plans."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..fringes import FIGURE_T, coincidence_curve, theta_grid
from ..invariants import GhzLike, Product, XClass, invariants_report
from ..numfmt import fmt, rounded
from ..optics import InvalidRecipe, PreparationRecipe, prepare
from ..paths import NonCyclic, PhasePath, SnapFailure, pancharatnam, topological_phase
from .syntax import (
    Emit, Loc, PathStmt, Prepare, Script, SemanticError, Sweep, evaluate,
)

# decimal literals in scripts rarely normalize to 1e-12; accept this slack
# and renormalize exactly before building the recipe
SCRIPT_NORM_TOL = 1e-6
MAX_THETA_POINTS = 100_000


@dataclass(frozen=True, eq=False)
class ExperimentPlan:
    recipe: PreparationRecipe
    path: PhasePath | None
    t_values: tuple
    theta: np.ndarray
    outputs: tuple  # of (kind, target or None)


def _err(message: str, loc: Loc | None, source: str) -> SemanticError:
    loc = loc or Loc(1, 1)
    return SemanticError(message, loc.line, loc.column, source)


def _value(node, source: str, what: str) -> float:
    try:
        value = evaluate(node)
    except SemanticError as exc:
        raise SemanticError(exc.message, exc.line, exc.column, source) from None
    if not math.isfinite(value):
        raise _err(f"{what} is not finite", getattr(node, "loc", None), source)
    return value


def normalized_pair(alpha: complex, beta: complex, tol: float = SCRIPT_NORM_TOL):
    """Renormalize (alpha, beta) if already normalized within ``tol``."""
    norm2 = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm2 - 1) > tol:
        raise InvalidRecipe(f"normalization violated: |alpha|^2+|beta|^2 = {norm2:.9g}")
    scale = math.sqrt(norm2)
    return alpha / scale, beta / scale


def _recipe(stmt: Prepare, source: str) -> PreparationRecipe:
    name = stmt.name
    args = {}
    for arg in stmt.args:
        if arg.name in args:
            raise _err(f"duplicate argument {arg.name!r}", arg.loc, source)
        if arg.name not in ("alpha", "beta"):
            raise _err(f"unknown argument {arg.name!r}; expected alpha, beta", arg.loc, source)
        args[arg.name] = _value(arg.value, source, arg.name)
    try:
        if args:
            if name not in ("bghz", "prod_bghz"):
                raise InvalidRecipe(f"state {name!r} takes no arguments")
            if set(args) != {"alpha", "beta"}:
                raise InvalidRecipe("give both alpha and beta")
            alpha, beta = normalized_pair(args["alpha"], args["beta"])
            return PreparationRecipe(name, alpha, beta)
        return PreparationRecipe(name)
    except InvalidRecipe as exc:
        raise _err(str(exc), stmt.loc, source) from None


def _path(stmt: PathStmt, source: str) -> PhasePath:
    lines = {}
    for ql in stmt.lines:
        if ql.qubit in lines:
            raise _err(f"duplicate qubit line {ql.qubit}", ql.loc, source)
        points = [(0.0, 0.0)]
        for seg in ql.segments:
            t0 = _value(seg.start, source, "segment start")
            t1 = _value(seg.end, source, "segment end")
            to = _value(seg.to, source, "target phase")
            if not 0.0 <= t0 < t1 <= 1.0:
                raise _err(f"segment needs 0 <= start < end <= 1, got ({t0:g}, {t1:g})",
                           seg.loc, source)
            last_t, last_v = points[-1]
            if t0 < last_t:
                raise _err(f"overlapping segments on qubit line {ql.qubit}", seg.loc, source)
            if t0 > last_t:
                points.append((t0, last_v))  # hold
            points.append((t1, to))
        if points[-1][0] < 1.0:
            points.append((1.0, points[-1][1]))
        lines[ql.qubit] = points
    for q in ("s", "o", "i"):
        if q not in lines:
            raise _err(f"missing qubit line {q}", stmt.loc, source)
    return PhasePath.from_breakpoints(lines)


def _sweep(stmt: Sweep, source: str) -> tuple[tuple, np.ndarray]:
    ts = []
    for node in stmt.t_values:
        t = _value(node, source, "sweep time")
        if not 0.0 <= t <= 1.0:
            raise _err(f"sweep time {t:g} outside [0, 1]", getattr(node, "loc", stmt.loc), source)
        ts.append(t)
    r = stmt.theta
    start = _value(r.start, source, "theta start")
    stop = _value(r.stop, source, "theta stop")
    if not 1 <= r.count <= MAX_THETA_POINTS:
        raise _err(f"theta point count must be in [1, {MAX_THETA_POINTS}]", r.loc, source)
    if not stop > start:
        raise _err("theta range needs stop > start", r.loc, source)
    return tuple(ts), np.linspace(start, stop, r.count, endpoint=False)


def compile_script(ast: Script) -> ExperimentPlan:
    """Check a parsed script and build its :class:`ExperimentPlan`."""
    source = ast.source
    prepares = [s for s in ast.statements if isinstance(s, Prepare)]
    paths = [s for s in ast.statements if isinstance(s, PathStmt)]
    sweeps = [s for s in ast.statements if isinstance(s, Sweep)]
    emits = [s for s in ast.statements if isinstance(s, Emit)]
    if not prepares:
        raise _err("script has no prepare statement", None, source)
    if len(prepares) > 1:
        raise _err("only one prepare statement is allowed", prepares[1].loc, source)
    if len(paths) > 1:
        raise _err("only one path statement is allowed", paths[1].loc, source)
    if len(sweeps) > 1:
        raise _err("only one sweep statement is allowed", sweeps[1].loc, source)

    recipe = _recipe(prepares[0], source)
    path = _path(paths[0], source) if paths else None
    if sweeps:
        t_values, theta = _sweep(sweeps[0], source)
    else:
        t_values, theta = FIGURE_T, theta_grid()

    outputs = tuple((e.kind, e.target) for e in emits)
    if not outputs:
        outputs = (("phase", None),) if path is not None else (("invariants", None),)
    for e in emits:
        if e.kind in ("fringes", "phase") and path is None:
            raise _err(f"emit {e.kind} needs a path statement", e.loc, source)
    return ExperimentPlan(recipe, path, t_values, theta, outputs)


def family_of(recipe: PreparationRecipe):
    """State family used for phase-spectrum queries."""
    if recipe.target == "x":
        return XClass()
    if recipe.target == "ghz":
        return GhzLike()
    if recipe.target == "bghz":
        return GhzLike(recipe.alpha, recipe.beta, biased=True)
    return Product()


def run_plan(plan: ExperimentPlan) -> list[tuple[str, str | None, dict]]:
    """Execute a plan; returns ``(kind, target, payload)`` per emit, in order."""
    psi = prepare(plan.recipe)
    results = []
    for kind, target in plan.outputs:
        if kind == "invariants":
            rep = invariants_report(psi, family_of(plan.recipe))
            payload = {
                "tangle": rounded(rep["tangle"]),
                "purities": [rounded(p) for p in rep["purities"]],
                "slocc": rep["slocc"],
                "spectrum": [rounded(p) for p in rep["spectrum"]],
            }
        elif kind == "phase":
            samples = [pancharatnam(psi, plan.path, t) for t in plan.t_values]
            try:
                topo = rounded(topological_phase(psi, plan.path))
            except (NonCyclic, SnapFailure):
                topo = None
            payload = {
                "samples": [{"t": rounded(s.t), "V": rounded(s.visibility),
                             "Phi": None if s.phase is None else rounded(s.phase)}
                            for s in samples],
                "topological_phase": topo,
            }
        else:
            payload = {
                "theta": [rounded(x) for x in plan.theta],
                "curves": {f"t={fmt(t)}": [rounded(c) for c in
                                           coincidence_curve(psi, plan.path, t, plan.theta).samples]
                           for t in plan.t_values},
            }
        results.append((kind, target, payload))
    return results
