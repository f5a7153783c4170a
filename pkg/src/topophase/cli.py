"""Command-line entry point.

Exit status: 0 on success, 1 on validation or check failure, 2 on usage
errors. Numeric arguments accept ``pi`` expressions such as ``-pi/2``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import config
from .checks import run_checks
from .dsl import DslError, compile_script, format_script, parse, run_plan
from .dsl.compiler import family_of, normalized_pair
from .dsl.syntax import parse_number
from .fringes import FIGURE_T, FIGURES, N_THETA, coincidence_curve, figure_data, theta_grid
from .invariants import invariants_report
from .numfmt import fmt, rounded
from .optics import InvalidRecipe, PreparationRecipe, prepare
from .paths import PhasePath, named_path, pancharatnam
from .state import CIRCULAR3, LINEAR3, ThreeQubitState, change_basis

STATE_CHOICES = ("x", "ghz", "bghz", "prod-x", "prod-bghz")


class CliError(Exception):
    pass


def _number(text: str) -> float:
    try:
        return parse_number(text)
    except DslError as exc:
        raise argparse.ArgumentTypeError(f"bad number {text!r}: {exc.message}") from None


def _complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) > 2:
        raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")
    re_ = _number(parts[0])
    im = _number(parts[1]) if len(parts) == 2 else 0.0
    return complex(re_, im)


def _add_state_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--state", choices=STATE_CHOICES, help="named preparation")
    g.add_argument("--state-json", type=Path, metavar="FILE", help="state JSON file")
    p.add_argument("--alpha", type=_complex, metavar="RE,IM")
    p.add_argument("--beta", type=_complex, metavar="RE,IM")


def _add_output_args(p: argparse.ArgumentParser, formats=("json", "csv")) -> None:
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--out", type=Path, metavar="PATH", help="write here instead of stdout")


def _recipe(args) -> PreparationRecipe | None:
    if args.state is None:
        if args.alpha is not None or args.beta is not None:
            raise CliError("--alpha/--beta only apply to --state")
        return None
    if (args.alpha is None) != (args.beta is None):
        raise CliError("give both --alpha and --beta")
    if args.alpha is not None:
        alpha, beta = normalized_pair(args.alpha, args.beta)
        return PreparationRecipe(args.state, alpha, beta)
    return PreparationRecipe(args.state)


def _state(args) -> tuple[ThreeQubitState, PreparationRecipe | None]:
    recipe = _recipe(args)
    if recipe is None:
        return ThreeQubitState.from_json(args.state_json.read_text("utf-8")), None
    return prepare(recipe), recipe


def _path(text: str) -> PhasePath:
    if text.startswith("@"):
        return PhasePath.from_json(Path(text[1:]).read_text("utf-8"))
    return named_path(text)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _json(obj) -> str:
    return json.dumps(obj) + "\n"


def cmd_prepare(args) -> int:
    psi, _ = _state(args)
    psi = change_basis(psi, LINEAR3 if args.basis == "linear" else CIRCULAR3)
    if args.format == "csv":
        rows = ["label,re,im"] + [f"{lab},{fmt(a.real)},{fmt(a.imag)}"
                                  for lab, a in zip(psi.labels(), psi.amps)]
        _emit("\n".join(rows) + "\n", args.out)
    else:
        data = {"basis": list(psi.basis),
                "amps": [[rounded(a.real), rounded(a.imag)] for a in psi.amps]}
        _emit(_json(data), args.out)
    return 0


def cmd_invariants(args) -> int:
    psi, recipe = _state(args)
    rep = invariants_report(psi, family_of(recipe) if recipe else None, config.path_tol())
    rep = {
        "tangle": rounded(rep["tangle"]),
        "purities": [rounded(p) for p in rep["purities"]],
        "slocc": rep["slocc"],
        "spectrum": None if rep["spectrum"] is None else [rounded(p) for p in rep["spectrum"]],
    }
    _emit(_json(rep), args.out)
    return 0


def cmd_evolve(args) -> int:
    psi, _ = _state(args)
    path = _path(args.path)
    ts = args.t or list(FIGURE_T)
    samples = [pancharatnam(psi, path, t, config.path_tol()) for t in ts]

    def phi(s):
        return None if s.phase is None else rounded(s.phase)

    if args.format == "csv":
        rows = ["t,V,Phi"] + [f"{fmt(s.t)},{fmt(s.visibility)},"
                              f"{'' if s.phase is None else fmt(s.phase)}" for s in samples]
        _emit("\n".join(rows) + "\n", args.out)
    elif len(samples) == 1:
        _emit(_json({"V": rounded(samples[0].visibility), "Phi": phi(samples[0])}), args.out)
    else:
        _emit(_json([{"t": rounded(s.t), "V": rounded(s.visibility), "Phi": phi(s)}
                     for s in samples]), args.out)
    return 0


def cmd_fringes(args) -> int:
    psi, _ = _state(args)
    if args.theta_points < 1:
        raise CliError("--theta-points must be positive")
    curve = coincidence_curve(psi, _path(args.path), args.t, theta_grid(args.theta_points),
                              args.c0)
    _emit(curve.to_csv() if args.format == "csv" else _json(curve.to_dict()), args.out)
    return 0


def cmd_figures(args) -> int:
    outdir = args.out or Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    for name in sorted(FIGURES):
        data = figure_data(name)
        target = outdir / f"{name}.{args.format}"
        target.write_text(data.to_csv() if args.format == "csv" else data.to_json(),
                          encoding="utf-8")
        print(target)
    return 0


def cmd_run(args) -> int:
    plan = compile_script(parse(args.script.read_bytes(), str(args.script)))
    results = []
    for kind, target, payload in run_plan(plan):
        if target is not None:
            Path(target).write_text(_json(payload), encoding="utf-8")
        results.append({"emit": kind, "target": target, "result": payload})
    _emit(_json(results), args.out)
    return 0


def cmd_fmt(args) -> int:
    text = args.script.read_bytes()
    canonical = format_script(parse(text, str(args.script)))
    if args.check:
        if canonical.encode("utf-8") != text:
            print(f"{args.script}: not canonically formatted", file=sys.stderr)
            return 1
        return 0
    if args.write:
        args.script.write_text(canonical, encoding="utf-8")
        return 0
    _emit(canonical, args.out)
    return 0


def cmd_check(args) -> int:
    tol = config.path_tol()
    results, elapsed = run_checks(tol, args.fuzz)
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'value':>12}  {'tol':>9}  status"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        note = f"  ({r.note})" if r.note else ""
        lines.append(f"{r.name:<{width}}  {r.value:>12.3e}  {r.tol:>9.1e}  {status}{note}")
    failed = [r for r in results if not r.passed]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
    _emit("\n".join(lines) + "\n", args.out)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topophase",
        description="Three-qubit topological phases on entangled photon pairs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="print a prepared state")
    _add_state_args(p)
    p.add_argument("--basis", choices=("circular", "linear"), default="circular")
    _add_output_args(p)
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("invariants", help="three-tangle, purities, SLOCC class, spectrum")
    _add_state_args(p)
    _add_output_args(p, ("json",))
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("evolve", help="visibility and Pancharatnam phase over t")
    _add_state_args(p)
    p.add_argument("--path", default="ux1", help="ux1 | ux2 | ubghz | @file.json")
    p.add_argument("--t", type=_number, action="append", help="normalized time (repeatable)")
    _add_output_args(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("fringes", help="coincidence curve at one t")
    _add_state_args(p)
    p.add_argument("--path", default="ux1", help="ux1 | ux2 | ubghz | @file.json")
    p.add_argument("--t", type=_number, default=1.0)
    p.add_argument("--theta-points", type=int, default=N_THETA)
    p.add_argument("--c0", type=_number, default=1.0)
    _add_output_args(p)
    p.set_defaults(func=cmd_fringes)

    p = sub.add_parser("figures", help="write the three figure datasets")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path, metavar="DIR", help="output directory (default .)")
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("run", help="compile and execute a .topo script")
    p.add_argument("script", type=Path)
    p.add_argument("--out", type=Path, metavar="PATH")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("fmt", help="print a .topo script in canonical form")
    p.add_argument("script", type=Path)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--check", action="store_true", help="exit 1 if not canonical")
    mode.add_argument("--write", action="store_true", help="rewrite the file in place")
    p.add_argument("--out", type=Path, metavar="PATH")
    p.set_defaults(func=cmd_fmt)

    p = sub.add_parser("check", help="run the cross-validation matrix")
    p.add_argument("--fuzz", type=int, default=10_000, help="number of fuzzed scripts")
    p.add_argument("--out", type=Path, metavar="PATH")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DslError as exc:
        print(f"topophase: {exc}", file=sys.stderr)
    except (CliError, InvalidRecipe, ValueError, OSError) as exc:
        print(f"topophase: error: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
