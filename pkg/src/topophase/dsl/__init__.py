"""The ``.topo`` experiment description language."""
from .compiler import ExperimentPlan, compile_script, run_plan
from .syntax import (
    DslError, LexError, ParseError, Script, SemanticError, format_script, parse,
)

__all__ = [
    "DslError", "ExperimentPlan", "LexError", "ParseError", "Script",
    "SemanticError", "compile_script", "format_script", "load_bundled",
    "parse", "run_plan",
]


def load_bundled(name: str) -> str:
    """Text of a bundled script: ``ux1``, ``ux2`` or ``ubghz``."""
    from importlib.resources import files

    return files("topophase.scripts").joinpath(f"{name.lower()}.topo").read_text("utf-8")
