"""Default numerical tolerances.

``ALGEBRAIC_TOL`` guards single-step identities (norms, unitarity, basis
changes). ``PATH_TOL`` guards quantities accumulated along an evolution or a
sweep. The environment variable ``TOPOPHASE_TOL`` overrides ``PATH_TOL`` for
the command line tools.
"""
from __future__ import annotations

import os

ALGEBRAIC_TOL = 1e-12
PATH_TOL = 1e-9


def path_tol() -> float:
    raw = os.environ.get("TOPOPHASE_TOL")
    if not raw:
        return PATH_TOL
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"TOPOPHASE_TOL must be a positive number, got {raw!r}") from None
    if not value > 0:
        raise ValueError(f"TOPOPHASE_TOL must be a positive number, got {raw!r}")
    return value
