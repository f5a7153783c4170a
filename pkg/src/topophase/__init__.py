"""Topological phases of three-qubit photonic states under local SU(2) evolution."""
from .fringes import FormulaId, closed_form, coincidence_curve, cross_validate, figure_data
from .invariants import (
    GhzLike, Product, SloccClass, XClass, biased_ghz, classify_slocc,
    diagonal_phase_spectrum, reduced_density, three_tangle,
)
from .optics import (
    ElementKind, PreparationRecipe, calibrate_offset, diagonal_phase, element_gate,
    prepare, spin_orbit_cnot, wave_pair,
)
from .paths import (
    PhasePath, homotopy_class_diagonal, is_cyclic, named_path, pancharatnam,
    topological_phase,
)
from .state import (
    SingleQubitGate, ThreeQubitState, TwoQubitGate, apply_local, apply_two_qubit,
    change_basis, overlap,
)

__version__ = "0.1.0"
