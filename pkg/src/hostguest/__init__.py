"""hostguest: deterministic models of single organic molecules in solids.

Spin Hamiltonians of the metastable triplet, vibronic emission spectra,
open-system dynamics, and quantum-interface protocol estimators, with a
scenario-driven CLI. All internal energies are angular frequencies (rad/s);
see :mod:`hostguest.units`.
"""

from .units import (
    FrequencyGrid,
    Quantity,
    Unit,
    bose_occupation,
    convert,
    thermal_frequency,
)
from .levels import (
    LevelKet,
    Manifold,
    S0,
    S1,
    T1,
    TransitionClass,
    classify_transition,
    format_ket,
    kasha_emitting_state,
    parse_ket,
)

__version__ = "0.1.0"

__all__ = [
    "FrequencyGrid",
    "Quantity",
    "Unit",
    "bose_occupation",
    "convert",
    "thermal_frequency",
    "LevelKet",
    "Manifold",
    "S0",
    "S1",
    "T1",
    "TransitionClass",
    "classify_transition",
    "format_ket",
    "kasha_emitting_state",
    "parse_ket",
    "__version__",
]
