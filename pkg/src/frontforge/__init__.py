"""Monotone lattice fronts of FPU-type chains by action minimization."""

__version__ = "0.1.0"

from .analysis import decay_rate, fit_tail, verify_front
from .potential import PotentialSpec, build_normalized, builtin, builtin_spec, check_assumptions
from .profile import Grid, Profile, average, nabla, shock_profile
from .psystem import ShockData, ShockType, classify, complete_shock, energy_residual, trace_curve
from .solver import FrontResult, SolverConfig, solve_front

__all__ = [
    "Grid", "Profile", "PotentialSpec", "ShockData", "ShockType", "SolverConfig", "FrontResult",
    "average", "nabla", "shock_profile", "build_normalized", "builtin", "builtin_spec",
    "check_assumptions", "classify", "complete_shock", "energy_residual", "trace_curve",
    "solve_front", "decay_rate", "fit_tail", "verify_front",
]
