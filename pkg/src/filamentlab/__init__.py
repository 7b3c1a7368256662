"""Numerical laboratory for vortex filament motion in the half space.

Workflow: check boundary compatibility of half-line tangent data, extend
it to the whole line by reflection, evolve the Schroedinger-map flow
there, restrict back, and reconstruct the filament curve -- with every
provable property of the construction monitored as a runtime invariant.
"""

from .compat import (
    CompatibilityReport,
    builtin_initial_data,
    check_A,
    check_compat,
    check_D,
    get_family,
)
from .evolve import SimConfig, TimeSeries, solve_half_space, solve_whole_line
from .geometry import (
    E3,
    Grid,
    ScalarField,
    VectorField,
    cross,
    deriv,
    normalize_field,
    one_sided_deriv_at_zero,
)
from .hasimoto import frenet, hasimoto_psi, nls_residual
from .reconstruct import FilamentCurve, integrate_tangent, reconstruct_positions
from .reflect import apply_T, bar, derivative_jump_residual, extend, restrict, symmetry_residual

__version__ = "0.1.0"

__all__ = [
    "CompatibilityReport",
    "E3",
    "FilamentCurve",
    "Grid",
    "ScalarField",
    "SimConfig",
    "TimeSeries",
    "VectorField",
    "apply_T",
    "bar",
    "builtin_initial_data",
    "check_A",
    "check_D",
    "check_compat",
    "cross",
    "deriv",
    "derivative_jump_residual",
    "extend",
    "frenet",
    "get_family",
    "hasimoto_psi",
    "integrate_tangent",
    "nls_residual",
    "normalize_field",
    "one_sided_deriv_at_zero",
    "reconstruct_positions",
    "restrict",
    "solve_half_space",
    "solve_whole_line",
    "symmetry_residual",
]
