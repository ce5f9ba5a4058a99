"""Solver for the stationary nonlocal magnetization equation on a finite
interval with tent-kernel interaction and prescribed boundary
magnetizations, plus the machinery to verify its diffusive (Fick) limit.
"""

from .backend import COMPILED, backend_name
from .errors import (BracketError, ConfigError, ContractionLossError,
                     DomainError, GridMismatchError, IterationLimitError,
                     MesofickError, RegimeError, TargetRangeError,
                     WindowViolationError)
from .grid_kernel import (Field, Grid, KernelWeights, boundary_weights,
                          build_kernel, convolve, tent_kernel)
from .linop import (DirectSolve, GainField, NeumannSeries, alpha_norm,
                    apply_linearized, gain, resolvent, sup_norm)
from .macroscopic import (ModelParams, TheoryConstants, auxiliary_field,
                          boundary_derivatives_m0, current, entropy,
                          free_energy, free_energy_density, h_tilde,
                          mean_field_magnetization, solve_macroscopic,
                          spinodal, susceptibility, theory_constants)
from .fixed_point import (IterationTrace, SolverReport, inner_solve,
                          outer_solve, residual)
from .shooting import (BoundaryMapSample, Jacobian2, boundary_map,
                       estimate_jacobian, shoot)

__version__ = "0.1.0"

__all__ = [
    "COMPILED", "backend_name",
    "BracketError", "ConfigError", "ContractionLossError", "DomainError",
    "GridMismatchError", "IterationLimitError", "MesofickError",
    "RegimeError", "TargetRangeError", "WindowViolationError",
    "Field", "Grid", "KernelWeights", "boundary_weights", "build_kernel",
    "convolve", "tent_kernel",
    "DirectSolve", "GainField", "NeumannSeries", "alpha_norm",
    "apply_linearized", "gain", "resolvent", "sup_norm",
    "ModelParams", "TheoryConstants", "auxiliary_field",
    "boundary_derivatives_m0", "current", "entropy", "free_energy",
    "free_energy_density", "h_tilde", "mean_field_magnetization",
    "solve_macroscopic", "spinodal", "susceptibility", "theory_constants",
    "IterationTrace", "SolverReport", "inner_solve", "outer_solve",
    "residual",
    "BoundaryMapSample", "Jacobian2", "boundary_map", "estimate_jacobian",
    "shoot",
]
