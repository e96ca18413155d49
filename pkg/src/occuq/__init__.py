"""Occupation times of a finite buffer under threshold tau.

Exact transform pipeline (spectral roots -> crossing transforms -> double
transform -> Euler inversion) plus an event-driven Monte Carlo oracle for a
doubly reflected fluid queue with ON/OFF phase-type input and its
compound-Poisson (M/G/1-type) limit.
"""

from .errors import (ConfigError, DegenerateRoots, EvaluationFailure,
                     IllConditioned, OccuqError, SingularSolve,
                     ZeroDenominator)
from .phase_type import (PhaseType, make_coxian, make_erlang,
                         make_exponential)
from .fluid_model import (FluidModel, Mg1Model, RootSystem, laplace_exponent,
                          mg1_roots, roots)
from .crossing_transforms import (ReturnSolution, UpcrossingSolution,
                                  joint_transform, l1, root_system,
                                  solve_return, solve_upcrossing,
                                  w_via_determinants)
from .laplace_inversion import (EulerParams, euler_invert_1d,
                                euler_invert_2d)
from .occupation_transform import (OccupationQuery, cdf_curve, cdf_transform,
                                   density_curve, double_transform,
                                   invert_cdf, mean_occupation)
from .simulator import (CycleSample, CycleSamples, PathRecord, PathState,
                        backend_name, mean_with_se, simulate_cycles,
                        simulate_mg1_path, simulate_occupation,
                        simulate_path)

__version__ = "0.1.0"

__all__ = [
    "OccuqError", "ConfigError", "DegenerateRoots", "SingularSolve",
    "IllConditioned", "ZeroDenominator", "EvaluationFailure",
    "PhaseType", "make_exponential", "make_erlang", "make_coxian",
    "FluidModel", "Mg1Model", "RootSystem", "roots", "mg1_roots",
    "laplace_exponent",
    "UpcrossingSolution", "ReturnSolution", "root_system",
    "solve_upcrossing", "solve_return", "w_via_determinants",
    "joint_transform", "l1",
    "EulerParams", "euler_invert_1d", "euler_invert_2d",
    "OccupationQuery", "double_transform", "cdf_transform",
    "mean_occupation", "invert_cdf", "cdf_curve", "density_curve",
    "PathState", "PathRecord", "CycleSample", "CycleSamples",
    "simulate_path", "simulate_mg1_path", "simulate_cycles",
    "simulate_occupation", "mean_with_se", "backend_name",
    "__version__",
]
