"""Energetic space-time spectral element marching for Allen-Cahn type equations."""
from .baselines import SemilinearSystem, etdrk4_march, imex4_march
from .config import ConfigError, RunConfig, parse_config
from .convergence import ManufacturedProblem, convergence_study
from .diagnostics import (
    ConvergenceTable,
    DiagnosticsRecord,
    energy,
    error_norms,
    manufactured_reference,
    total_mass,
)
from .legendre import extension_constants, gauss_rule, temporal_matrices
from .marching import Marcher, MarchError, SchemeSpec, TimeSlab, march, ramp_schedule
from .potentials import PotentialSpec
from .solvers import DiagonalizedSlabSolver, SparseSlabSolver, SolverError
from .spatial import make_space

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ConvergenceTable", "DiagnosticsRecord", "DiagonalizedSlabSolver",
    "ManufacturedProblem", "MarchError", "Marcher", "PotentialSpec", "RunConfig", "SchemeSpec",
    "SemilinearSystem", "SolverError", "SparseSlabSolver", "TimeSlab", "convergence_study",
    "energy", "error_norms", "etdrk4_march", "extension_constants", "gauss_rule", "imex4_march",
    "make_space", "manufactured_reference", "march", "parse_config", "ramp_schedule",
    "temporal_matrices", "total_mass",
]
