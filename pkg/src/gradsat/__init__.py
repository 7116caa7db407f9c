"""Approximate unweighted MaxSAT by Adam descent on a tanh relaxation of the clause matrix."""

from .encoding import IncidenceMatrix, build_incidence, forward, loss_and_grad, project, unsat_mask
from .engine import SolveConfig, SolveReport, Termination, TraceEntry, portfolio_solve, solve
from .estimator import GradientMaxSAT
from .formula import (
    CompiledFormula,
    DimacsError,
    Formula,
    WeightedInputError,
    evaluate,
    parse_dimacs,
    preprocess,
    read_dimacs,
    write_dimacs,
)
from .generators import Family, generate, suite
from .oracle import OracleRefusal, brute_force, verify

__version__ = "0.1.0"

__all__ = [
    "CompiledFormula", "DimacsError", "Family", "Formula", "GradientMaxSAT", "IncidenceMatrix",
    "OracleRefusal", "SolveConfig", "SolveReport", "Termination", "TraceEntry",
    "WeightedInputError", "brute_force", "build_incidence", "evaluate", "forward", "generate",
    "loss_and_grad", "parse_dimacs", "portfolio_solve", "preprocess", "project", "read_dimacs",
    "solve", "suite", "unsat_mask", "verify", "write_dimacs",
]
