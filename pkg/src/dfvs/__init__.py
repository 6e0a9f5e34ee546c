"""Exact directed feedback vertex set solver."""

from .digraph import DiGraph, GraphError, SccLabeling, bi_projection, find_cycle, is_acyclic, scc_par
from .driver import SolveConfig, SolveReport, cegar_solve, solve_dfvs, validate

__all__ = [
    "DiGraph",
    "GraphError",
    "SccLabeling",
    "SolveConfig",
    "SolveReport",
    "bi_projection",
    "cegar_solve",
    "find_cycle",
    "is_acyclic",
    "scc_par",
    "solve_dfvs",
    "validate",
]

__version__ = "0.1.0"
