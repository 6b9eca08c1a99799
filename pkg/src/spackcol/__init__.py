"""Exact S-packing coloring: solver, hardness gadgets, reductions and classifier."""
from .graph import Graph, MultiGraph, all_pairs_distances
from .solver import SList, Status, Verdict, ConstraintSet, solve, solve_constrained, verify_coloring

__version__ = "0.1.0"

__all__ = [
    "Graph", "MultiGraph", "all_pairs_distances", "SList", "Status", "Verdict",
    "ConstraintSet", "solve", "solve_constrained", "verify_coloring",
]
