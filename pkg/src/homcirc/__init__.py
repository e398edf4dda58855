"""Analysis of nonlinear circuits with implicit device characteristics.

Expressions, netlists, spanning-tree combinatorics, projective incremental
parameters, multivariate polynomial invariants, equilibrium checks, and a
stationary-bifurcation certifier, with exact rational arithmetic wherever
the inputs are rational.
"""

from .expr import ExprError, diff, evaluate, parse_expr, to_text
from .netlist import Branch, Circuit, NetlistError, parse_netlist, serialize
from .graph import fundamental_matrices, reference_tree, spanning_trees
from .poly import LAMBDA, MultiPoly, PolySymbol, dehomogenize, lambda_coefficients
from .projective import (
    AssociatesReport,
    DegenerateDifferentialError,
    HomogPair,
    check_associates,
    homog_memristance,
    homog_resistance,
)
from .analysis import (
    AnalysisError,
    CharPolyResult,
    OperatingPoint,
    char_poly,
    char_poly_memristive,
    check_solution,
    det_oracle_kirchhoff,
    det_oracle_matrix0,
    kirchhoff_poly,
    nondegeneracy_sum,
    parse_operating_point,
    pencil_oracle,
    solve_equilibrium,
)
from .bifurcation import BifurcationReport, check_bifurcation, eigen_exchange_probe

__version__ = "1.0.0"

__all__ = [
    "AnalysisError",
    "AssociatesReport",
    "BifurcationReport",
    "Branch",
    "CharPolyResult",
    "Circuit",
    "DegenerateDifferentialError",
    "ExprError",
    "HomogPair",
    "LAMBDA",
    "MultiPoly",
    "NetlistError",
    "OperatingPoint",
    "PolySymbol",
    "char_poly",
    "char_poly_memristive",
    "check_associates",
    "check_bifurcation",
    "check_solution",
    "dehomogenize",
    "det_oracle_kirchhoff",
    "det_oracle_matrix0",
    "diff",
    "eigen_exchange_probe",
    "evaluate",
    "fundamental_matrices",
    "homog_memristance",
    "homog_resistance",
    "kirchhoff_poly",
    "lambda_coefficients",
    "nondegeneracy_sum",
    "parse_expr",
    "parse_netlist",
    "parse_operating_point",
    "pencil_oracle",
    "reference_tree",
    "serialize",
    "solve_equilibrium",
    "spanning_trees",
    "to_text",
]
