"""Quadratic B-spline (isogeometric) solvers for stationary advection-diffusion.

Galerkin, least-squares with optimal L2 test functions, Galerkin/least-squares
and SUPG discretizations on tensor-product spline spaces over the unit
square, with error norms and numerical checks of the GLS stability estimate.
"""

from .analysis import ErrorReport, StabilityReport, error_norms, verify_coercivity, verify_inverse_inequality
from .formulations import Method, SolutionField, assemble, eval_field, solve
from .meshes import TensorMesh, parse_mesh, refined_mesh_ej, refined_mesh_p1, uniform_mesh
from .problems import ProblemSpec, get_problem, manufactured_problem, problem_ej, problem_one
from .splines import KnotVector, eval_basis, open_knot_vector

__all__ = [
    "ErrorReport",
    "KnotVector",
    "Method",
    "ProblemSpec",
    "SolutionField",
    "StabilityReport",
    "TensorMesh",
    "assemble",
    "error_norms",
    "eval_basis",
    "eval_field",
    "get_problem",
    "manufactured_problem",
    "open_knot_vector",
    "parse_mesh",
    "problem_ej",
    "problem_one",
    "refined_mesh_ej",
    "refined_mesh_p1",
    "solve",
    "uniform_mesh",
    "verify_coercivity",
    "verify_inverse_inequality",
]

__version__ = "0.1.0"
