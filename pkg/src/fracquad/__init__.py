"""Fractional Gauss-Jacobi quadrature, fractional operators and solvers."""

from __future__ import annotations

from fracquad.errors import (
    AccuracyError,
    ConvergenceError,
    DomainError,
    FracquadError,
    NewtonDivergenceError,
    NonFiniteError,
    PoleError,
    RegionError,
    SpecialFunctionOverflow,
)
from fracquad.fde import CaputoIVP, SolutionGrid, abm_march, fgj_correct, solve_ivp
from fracquad.fracops import (
    caputo_deriv_left,
    error_metric,
    frac_integral_left,
    frac_integral_right,
    gl_deriv,
)
from fracquad.fvp import FvpProblem, FvpSolution, evaluate_functional, fvp_march
from fracquad.jacobi import JacobiParams, eval_recurrence, frac_eval
from fracquad.quadrature import (
    Method,
    QuadratureRule,
    get_rule,
    integrate,
    rule_eigen,
    rule_newton,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "CaputoIVP",
    "ConvergenceError",
    "DomainError",
    "FracquadError",
    "FvpProblem",
    "FvpSolution",
    "JacobiParams",
    "Method",
    "NewtonDivergenceError",
    "NonFiniteError",
    "PoleError",
    "QuadratureRule",
    "RegionError",
    "SolutionGrid",
    "SpecialFunctionOverflow",
    "abm_march",
    "caputo_deriv_left",
    "error_metric",
    "eval_recurrence",
    "evaluate_functional",
    "fgj_correct",
    "frac_eval",
    "frac_integral_left",
    "frac_integral_right",
    "fvp_march",
    "get_rule",
    "gl_deriv",
    "integrate",
    "rule_eigen",
    "rule_newton",
    "solve_ivp",
]
