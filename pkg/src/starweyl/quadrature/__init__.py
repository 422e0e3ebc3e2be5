"""Quadrature-backed star functions."""
from .evaluator import ClosedTerm, Evaluation, IntegralTerm, StarFunctionEvaluator, default_grid
from .functions import (
    associativity_failure,
    continue_inverse,
    defect_projection,
    euler_gamma,
    hankel_loop,
    inverse_minus,
    inverse_plus,
    left_right_inverses,
    linear_inverse,
    product_gamma,
    product_gamma_converged,
    reciprocal_gamma,
    resolvent_combination,
    star_beta,
    star_delta,
    star_gamma,
)
from .rules import ContourSpec, QuadratureSpec
from .residues import laguerre_psi, laguerre_series, residue_at, residue_profile
from .products import XPolynomial, product_sin, product_sin_converged, x_times
