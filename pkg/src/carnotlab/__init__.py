"""Numerical laboratory for weighted multilinear Poincare-Sobolev inequalities
on homogeneous Carnot groups.

The package estimates the implicit constants of the inequalities empirically
(gauge-relative, never claimed sharp) and reproduces the second-order
counterexample for p < 1 quantitatively.
"""

__version__ = "0.1.0"

from .carnot import (
    CarnotGroup,
    GaugeBall,
    euclidean_group,
    heisenberg_group,
    step_two_group,
    group_from_id,
    monomial_basis,
    HomogeneousPolynomial,
    horizontal_derivative,
    sub_laplacian,
    ball_volume,
    volume_constant,
)
from .quad import Estimate, QuadratureScheme, integrate_ball, lp_norm_ball, integrate_singular_product
from .weights import Weight, ExponentSystem, BallSampler, holder_conjugate, validate_exponents

__all__ = [
    "CarnotGroup",
    "GaugeBall",
    "euclidean_group",
    "heisenberg_group",
    "step_two_group",
    "group_from_id",
    "monomial_basis",
    "HomogeneousPolynomial",
    "horizontal_derivative",
    "sub_laplacian",
    "ball_volume",
    "volume_constant",
    "Estimate",
    "QuadratureScheme",
    "integrate_ball",
    "lp_norm_ball",
    "integrate_singular_product",
    "Weight",
    "ExponentSystem",
    "BallSampler",
    "holder_conjugate",
    "validate_exponents",
]
