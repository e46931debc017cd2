"""Carnot group structure: group law, dilations, gauge metric, polynomials,
horizontal derivatives, test-function catalog, and volume constants."""

from .constants import (
    ConstantsCache,
    VolumeEntry,
    ball_volume,
    default_cache,
    estimate_volume_constant,
    volume_constant,
)
from .derivatives import (
    generator_coefficients,
    horizontal_derivative,
    polynomial_horizontal_derivative,
    sub_laplacian,
)
from .functions import (
    CustomFunction,
    DilatedArgument,
    GaugeBump,
    HorizontalDerivativeMagnitude,
    PolynomialBump,
    ProductFunction,
    SubLaplacianMagnitude,
    TestFunction,
    TranslatedFunction,
    random_bump,
    random_polynomial,
)
from .group import (
    CarnotGroup,
    GaugeBall,
    ball_box,
    centered_box_extents,
    euclidean_group,
    group_from_id,
    heisenberg_group,
    step_two_from_file,
    step_two_group,
)
from .polynomials import HomogeneousPolynomial, monomial_basis, vandermonde, weighted_degree

__all__ = [
    "CarnotGroup",
    "GaugeBall",
    "ball_box",
    "centered_box_extents",
    "euclidean_group",
    "group_from_id",
    "heisenberg_group",
    "step_two_from_file",
    "step_two_group",
    "HomogeneousPolynomial",
    "monomial_basis",
    "vandermonde",
    "weighted_degree",
    "generator_coefficients",
    "horizontal_derivative",
    "polynomial_horizontal_derivative",
    "sub_laplacian",
    "TestFunction",
    "GaugeBump",
    "PolynomialBump",
    "CustomFunction",
    "ProductFunction",
    "HorizontalDerivativeMagnitude",
    "SubLaplacianMagnitude",
    "TranslatedFunction",
    "DilatedArgument",
    "random_bump",
    "random_polynomial",
    "ConstantsCache",
    "VolumeEntry",
    "ball_volume",
    "default_cache",
    "estimate_volume_constant",
    "volume_constant",
]
