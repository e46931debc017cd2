"""Inequality experiments: ratio estimation, best-polynomial approximation,
representation-formula checks, the p < 1 counterexample, and Morrey /
Campanato / Leibniz tests."""

from .bestpoly import best_polynomial, evaluate_candidate
from .counterexample import (
    CounterexampleFamily,
    RampFunction,
    affine_infimum,
    counterexample_family,
    counterexample_report,
    fit_scaling_slope,
    affine_distance_floor,
    phi,
    phi_prime,
    phi_prime_lp,
    psi,
    second_derivative_lp,
)
from .inequalities import (
    InequalityReport,
    poincare_test,
    representation_check,
    sobolev_sublaplacian_test,
    sobolev_test,
)
from .reports import dump_json, jsonify, write_csv, write_json
from .spaces import campanato_norm, leibniz_test, morrey_norm

__all__ = [
    "best_polynomial",
    "evaluate_candidate",
    "CounterexampleFamily",
    "RampFunction",
    "affine_infimum",
    "counterexample_family",
    "counterexample_report",
    "fit_scaling_slope",
    "affine_distance_floor",
    "phi",
    "phi_prime",
    "phi_prime_lp",
    "psi",
    "second_derivative_lp",
    "InequalityReport",
    "poincare_test",
    "representation_check",
    "sobolev_sublaplacian_test",
    "sobolev_test",
    "dump_json",
    "jsonify",
    "write_csv",
    "write_json",
    "campanato_norm",
    "leibniz_test",
    "morrey_norm",
]
