"""Weighted Morrey and Campanato norms and the Leibniz-rule experiment.

Norms are sups over sampled balls and therefore lower estimates of the
true sups; reports echo the sampler's radius range.  The ball-volume
normalization |B|^(lambda/n) uses the ambient dimension n as written,
with a switch to the homogeneous dimension Q for exploration.
"""

from __future__ import annotations

from ..carnot.constants import ball_volume
from ..carnot.functions import HorizontalDerivativeMagnitude, ProductFunction
from ..errors import DomainError, HypothesisError, ValidationError
from ..operators import derivative_tuples
from ..quad import estimate_product, estimate_sum, lp_norm_ball
from .bestpoly import best_polynomial
from .inequalities import _base_config, _finish

_SUP_NOTE = "sup over sampled balls: lower estimate at sampled scales"


def _norm_dimension(group, normalization):
    if normalization == "ambient":
        return group.n
    if normalization == "homogeneous":
        return group.homogeneous_dimension
    raise DomainError(f"unknown normalization {normalization!r}")


def morrey_norm(
    group,
    f,
    w,
    p,
    lam,
    sampler,
    scheme,
    *,
    normalization="ambient",
    op_id="morrey",
    return_details=False,
):
    """sup_B (|B|^(-lambda/n) int_B (|f| w)^p)^(1/p) over sampled balls."""
    if not (p > 0 and lam > 0):
        raise DomainError("Morrey norms need p > 0 and lambda > 0")
    dim = _norm_dimension(group, normalization)
    best = None
    details = []
    for b_idx, ball in enumerate(sampler.generate(scheme.seed, label=f"{op_id}-balls")):
        norm = lp_norm_ball(group, f, w, p, ball, scheme, op_id=f"{op_id}/b{b_idx}")
        scale = ball_volume(group, ball.radius) ** (-lam / (dim * p))
        est = norm.scaled(scale)
        details.append({"radius": ball.radius, "center": ball.center.tolist(), "value": est.value})
        if best is None or est.value > best.value:
            best = est
    best.note = _SUP_NOTE
    if return_details:
        return best, details
    return best


def campanato_norm(
    group,
    f,
    w,
    p,
    lam,
    k,
    sampler,
    scheme,
    *,
    normalization="ambient",
    op_id="campanato",
    return_details=False,
):
    """Like Morrey but measuring the best-polynomial distance of degree < k."""
    if not (p > 0 and lam > 0):
        raise DomainError("Campanato norms need p > 0 and lambda > 0")
    if k < 1:
        raise DomainError("Campanato order k must be >= 1")
    dim = _norm_dimension(group, normalization)
    best = None
    details = []
    for b_idx, ball in enumerate(sampler.generate(scheme.seed, label=f"{op_id}-balls")):
        _, value = best_polynomial(group, f, w, p, ball, k, scheme, op_id=f"{op_id}/b{b_idx}")
        scale = ball_volume(group, ball.radius) ** (-lam / (dim * p))
        est = value.scaled(scale)
        details.append({"radius": ball.radius, "center": ball.center.tolist(), "value": est.value})
        if best is None or est.value > best.value:
            best = est
    best.note = _SUP_NOTE
    if return_details:
        return best, details
    return best


def leibniz_test(
    group,
    f,
    g,
    u,
    v1,
    v2,
    system,
    lam,
    lam1,
    lam2,
    sampler,
    scheme,
    *,
    k=None,
    normalization="ambient",
    op_id="leibniz",
):
    """Campanato norm of fg against sums of Morrey-norm products.

    Requires the scaling relation lambda/q = lambda_1/p_1 + lambda_2/p_2
    and k <= 2Q.
    """
    if system.m != 2:
        raise ValidationError(["the Leibniz experiment is bilinear: m must be 2"])
    k = k if k is not None else system.k
    p1, p2 = system.p_list
    relation = lam / system.q - (lam1 / p1 + lam2 / p2)
    if abs(relation) > 1e-12:
        raise ValidationError(
            [f"scaling relation lambda/q = lambda1/p1 + lambda2/p2 violated by {relation:g}"]
        )
    if k > 2 * group.homogeneous_dimension:
        raise HypothesisError(f"needs k <= 2Q = {2 * group.homogeneous_dimension}, got k = {k}")
    product = ProductFunction(group, [f, g])
    lhs = campanato_norm(
        group,
        product,
        u,
        system.q,
        lam,
        k,
        sampler,
        scheme,
        normalization=normalization,
        op_id=f"{op_id}/lhs",
    )
    terms = []
    breakdown = []
    for t_idx, tup in enumerate(derivative_tuples(2, k, group.n1)):
        a1, a2 = tup.alphas
        m1 = morrey_norm(
            group,
            HorizontalDerivativeMagnitude(group, f, a1),
            v1,
            p1,
            lam1,
            sampler,
            scheme,
            normalization=normalization,
            op_id=f"{op_id}/t{t_idx}/f",
        )
        m2 = morrey_norm(
            group,
            HorizontalDerivativeMagnitude(group, g, a2),
            v2,
            p2,
            lam2,
            sampler,
            scheme,
            normalization=normalization,
            op_id=f"{op_id}/t{t_idx}/g",
        )
        term = estimate_product([m1, m2])
        terms.append(term)
        breakdown.append(
            {
                "alphas": [list(a1), list(a2)],
                "value": term.value,
                "std_error": term.std_error,
            }
        )
    rhs = estimate_sum(terms)
    config = _base_config(
        group,
        system,
        u,
        [v1, v2],
        scheme,
        kind="leibniz",
        k=k,
        lambdas={"lhs": lam, "f": lam1, "g": lam2},
        sampler=sampler.to_dict(),
        normalization=normalization,
    )
    return _finish(lhs, rhs, config, breakdown)
