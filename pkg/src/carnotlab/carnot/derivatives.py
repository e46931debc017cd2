"""Horizontal derivatives X^alpha f along the generator vector fields.

The generators of a step-2 group with forms B_j are

    X_a = d/dx_a + (1/2) sum_j (B_j^T x^(1))_a d/dz_j ,

left-invariant fields with affine coefficients.  X^alpha applies the
generators in the order X_1^{a_1}(X_2^{a_2}(... X_l^{a_l} f)), innermost
last generator first.

Three evaluation paths, chosen per function:
  * polynomials: exact symbolic application (generators map polynomials
    to polynomials);
  * analytic jets: for |alpha| <= 2 when the function exposes gradient
    (and Hessian), the derivative is assembled exactly from the affine
    field coefficients;
  * nested finite differences along the group curves s -> x o (s e_a),
    4th-order central stencils with one Richardson extrapolation step,
    step size eps^(1/(order+3)) scaled by the point magnitude.
"""

from __future__ import annotations

import numpy as np

from ..errors import CapabilityError, StructureError
from .polynomials import HomogeneousPolynomial

_EPS = float(np.finfo(float).eps)


def generator_coefficients(group, pts):
    """Coefficients c^a_u(x) of the generators at each point: (N, n1, n)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    n, n1 = group.n, group.n1
    coef = np.zeros((pts.shape[0], n1, n))
    coef[:, np.arange(n1), np.arange(n1)] = 1.0
    if group.step == 2:
        btx = np.einsum("na,jab->njb", pts[:, :n1], group.forms)  # (N, n2, n1)
        coef[:, :, n1:] = 0.5 * np.transpose(btx, (0, 2, 1))
    return coef


def coefficient_jacobian(group):
    """Constant Jacobian J[a, u, v] = d c^a_u / d x_v of the field coefficients."""
    n, n1 = group.n, group.n1
    jac = np.zeros((n1, n, n))
    if group.step == 2:
        for j in range(group.n2):
            jac[:, n1 + j, :n1] = 0.5 * group.forms[j].T
    return jac


def apply_generator_to_polynomial(poly, a):
    """X_a P as a polynomial."""
    group = poly.group
    out = poly.partial(a)
    if group.step == 2:
        for j in range(group.n2):
            dz = poly.partial(group.n1 + j)
            if dz.terms:
                lin = HomogeneousPolynomial(
                    group,
                    {
                        tuple(1 if i == b else 0 for i in range(group.n)): 0.5 * group.forms[j][b, a]
                        for b in range(group.n1)
                        if group.forms[j][b, a] != 0.0
                    },
                )
                out = out + lin * dz
    return out


def polynomial_horizontal_derivative(poly, alpha):
    """X^alpha P symbolically; alpha is a multi-index over the generators."""
    _check_alpha(poly.group, alpha)
    out = poly
    # innermost operator is the last generator with nonzero exponent
    for a in range(len(alpha) - 1, -1, -1):
        for _ in range(alpha[a]):
            out = apply_generator_to_polynomial(out, a)
    return out


def _check_alpha(group, alpha):
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != group.n1:
        raise StructureError(f"generator multi-index length {len(alpha)} != n1 = {group.n1}")
    if any(a < 0 for a in alpha):
        raise StructureError("multi-index entries must be nonnegative")
    return alpha


def _expand_sequence(alpha):
    """Application sequence outer-to-inner: X_1 first, X_l last."""
    seq = []
    for a, count in enumerate(alpha):
        seq.extend([a] * count)
    return seq


def _function_value(f, pts):
    vals = f(pts)
    return np.asarray(vals, dtype=float).reshape(pts.shape[0])


def _first_order_jet(group, f, a, pts):
    coef = generator_coefficients(group, pts)
    grad = np.asarray(f.gradient(pts), dtype=float)
    return np.einsum("nu,nu->n", coef[:, a, :], grad)


def _second_order_jet(group, f, a, b, pts):
    coef = generator_coefficients(group, pts)
    jac = coefficient_jacobian(group)
    grad = np.asarray(f.gradient(pts), dtype=float)
    hess = np.asarray(f.hessian(pts), dtype=float)
    first = np.einsum("nv,uv,nu->n", coef[:, a, :], jac[b], grad)
    second = np.einsum("nv,nu,nvu->n", coef[:, a, :], coef[:, b, :], hess)
    return first + second


def _fd_along_generator(group, evaluate, a, pts, total_order):
    """Directional derivative along s -> x o (s e_a) by Richardson-extrapolated
    4th-order central differences."""
    scale = np.maximum(1.0, group.gauge_norm(pts))
    h = _EPS ** (1.0 / (total_order + 3)) * scale

    def shifted(step):
        inc = np.zeros_like(pts)
        inc[:, a] = step
        return evaluate(group.compose(pts, inc))

    def stencil(hh):
        return (-shifted(2 * hh) + 8 * shifted(hh) - 8 * shifted(-hh) + shifted(-2 * hh)) / (
            12 * hh
        )

    return (16.0 * stencil(h / 2) - stencil(h)) / 15.0


def _derivative_eval(group, f, seq, pts, total_order):
    if not seq:
        return _function_value(f, pts)
    if len(seq) == 1 and getattr(f, "gradient", None) is not None:
        return _first_order_jet(group, f, seq[0], pts)
    if (
        len(seq) == 2
        and getattr(f, "gradient", None) is not None
        and getattr(f, "hessian", None) is not None
    ):
        return _second_order_jet(group, f, seq[0], seq[1], pts)
    a, rest = seq[0], seq[1:]

    def inner(xs):
        return _derivative_eval(group, f, rest, xs, total_order)

    return _fd_along_generator(group, inner, a, pts, total_order)


def horizontal_derivative(group, f, alpha, x, *, force_fd=False):
    """Evaluate X^alpha f at x (a point or an (N, n) batch)."""
    alpha = _check_alpha(group, alpha)
    order = sum(alpha)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[-1] != group.n:
        raise StructureError("point dimension mismatch")

    if isinstance(f, HomogeneousPolynomial) and not force_fd:
        out = polynomial_horizontal_derivative(f, alpha)(pts)
        out = np.atleast_1d(out)
        return out[0] if single else out

    smoothness = getattr(f, "smoothness", np.inf)
    if order > smoothness:
        raise CapabilityError(
            f"derivative order {order} exceeds declared smoothness {smoothness}"
        )
    if order == 0:
        out = _function_value(f, pts)
        return out[0] if single else out

    seq = _expand_sequence(alpha)
    if force_fd:
        bare = _Bare(f)
        out = _derivative_eval(group, bare, seq, pts, order)
    else:
        out = _derivative_eval(group, f, seq, pts, order)
    return out[0] if single else out


class _Bare:
    """Wrapper hiding analytic jets, forcing the finite-difference path."""

    gradient = None
    hessian = None

    def __init__(self, f):
        self._f = f

    def __call__(self, pts):
        return self._f(pts)


def sub_laplacian(group, f, x, *, force_fd=False):
    """Sum of squares of the generators: L f = sum_a X_a^2 f."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    total = np.zeros(pts.shape[0])
    for a in range(group.n1):
        alpha = tuple(2 if i == a else 0 for i in range(group.n1))
        total += np.atleast_1d(horizontal_derivative(group, f, alpha, pts, force_fd=force_fd))
    return total[0] if single else total
