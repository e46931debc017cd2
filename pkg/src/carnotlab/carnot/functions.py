"""Catalog of smooth test functions with analytic jets where available.

The workhorse is the gauge bump: a smooth compactly supported function
built from the polynomial u(y) = ||c^-1 o y||^(2s!) / R^(2s!), whose
support is exactly the gauge ball B(c, R).  Because u is a polynomial,
gradients and Hessians are exact, which feeds the analytic path of the
horizontal derivatives up to order 2; higher orders fall back to nested
finite differences.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError, StructureError
from .derivatives import horizontal_derivative, sub_laplacian
from .group import GaugeBall
from .polynomials import HomogeneousPolynomial


class TestFunction:
    """Base class: evaluable on (N, n) batches, optional analytic jets.

    `gradient`/`hessian` stay None unless a subclass provides them;
    `smoothness` bounds the derivative order the catalog guarantees.
    """

    support = None
    smoothness = math.inf
    gradient = None
    hessian = None

    def __call__(self, pts):
        raise NotImplementedError


def _as_batch(pts, n):
    pts = np.asarray(pts, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != n:
        raise StructureError("point dimension mismatch")
    return pts, single


class GaugeBump(TestFunction):
    """Smooth bump exp(-u/(1-u)) on the gauge ball B(center, radius).

    Takes the value `height` at the center and vanishes to infinite order
    on the boundary.
    """

    def __init__(self, group, center, radius, height=1.0):
        if radius <= 0:
            raise DomainError("bump radius must be positive")
        self.group = group
        center = np.asarray(center, dtype=float).reshape(-1)
        self.height = float(height)
        self.support = GaugeBall(center, float(radius))
        self._u = _gauge_power_polynomial(group, center, radius)
        self._grad_u = self._u.gradient_polys()
        self._hess_u = [[g.partial(j) for j in range(group.n)] for g in self._grad_u]

    def _profile(self, pts):
        # exp(-u/(1-u)) underflows to exact 0 well before 1-u does, so the
        # derivative quotients are computed only where 1-u > 1e-3
        u = self._u(pts)
        live = u < 1.0 - 1e-3
        g = np.zeros_like(u)
        om = np.ones_like(u)
        np.exp(np.divide(-u, 1.0 - u, out=np.zeros_like(u), where=live), out=g, where=live)
        om[live] = 1.0 - u[live]
        return live, g, om

    def __call__(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        _, g, _ = self._profile(pts)
        out = self.height * g
        return out[0] if single else out

    def gradient(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        live, g, om = self._profile(pts)
        dpro = np.where(live, -g / om**2, 0.0)
        grad_u = np.stack([p(pts) for p in self._grad_u], axis=-1)
        out = self.height * dpro[:, None] * grad_u
        return out[0] if single else out

    def hessian(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        live, g, om = self._profile(pts)
        dpro = np.where(live, -g / om**2, 0.0)
        d2pro = np.where(live, g / om**4 - 2.0 * g / om**3, 0.0)
        grad_u = np.stack([p(pts) for p in self._grad_u], axis=-1)
        n = self.group.n
        hess_u = np.empty((pts.shape[0], n, n))
        for i in range(n):
            for j in range(i, n):
                vals = self._hess_u[i][j](pts)
                hess_u[:, i, j] = vals
                hess_u[:, j, i] = vals
        out = self.height * (
            d2pro[:, None, None] * np.einsum("ni,nj->nij", grad_u, grad_u)
            + dpro[:, None, None] * hess_u
        )
        return out[0] if single else out


def _gauge_power_polynomial(group, center, radius):
    """||center^-1 o y||^(2s!) / radius^(2s!) as a polynomial in y."""
    from .polynomials import left_translation_polys

    comps = left_translation_polys(group, -np.asarray(center, dtype=float))
    order = group.gauge_order
    total = HomogeneousPolynomial.zero(group)
    for i in range(1, group.step + 1):
        sl = group.layer_slice(i)
        sq = HomogeneousPolynomial.zero(group)
        for b in range(sl.start, sl.stop):
            sq = sq + comps[b] * comps[b]
        total = total + sq.power(order // (2 * i))
    return total * (1.0 / radius**order)


class PolynomialBump(TestFunction):
    """Product of a polynomial with a gauge bump; exact jets via product rule."""

    def __init__(self, poly, bump):
        if poly.group != bump.group:
            raise StructureError("polynomial and bump live on different groups")
        self.group = bump.group
        self.poly = poly
        self.bump = bump
        self.support = bump.support
        self._grad_p = poly.gradient_polys()
        self._hess_p = [[g.partial(j) for j in range(self.group.n)] for g in self._grad_p]

    def __call__(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        out = self.poly(pts) * self.bump(pts)
        return out[0] if single else out

    def gradient(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        p = self.poly(pts)
        b = self.bump(pts)
        gp = np.stack([q(pts) for q in self._grad_p], axis=-1)
        gb = self.bump.gradient(pts)
        out = p[:, None] * gb + b[:, None] * gp
        return out[0] if single else out

    def hessian(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        n = self.group.n
        p = self.poly(pts)
        b = self.bump(pts)
        gp = np.stack([q(pts) for q in self._grad_p], axis=-1)
        gb = self.bump.gradient(pts)
        hb = self.bump.hessian(pts)
        hp = np.empty((pts.shape[0], n, n))
        for i in range(n):
            for j in range(i, n):
                vals = self._hess_p[i][j](pts)
                hp[:, i, j] = vals
                hp[:, j, i] = vals
        cross = np.einsum("ni,nj->nij", gp, gb)
        out = (
            p[:, None, None] * hb
            + b[:, None, None] * hp
            + cross
            + np.transpose(cross, (0, 2, 1))
        )
        return out[0] if single else out


class CustomFunction(TestFunction):
    """Wrap plain callables; analytic jets are optional."""

    def __init__(self, group, fun, gradient=None, hessian=None, support=None, smoothness=math.inf):
        self.group = group
        self._fun = fun
        self.support = support
        self.smoothness = smoothness
        if gradient is not None:
            self.gradient = gradient
        if hessian is not None:
            self.hessian = hessian

    def __call__(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        out = np.asarray(self._fun(pts), dtype=float).reshape(pts.shape[0])
        return out[0] if single else out


class ProductFunction(TestFunction):
    """Pointwise product of several functions (used for inequality LHS).

    The declared support is the smallest factor support: the product
    vanishes outside the intersection, so integrating over that ball is
    exact for compactly supported factors.
    """

    def __init__(self, group, factors):
        self.group = group
        self.factors = list(factors)
        supports = [
            sup for sup in (getattr(f, "support", None) for f in self.factors) if sup is not None
        ]
        self.support = min(supports, key=lambda b: b.radius) if supports else None

    def __call__(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        out = np.ones(pts.shape[0])
        for f in self.factors:
            out = out * np.asarray(f(pts), dtype=float).reshape(pts.shape[0])
        return out[0] if single else out


class HorizontalDerivativeMagnitude(TestFunction):
    """|X^alpha f| as an evaluable, optionally restricted to a ball."""

    def __init__(self, group, f, alpha, restrict_to=None):
        self.group = group
        self.f = f
        self.alpha = tuple(int(a) for a in alpha)
        self.restrict_to = restrict_to
        self.support = restrict_to if restrict_to is not None else getattr(f, "support", None)

    def __call__(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        vals = np.abs(
            np.atleast_1d(horizontal_derivative(self.group, self.f, self.alpha, pts))
        )
        if self.restrict_to is not None:
            vals = vals * self.restrict_to.contains(self.group, pts)
        return vals[0] if single else vals


class SubLaplacianMagnitude(TestFunction):
    """|L f| as an evaluable."""

    def __init__(self, group, f):
        self.group = group
        self.f = f
        self.support = getattr(f, "support", None)

    def __call__(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        vals = np.abs(np.atleast_1d(sub_laplacian(self.group, self.f, pts)))
        return vals[0] if single else vals


class TranslatedFunction(TestFunction):
    """Left translate: x -> f(g^-1 o x), with exact jets (the map is affine)."""

    def __init__(self, group, g, f):
        self.group = group
        self.shift = np.asarray(g, dtype=float).reshape(-1)
        self.f = f
        self.smoothness = getattr(f, "smoothness", math.inf)
        sup = getattr(f, "support", None)
        if sup is not None:
            self.support = GaugeBall(group.compose(self.shift, sup.center), sup.radius)
        self._jac = _left_translation_jacobian(group, group.inverse(self.shift))
        if getattr(f, "gradient", None) is not None:
            self.gradient = self._gradient
        if getattr(f, "hessian", None) is not None:
            self.hessian = self._hessian

    def _pull(self, pts):
        return self.group.compose(self.group.inverse(self.shift), pts)

    def __call__(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        out = np.asarray(self.f(self._pull(pts)), dtype=float).reshape(pts.shape[0])
        return out[0] if single else out

    def _gradient(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        g = np.asarray(self.f.gradient(self._pull(pts)), dtype=float)
        out = np.einsum("ui,nu->ni", self._jac, g)
        return out[0] if single else out

    def _hessian(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        h = np.asarray(self.f.hessian(self._pull(pts)), dtype=float)
        out = np.einsum("ui,nuv,vj->nij", self._jac, h, self._jac)
        return out[0] if single else out


def _left_translation_jacobian(group, g):
    """Constant Jacobian of x -> g o x (the law is affine in x)."""
    n = group.n
    jac = np.eye(n)
    if group.step == 2:
        for j in range(group.n2):
            jac[group.n1 + j, : group.n1] += 0.5 * np.einsum(
                "a,ab->b", g[: group.n1], group.forms[j]
            )
    return jac


class DilatedArgument(TestFunction):
    """x -> f(delta_lam x); support shrinks to delta_{1/lam}(support)."""

    def __init__(self, group, lam, f):
        if lam <= 0:
            raise DomainError("dilation parameter must be positive")
        self.group = group
        self.lam = float(lam)
        self.f = f
        self.smoothness = getattr(f, "smoothness", math.inf)
        sup = getattr(f, "support", None)
        if sup is not None:
            self.support = GaugeBall(group.dilate(1.0 / lam, sup.center), sup.radius / lam)
        self._scale = lam**group.weights
        if getattr(f, "gradient", None) is not None:
            self.gradient = self._gradient
        if getattr(f, "hessian", None) is not None:
            self.hessian = self._hessian

    def __call__(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        out = np.asarray(self.f(pts * self._scale), dtype=float).reshape(pts.shape[0])
        return out[0] if single else out

    def _gradient(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        g = np.asarray(self.f.gradient(pts * self._scale), dtype=float)
        out = g * self._scale
        return out[0] if single else out

    def _hessian(self, pts):
        pts, single = _as_batch(pts, self.group.n)
        h = np.asarray(self.f.hessian(pts * self._scale), dtype=float)
        out = h * self._scale[None, :, None] * self._scale[None, None, :]
        return out[0] if single else out


def random_bump(group, rng, center_box=1.0, radius_range=(0.4, 1.5), height_range=(0.5, 2.0)):
    """Random gauge bump with center in a box and log-uniform radius."""
    center = rng.uniform(-center_box, center_box, size=group.n)
    lo, hi = radius_range
    radius = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    height = rng.uniform(*height_range)
    return GaugeBump(group, center, radius, height)


def random_polynomial(group, rng, k, coeff_scale=1.0):
    """Random polynomial with homogeneous degree < k."""
    from .polynomials import monomial_basis

    terms = {}
    for alpha in monomial_basis(group, k):
        terms[alpha] = coeff_scale * rng.normal()
    return HomogeneousPolynomial(group, terms)
