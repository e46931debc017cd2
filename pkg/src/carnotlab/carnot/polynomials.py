"""Polynomials graded by homogeneous degree.

A monomial x^alpha has homogeneous degree |alpha|_G = sum_i sigma_i alpha_i
where sigma_i is the layer index of coordinate i; the degree of a polynomial
is the maximum over its nonzero terms.  Monomial bases of degree < k are
ordered graded-lexicographically with x_1 > x_2 > ... .
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError, StructureError


def weighted_degree(group, alpha):
    """Homogeneous degree |alpha|_G of a multi-index."""
    return int(sum(int(s) * a for s, a in zip(group.weights, alpha)))


class HomogeneousPolynomial:
    """Sparse polynomial on a group: map multi-index -> coefficient."""

    __slots__ = ("group", "terms")

    def __init__(self, group, terms=None):
        self.group = group
        self.terms = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != group.n:
                raise StructureError(f"multi-index length {len(alpha)} != {group.n}")
            if any(a < 0 for a in alpha):
                raise StructureError("multi-index entries must be nonnegative")
            c = float(c)
            if c != 0.0:
                self.terms[alpha] = self.terms.get(alpha, 0.0) + c
        self.terms = {a: c for a, c in self.terms.items() if c != 0.0}

    @classmethod
    def zero(cls, group):
        return cls(group, {})

    @classmethod
    def constant(cls, group, c):
        return cls(group, {(0,) * group.n: c})

    @classmethod
    def coordinate(cls, group, i):
        alpha = [0] * group.n
        alpha[i] = 1
        return cls(group, {tuple(alpha): 1.0})

    def degree(self):
        """Homogeneous degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(weighted_degree(self.group, a) for a in self.terms)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        if pts.shape[-1] != self.group.n:
            raise StructureError("point dimension mismatch")
        out = np.zeros(pts.shape[0])
        for alpha, c in self.terms.items():
            mono = np.full(pts.shape[0], c)
            for i, a in enumerate(alpha):
                if a:
                    mono *= pts[:, i] ** a
            out += mono
        return out[0] if single else out

    # -- algebra ----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms.get(a, 0.0) + c
        return HomogeneousPolynomial(self.group, terms)

    def __sub__(self, other):
        return self + (self._coerce(other) * -1.0)

    def __mul__(self, other):
        if np.isscalar(other):
            return HomogeneousPolynomial(
                self.group, {a: c * float(other) for a, c in self.terms.items()}
            )
        other = self._coerce(other)
        terms = {}
        for a1, c1 in self.terms.items():
            for a2, c2 in other.terms.items():
                key = tuple(x + y for x, y in zip(a1, a2))
                terms[key] = terms.get(key, 0.0) + c1 * c2
        return HomogeneousPolynomial(self.group, terms)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, HomogeneousPolynomial):
            if other.group != self.group:
                raise StructureError("polynomials live on different groups")
            return other
        if np.isscalar(other):
            return HomogeneousPolynomial.constant(self.group, float(other))
        raise TypeError(f"cannot combine polynomial with {type(other)!r}")

    def partial(self, i):
        """Partial derivative d/dx_i."""
        terms = {}
        for alpha, c in self.terms.items():
            if alpha[i] == 0:
                continue
            new = list(alpha)
            new[i] -= 1
            key = tuple(new)
            terms[key] = terms.get(key, 0.0) + c * alpha[i]
        return HomogeneousPolynomial(self.group, terms)

    def power(self, m):
        if m < 0:
            raise DomainError("polynomial powers must be nonnegative")
        out = HomogeneousPolynomial.constant(self.group, 1.0)
        for _ in range(int(m)):
            out = out * self
        return out

    def substitute(self, replacements):
        """Compose: substitute replacements[i] (a polynomial) for x_i."""
        if len(replacements) != self.group.n:
            raise StructureError("need one replacement polynomial per coordinate")
        out = HomogeneousPolynomial.zero(self.group)
        for alpha, c in self.terms.items():
            term = HomogeneousPolynomial.constant(self.group, c)
            for i, a in enumerate(alpha):
                if a:
                    term = term * replacements[i].power(a)
            out = out + term
        return out

    def gradient_polys(self):
        return [self.partial(i) for i in range(self.group.n)]

    def to_dict(self):
        return {",".join(map(str, a)): c for a, c in sorted(self.terms.items())}


def left_translation_polys(group, g):
    """Components of g o y as polynomials in y (the law is affine in y)."""
    g = np.asarray(g, dtype=float).reshape(-1)
    comps = []
    for i in range(group.n):
        comps.append(HomogeneousPolynomial.coordinate(group, i) + float(g[i]))
    if group.step == 2:
        for j in range(group.n2):
            row = np.einsum("a,ab->b", g[: group.n1], group.forms[j])
            cross = HomogeneousPolynomial(
                group,
                {
                    tuple(1 if i == b else 0 for i in range(group.n)): 0.5 * row[b]
                    for b in range(group.n1)
                    if row[b] != 0.0
                },
            )
            comps[group.n1 + j] = comps[group.n1 + j] + cross
    return comps


def grlex_key(group, alpha):
    """Sort key: graded (by |alpha|_G) lexicographic with x_1 > x_2 > ..."""
    return (weighted_degree(group, alpha), tuple(-a for a in alpha))


def monomial_basis(group, k):
    """All multi-indices alpha with |alpha|_G < k, in graded-lex order."""
    if k < 1:
        raise DomainError("polynomial degree bound k must be >= 1")
    sigma = [int(s) for s in group.weights]
    alphas = []
    stack = [((), 0)]
    while stack:
        prefix, deg = stack.pop()
        i = len(prefix)
        if i == group.n:
            alphas.append(prefix)
            continue
        a = 0
        while deg + a * sigma[i] < k:
            stack.append((prefix + (a,), deg + a * sigma[i]))
            a += 1
    return sorted(alphas, key=lambda a: grlex_key(group, a))


def vandermonde(group, basis, pts):
    """Design matrix of monomials at points: (N, len(basis))."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    cols = []
    for alpha in basis:
        col = np.ones(pts.shape[0])
        for i, a in enumerate(alpha):
            if a:
                col = col * pts[:, i] ** a
        cols.append(col)
    return np.column_stack(cols)
