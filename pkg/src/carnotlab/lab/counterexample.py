"""The smoothed-ramp family showing second-order Poincare fails for p < 1.

The ramp profile is built from the C^1 transition

    phi(t) = (t + 1)^2 (2 - t) / 4   on [-1, 1],

which satisfies phi(-1) = 0, phi(1) = 1, phi'(-1) = phi'(1) = 0,
int_{-1}^1 phi = 1, and 0 <= phi <= 1.  Its antiderivative

    Psi(t) = (t + 1)^3 / 4 - (t + 1)^4 / 16

defines psi (0 for t <= -1, Psi on [-1, 1], t for t >= 1) and the family
f_eps(x) = eps * psi(x / eps).  Then int |f_eps''|^p = eps^(1-p) int |phi'|^p
shrinks to 0 for p < 1 while the best-affine L^q distance of f_eps on
[-1, 1] stays bounded below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

_GL_NODES = 400
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def phi(t):
    t = np.asarray(t, dtype=float)
    return (t + 1.0) ** 2 * (2.0 - t) / 4.0


def phi_prime(t):
    t = np.asarray(t, dtype=float)
    return 3.0 * (t + 1.0) * (1.0 - t) / 4.0


def _psi_inner(t):
    return (t + 1.0) ** 3 / 4.0 - (t + 1.0) ** 4 / 16.0


def psi(t):
    t = np.asarray(t, dtype=float)
    return np.where(t <= -1.0, 0.0, np.where(t >= 1.0, t, _psi_inner(np.clip(t, -1.0, 1.0))))


def _gauss_nodes(a, b, n=_GL_NODES):
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


@dataclass
class CounterexampleFamily:
    """f_eps with analytic first and second derivatives."""

    eps: float

    def __post_init__(self):
        if not 0.0 < self.eps < 0.5:
            raise DomainError(f"eps must lie in (0, 1/2), got {self.eps}")
        _verify_profile()

    def value(self, x):
        return self.eps * psi(np.asarray(x, dtype=float) / self.eps)

    def first(self, x):
        t = np.asarray(x, dtype=float) / self.eps
        return np.where(t <= -1.0, 0.0, np.where(t >= 1.0, 1.0, phi(np.clip(t, -1.0, 1.0))))

    def second(self, x):
        t = np.asarray(x, dtype=float) / self.eps
        inner = (t > -1.0) & (t < 1.0)
        out = np.zeros_like(t)
        out[inner] = phi_prime(t[inner]) / self.eps
        return out

    __call__ = value


def _verify_profile(tol=1e-10):
    """Construction-time checks on phi; raises if the profile is wrong."""
    checks = {
        "phi(-1) = 0": abs(float(phi(-1.0))),
        "phi(1) = 1": abs(float(phi(1.0)) - 1.0),
        "phi'(-1) = 0": abs(float(phi_prime(-1.0))),
        "phi'(1) = 0": abs(float(phi_prime(1.0))),
    }
    x, w = _gauss_nodes(-1.0, 1.0)
    checks["int phi = 1"] = abs(float(np.dot(w, phi(x))) - 1.0)
    grid = np.linspace(-1.0, 1.0, 2001)
    vals = phi(grid)
    checks["range in [0,1]"] = max(0.0, float(-vals.min()), float(vals.max() - 1.0))
    bad = {name: err for name, err in checks.items() if err > tol}
    if bad:
        raise DomainError(f"ramp profile constraints violated: {bad}")


def counterexample_family(eps):
    return CounterexampleFamily(float(eps))


class RampFunction:
    """The family lifted to a Euclidean group: g_eps(x) = f_eps(x_1).

    C^2 but not C^3 (the profile's second derivative has corner points),
    so derivative requests beyond order 2 raise a capability error.
    """

    support = None
    smoothness = 2

    def __init__(self, group, eps):
        if group.step != 1:
            raise DomainError("the ramp family lives on Euclidean groups")
        self.group = group
        self.family = CounterexampleFamily(float(eps))

    def __call__(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.family.value(pts[:, 0])

    def gradient(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.zeros_like(pts)
        out[:, 0] = self.family.first(pts[:, 0])
        return out

    def hessian(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        n = self.group.n
        out = np.zeros((pts.shape[0], n, n))
        out[:, 0, 0] = self.family.second(pts[:, 0])
        return out


def phi_prime_lp(p, nodes=_GL_NODES):
    """int_{-1}^1 |phi'|^p dt."""
    x, w = _gauss_nodes(-1.0, 1.0, nodes)
    return float(np.dot(w, np.abs(phi_prime(x)) ** p))


def second_derivative_lp(family, p, nodes=_GL_NODES):
    """R(eps) = int_{-1}^1 |f_eps''|^p dx (the integrand lives on [-eps, eps])."""
    x, w = _gauss_nodes(-family.eps, family.eps, nodes)
    return float(np.dot(w, np.abs(family.second(x)) ** p))


def _piecewise_nodes(eps, per_piece=_GL_NODES):
    pieces = [(-1.0, -eps), (-eps, eps), (eps, 1.0)]
    xs, ws = [], []
    for a, b in pieces:
        x, w = _gauss_nodes(a, b, per_piece)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _golden_section(fun, lo, hi, tol):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return x, fun(x)


def affine_infimum(family, q, *, coarse=200, box=2.0, tol=1e-6, max_sweeps=60):
    """L(eps) = inf over (a, b) of int_{-1}^1 |f_eps(x) - (a x + b)|^q dx.

    Coarse grid on [-box, box]^2 guards against local minima (needed for
    q < 1), then coordinate-wise golden-section refinement to `tol`.
    """
    x, w = _piecewise_nodes(family.eps)
    fvals = family.value(x)

    def objective(a, b):
        return float(np.dot(w, np.abs(fvals - a * x - b) ** q))

    grid = np.linspace(-box, box, coarse)
    best = (math.inf, 0.0, 0.0)
    for a in grid:
        resid = fvals - a * x
        vals = np.abs(resid[None, :] - grid[:, None]) ** q @ w
        j = int(np.argmin(vals))
        if vals[j] < best[0]:
            best = (float(vals[j]), float(a), float(grid[j]))
    _, a, b = best
    value = best[0]
    converged = False
    for _ in range(max_sweeps):
        a_new, _ = _golden_section(lambda t: objective(t, b), a - 0.5, a + 0.5, tol)
        b_new, value_new = _golden_section(lambda t: objective(a_new, t), b - 0.5, b + 0.5, tol)
        moved = max(abs(a_new - a), abs(b_new - b))
        a, b, value = a_new, b_new, value_new
        if moved < tol:
            converged = True
            break
    return {"value": value, "a": a, "b": b, "converged": converged}


def affine_distance_floor(q, tol=1e-8):
    """A positive floor for L(eps), uniform in eps.

    On [1/2, 1] the ramp equals x and on [-1, -1/2] it vanishes, which
    reduces the best-affine distance to inf_b int_{1/2}^1 |x - 2b|^q dx > 0.
    """
    x, w = _gauss_nodes(0.5, 1.0)

    def fun(c):
        return float(np.dot(w, np.abs(x - c) ** q))

    _, value = _golden_section(fun, -1.0, 3.0, tol)
    return value


def counterexample_report(p, q, eps_list, *, coarse=200, tol=1e-6):
    """Per-eps table: R(eps), its predicted scaling, L(eps), and the ratio
    L^(1/q) / R^(1/p)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"the failure regime needs 0 < p < 1, got p = {p}")
    if not q > 0.0:
        raise DomainError(f"q must be positive, got {q}")
    profile_mass = phi_prime_lp(p)
    rows = []
    for eps in eps_list:
        family = counterexample_family(eps)
        r_val = second_derivative_lp(family, p)
        opt = affine_infimum(family, q, coarse=coarse, tol=tol)
        ratio = opt["value"] ** (1.0 / q) / r_val ** (1.0 / p) if r_val > 0 else math.inf
        rows.append(
            {
                "eps": float(eps),
                "R": r_val,
                "R_predicted": float(eps) ** (1.0 - p) * profile_mass,
                "L": opt["value"],
                "a": opt["a"],
                "b": opt["b"],
                "ratio": ratio,
                "converged": opt["converged"],
            }
        )
    return rows


def fit_scaling_slope(rows):
    """Slope of log R vs log eps across the table; should be 1 - p."""
    if len(rows) < 2:
        return math.nan
    eps = np.log([row["eps"] for row in rows])
    rv = np.log([row["R"] for row in rows])
    eps = eps - eps.mean()
    return float(np.dot(eps, rv - rv.mean()) / np.dot(eps, eps))
