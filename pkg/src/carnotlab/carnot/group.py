"""Group law, anisotropic dilations, and the homogeneous gauge quasi-metric.

Supported groups: Euclidean R^n (step 1), Heisenberg H^k, and a general
step-2 family parameterized by skew-symmetric forms.  Points live in
exponential coordinates, so the identity is the origin and the inverse of
x is -x.  The Carnot-Caratheodory metric is replaced throughout by the
equivalent homogeneous gauge distance d(x, y) = ||x^-1 o y|| with the
layered gauge

    ||x|| = (sum_i |x^(i)|_2^(2s!/i))^(1/(2s!)),

which reduces to the Euclidean norm for step 1 and to the Koranyi-type
gauge ((x^2+y^2)^2 + t^2)^(1/4) on H^1.  Gauge balls then satisfy the
volume identity |B(x, r)| = c_d r^Q exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, StructureError


class CarnotGroup:
    """Homogeneous group of step 1 or 2 on R^n in exponential coordinates.

    For step-2 groups the product is determined by a family of
    skew-symmetric forms B_j, one per second-layer coordinate:

        (x, z) o (x', z')  =  (x + x', z_j + z'_j + (1/2) x . B_j x').

    Step-1 groups are Euclidean and the product is vector addition.
    """

    def __init__(self, ident, layers, forms=None):
        layers = tuple(int(m) for m in layers)
        if not layers or any(m < 1 for m in layers):
            raise StructureError(f"layer dimensions must be positive, got {layers}")
        if len(layers) > 2:
            raise StructureError("only groups of step 1 and 2 are supported")
        self.ident = str(ident)
        self.layers = layers
        self.step = len(layers)
        self.n = sum(layers)
        self.n1 = layers[0]
        self.n2 = layers[1] if self.step == 2 else 0
        if self.step == 2:
            forms = np.asarray(forms, dtype=float)
            if forms.shape != (self.n2, self.n1, self.n1):
                raise StructureError(
                    f"need {self.n2} forms of shape ({self.n1}, {self.n1}), got {forms.shape}"
                )
            if not np.allclose(forms, -np.transpose(forms, (0, 2, 1)), atol=1e-12):
                raise StructureError("second-layer forms must be skew-symmetric")
            self.forms = forms
        else:
            if forms is not None:
                raise StructureError("step-1 groups take no forms")
            self.forms = None
        # per-coordinate layer weight sigma_i (1 on the first layer, 2 on the second)
        self.weights = np.repeat(np.arange(1, self.step + 1, dtype=float), layers)
        self.homogeneous_dimension = int(sum((i + 1) * m for i, m in enumerate(layers)))
        self.gauge_order = 2 * math.factorial(self.step)

    def __repr__(self):
        return f"CarnotGroup({self.ident!r}, layers={self.layers})"

    def __eq__(self, other):
        return isinstance(other, CarnotGroup) and other.ident == self.ident

    def __hash__(self):
        return hash(self.ident)

    # -- coordinates ---------------------------------------------------------

    def identity(self):
        return np.zeros(self.n)

    def layer_slice(self, i):
        """Slice of coordinates in layer i (1-based)."""
        start = sum(self.layers[: i - 1])
        return slice(start, start + self.layers[i - 1])

    def _check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise StructureError(f"point dimension {x.shape[-1]} != group dimension {self.n}")
        return x

    # -- group operations ----------------------------------------------------

    def compose(self, g, h):
        """Group product g o h, broadcasting over leading axes."""
        g = self._check_point(g)
        h = self._check_point(h)
        g, h = np.broadcast_arrays(g, h)
        out = g + h
        if self.step == 2:
            out[..., self.n1 :] += 0.5 * np.einsum(
                "jab,...a,...b->...j", self.forms, g[..., : self.n1], h[..., : self.n1]
            )
        return out

    def inverse(self, g):
        return -self._check_point(g)

    def dilate(self, lam, x):
        """Anisotropic dilation: layer i scales by lam^i."""
        if not lam > 0:
            raise DomainError(f"dilation parameter must be positive, got {lam}")
        return self._check_point(x) * lam ** self.weights

    def gauge_norm(self, x):
        """Homogeneous gauge norm; exactly 1-homogeneous under dilations."""
        x = self._check_point(x)
        order = self.gauge_order
        total = 0.0
        for i in range(1, self.step + 1):
            sq = np.sum(x[..., self.layer_slice(i)] ** 2, axis=-1)
            total = total + sq ** (order / (2.0 * i))
        return total ** (1.0 / order)

    def distance(self, x, y):
        """Gauge quasi-distance ||x^-1 o y||; left-invariant and symmetric."""
        return self.gauge_norm(self.compose(self.inverse(x), y))


@dataclass(frozen=True, eq=False)
class GaugeBall:
    """Ball under the gauge quasi-metric: {y : d(center, y) < radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(-1))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise DomainError(f"ball radius must be positive, got {self.radius}")

    def contains(self, group, pts):
        return group.distance(self.center, pts) < self.radius

    def to_dict(self):
        return {"center": self.center.tolist(), "radius": self.radius}


def centered_box_extents(group, r):
    """Half-widths of the coordinate box containing the centered ball B(0, r).

    The gauge bounds each layer: |x^(i)|_2 < r^i, so each coordinate of
    layer i lies in (-r^i, r^i).
    """
    return r ** group.weights


def ball_box(group, ball):
    """Axis-aligned box containing a gauge ball.

    B(c, r) = c o B(0, r), and the left translation is affine; the
    second-layer coordinates pick up the cross term (1/2) c . B_j u with
    |u^(1)|_2 < r, bounded by (1/2) |B_j^T c^(1)|_2 r.
    """
    c = np.asarray(ball.center, dtype=float)
    ext = centered_box_extents(group, ball.radius)
    if group.step == 2:
        rows = np.einsum("jab,a->jb", group.forms, c[: group.n1])  # (n2, n1)
        ext = ext.copy()
        ext[group.n1 :] += 0.5 * np.linalg.norm(rows, axis=1) * ball.radius
    return c - ext, c + ext


# -- standard groups ---------------------------------------------------------


def euclidean_group(n):
    """Abelian group R^n with Euclidean gauge."""
    if n < 1:
        raise StructureError("dimension must be >= 1")
    return CarnotGroup(f"euclidean:{n}", (n,))


def heisenberg_group(k=1):
    """Heisenberg group H^k in coordinates (x_1..x_k, y_1..y_k, t).

    The product uses the 1/2-commutator law, matched to the generators
    X_i = d/dx_i - (y_i/2) d/dt and X_{k+i} = d/dy_i + (x_i/2) d/dt so that
    left invariance holds exactly.
    """
    if k < 1:
        raise StructureError("H^k requires k >= 1")
    form = np.zeros((1, 2 * k, 2 * k))
    form[0, :k, k:] = np.eye(k)
    form[0, k:, :k] = -np.eye(k)
    return CarnotGroup(f"heisenberg:{k}", (2 * k, 1), form)


def step_two_group(forms, ident=None):
    """General step-2 group from skew-symmetric forms of shape (n2, n1, n1)."""
    forms = np.asarray(forms, dtype=float)
    if forms.ndim != 3:
        raise StructureError("forms must have shape (n2, n1, n1)")
    n2, n1 = forms.shape[0], forms.shape[1]
    if ident is None:
        ident = f"step2:{n1}x{n2}"
    return CarnotGroup(ident, (n1, n2), forms)


def step_two_from_file(path):
    """Load a step-2 group from a JSON file with a "forms" array."""
    with open(path) as fh:
        data = json.load(fh)
    return step_two_group(np.asarray(data["forms"], dtype=float), ident=f"step2:{path}")


def group_from_id(ident):
    """Resolve a group from its string id.

    Accepted forms: "euclidean:<n>", "heisenberg:<k>", "step2:<json-file>".
    """
    kind, _, arg = str(ident).partition(":")
    if kind == "euclidean":
        return euclidean_group(int(arg))
    if kind == "heisenberg":
        return heisenberg_group(int(arg))
    if kind == "step2":
        return step_two_from_file(arg)
    raise StructureError(f"unknown group id {ident!r}")
