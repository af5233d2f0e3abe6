"""Schwarz-Christoffel maps from marked circle configurations to polygons.

The map ``f(z) = int prod_k (1 - z / a_k) ** (-theta_k / pi) dz`` sends the
unit disk onto a polygon whose vertex ``f(a_k)`` has exterior angle
``theta_k``.  On the arc between consecutive prevertices the integrand has
constant phase, so each edge length is the real integral

    int |prod_j 2 sin((t - alpha_j) / 2)| ** (-theta_j / pi) dt

over the arc.  The two endpoint singularities are absorbed into a
Gauss-Jacobi weight; the remaining factor is smooth unless another
prevertex sits close by, which recursive bisection takes care of.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares
from scipy.special import roots_jacobi

from .errors import QuadratureError, ValidationError
from .polygon import area_matrix, as_order, validate_weights

TWO_PI = 2.0 * math.pi
QUAD_RTOL = 1e-13
BASE_NODES = 24
MAX_DEPTH = 48


@dataclass(frozen=True, eq=False)
class CircleConfiguration:
    """Distinct increasing angles on the circle, each carrying a mark."""

    alpha: np.ndarray
    marks: tuple

    def __post_init__(self):
        a = np.array(self.alpha, dtype=float)
        marks = tuple(int(m) for m in self.marks)
        if a.ndim != 1 or a.shape[0] != len(marks):
            raise ValidationError("need one angle per mark")
        if sorted(marks) != list(range(1, len(marks) + 1)):
            raise ValidationError(f"marks {marks} are not a permutation")
        if np.any(a < 0) or np.any(a >= TWO_PI):
            raise ValidationError("angles must lie in [0, 2 pi)")
        if np.any(np.diff(a) <= 0):
            raise ValidationError("angles must be strictly increasing (no collisions)")
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "marks", marks)

    @property
    def n(self) -> int:
        return len(self.marks)

    @classmethod
    def from_points(cls, angles, marks) -> "CircleConfiguration":
        """Sort arbitrary angles (mod 2 pi) while keeping each mark attached."""
        a = np.mod(np.asarray(angles, dtype=float), TWO_PI)
        idx = np.argsort(a, kind="stable")
        return cls(a[idx], tuple(int(marks[i]) for i in idx))

    @classmethod
    def regular(cls, marks) -> "CircleConfiguration":
        marks = tuple(marks)
        n = len(marks)
        return cls(TWO_PI * np.arange(n) / n, marks)

    def starting_at(self, mark: int) -> tuple:
        """Marks listed in circular order from ``mark``."""
        k = self.marks.index(mark)
        return self.marks[k:] + self.marks[:k]

    def moebius(self, a: complex, psi: float = 0.0) -> "CircleConfiguration":
        """Image under the disk automorphism ``z -> e^{i psi} (z - a) / (1 - conj(a) z)``."""
        if abs(a) >= 1:
            raise ValidationError("the automorphism parameter must lie inside the disk")
        z = np.exp(1j * self.alpha)
        w = np.exp(1j * psi) * (z - a) / (1 - np.conj(a) * z)
        return CircleConfiguration.from_points(np.angle(w), self.marks)


def _exponents(config: CircleConfiguration, theta) -> np.ndarray:
    t = np.asarray(theta, dtype=float)
    if t.shape != (config.n,):
        raise ValidationError("weights and configuration sizes differ")
    return t[np.asarray(config.marks) - 1] / math.pi


@lru_cache(maxsize=256)
def _jacobi(nodes: int, ea: float, eb: float):
    # scipy's weight is (1 - x)^alpha (1 + x)^beta; x = -1 is the left end
    x, w = roots_jacobi(nodes, eb, ea)
    return x, w


class _Arc:
    """Density on one arc in local coordinates ``s = t - alpha_k``.

    Distances to the two end prevertices are formed as ``s`` and ``L - s``
    so they keep full relative precision however close a node gets.
    """

    def __init__(self, k, alpha, beta):
        n = alpha.shape[0]
        self.length = (alpha[k + 1] if k + 1 < n else alpha[0] + TWO_PI) - alpha[k]
        self.b_left = beta[k]
        self.b_right = beta[(k + 1) % n]
        others = [j for j in range(n) if j not in (k, (k + 1) % n)]
        end = alpha[(k + 1) % n]
        # circular gaps from the arc ends to every other prevertex
        self.gap_right = np.mod(alpha[others] - end, TWO_PI)
        self.gap_left = np.mod(alpha[k] - alpha[others], TWO_PI)
        self.beta_o = beta[others]

    def log_density(self, d_left, d_right):
        out = -self.b_left * np.log(2.0 * np.sin(d_left / 2.0))
        out -= self.b_right * np.log(2.0 * np.sin(d_right / 2.0))
        x = np.minimum(self.gap_right[None, :] + d_right[:, None],
                       self.gap_left[None, :] + d_left[:, None])
        d = 2.0 * np.sin(x / 2.0)
        return out - np.sum(self.beta_o[None, :] * np.log(d), axis=1)

    def rule(self, s0, s1, nodes):
        ea = -self.b_left if s0 == 0.0 else 0.0
        eb = -self.b_right if s1 == self.length else 0.0
        half = 0.5 * (s1 - s0)
        x, w = _jacobi(nodes, round(ea, 15), round(eb, 15))
        d_left = s0 + half * (1.0 + x)
        d_right = (self.length - s1) + half * (1.0 - x)
        log_w = ea * np.log(half * (1.0 + x)) + eb * np.log(half * (1.0 - x))
        smooth = np.exp(self.log_density(d_left, d_right) - log_w)
        return float(np.sum(w * smooth) * half ** (1.0 + ea + eb))

    def integrate(self, s0=0.0, s1=None, depth=0):
        if s1 is None:
            s1 = self.length
        coarse = self.rule(s0, s1, BASE_NODES)
        fine = self.rule(s0, s1, 2 * BASE_NODES)
        if abs(fine - coarse) <= QUAD_RTOL * abs(fine):
            return fine
        if depth >= MAX_DEPTH:
            raise QuadratureError("arc integral did not converge", residual=abs(fine - coarse))
        m = 0.5 * (s0 + s1)
        return self.integrate(s0, m, depth + 1) + self.integrate(m, s1, depth + 1)


def arc_lengths(config: CircleConfiguration, theta) -> np.ndarray:
    """Raw (unnormalized) edge lengths; edge ``k`` is the image of arc ``k``."""
    alpha = config.alpha
    beta = _exponents(config, theta)
    return np.array([_Arc(k, alpha, beta).integrate() for k in range(config.n)])


def edge_phases(config: CircleConfiguration, theta) -> np.ndarray:
    """Argument of ``f'(z) dz`` on each arc, from the principal branches of the factors.

    With ``u_j = (t - alpha_j) mod 2 pi`` each factor ``1 - z / a_j`` has
    argument ``(u_j - pi) / 2``; the phase is evaluated at the arc midpoint.
    """
    alpha = config.alpha
    beta = _exponents(config, theta)
    n = config.n
    out = np.empty(n)
    for k in range(n):
        b = alpha[k + 1] if k + 1 < n else alpha[0] + TWO_PI
        t = 0.5 * (alpha[k] + b)
        u = np.mod(t - alpha, TWO_PI)
        out[k] = t + math.pi / 2.0 - float(np.sum(beta * (u - math.pi) / 2.0))
    return out


@dataclass
class SCPolygon:
    marks: tuple
    lengths: np.ndarray
    edges: np.ndarray
    closure_residual: float
    exterior_angles: np.ndarray
    area: float


def sc_polygon(config: CircleConfiguration, theta) -> SCPolygon:
    """Integrated polygon of a configuration, scaled to unit area."""
    w = validate_weights(theta)
    raw = arc_lengths(config, w.theta)
    phases = edge_phases(config, w.theta)
    edges = raw * np.exp(1j * phases)
    mat = area_matrix(config.marks, w.theta)
    area = float(raw @ mat @ raw)
    if area <= 0:
        raise QuadratureError("integrated polygon has nonpositive area", residual=area)
    scale = 1.0 / math.sqrt(area)
    lengths = raw * scale
    edges = edges * scale
    closure = float(abs(np.sum(edges)))
    turns = np.mod(np.angle(np.roll(edges, -1) / edges), TWO_PI)
    # the turn from edge k to edge k+1 happens at the vertex of mark k+1
    ext = np.roll(turns, 1)
    return SCPolygon(config.marks, lengths, edges, closure, ext, area * scale * scale)


def sc_edge_lengths(config: CircleConfiguration, theta, closure_tol: float = 1e-8) -> np.ndarray:
    """Unit-area edge lengths of the Schwarz-Christoffel polygon.

    Edge ``k`` runs from the vertex of ``config.marks[k]`` to the next one.
    """
    poly = sc_polygon(config, theta)
    if poly.closure_residual > closure_tol:
        raise QuadratureError("integrated polygon does not close",
                              residual=poly.closure_residual)
    return poly.lengths


# --------------------------------------------------------------------------- inverse


@dataclass
class RoundtripResult:
    residual: float
    config: CircleConfiguration
    success: bool
    nfev: int

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "alpha": [float(a) for a in self.config.alpha],
            "marks": list(self.config.marks),
            "success": self.success,
            "nfev": self.nfev,
        }


def _config_from_logits(z, n, marks):
    """Three prevertices pinned at ``0, 2 pi/n, 4 pi/n``; the rest spread by softmax."""
    start = 2.0 * TWO_PI / n
    span = TWO_PI - start
    logits = np.concatenate([[0.0], z])
    g = np.exp(logits - np.max(logits))
    g = g / np.sum(g)
    rest = start + span * np.cumsum(g)[:-1]
    alpha = np.concatenate([[0.0, TWO_PI / n, start], rest])
    return CircleConfiguration(alpha, marks)


def _unit_area(x, order, theta):
    x = np.asarray(x, dtype=float)
    area = float(x @ area_matrix(order, theta) @ x)
    if area <= 0:
        raise ValidationError("target polygon must have positive area")
    return x / math.sqrt(area)


def roundtrip_check(x, p, theta, max_nfev: int = 400) -> RoundtripResult:
    """Recover a configuration whose polygon is similar to ``x`` and report the mismatch.

    The residual is the largest difference of unit-area edge lengths between
    ``x`` and the polygon of the recovered configuration.
    """
    order = as_order(p)
    w = validate_weights(theta)
    x = np.asarray(x, dtype=float)
    if x.shape != (len(order),) or np.any(x <= 0):
        raise ValidationError("roundtrip needs a positive edge vector of matching length")
    target = _unit_area(x, order, w.theta)
    n = len(order)

    def resid(z):
        cfg = _config_from_logits(z, n, order)
        return arc_lengths_unit(cfg, w.theta) - target

    sol = least_squares(resid, np.zeros(n - 3), xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        max_nfev=max_nfev)
    cfg = _config_from_logits(sol.x, n, order)
    final = float(np.max(np.abs(arc_lengths_unit(cfg, w.theta) - target)))
    return RoundtripResult(final, cfg, bool(final < 1e-6), int(sol.nfev))


def arc_lengths_unit(config: CircleConfiguration, theta) -> np.ndarray:
    raw = arc_lengths(config, theta)
    return _unit_area(raw, config.marks, theta)


def spread(values: Sequence[float]) -> float:
    v = np.asarray(values, dtype=float)
    return float((np.max(v) - np.min(v)) / np.max(np.abs(v)))
