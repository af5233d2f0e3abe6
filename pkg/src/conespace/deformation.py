"""Weight deformations of the five- and six-point spaces.

Moving the weights away from the barycentre changes the closed geodesic
lengths of the five-point surface and the meridian traces of the six-point
cusps.  The maps below collect those quantities and their Jacobians along
the standard one-parameter paths through the barycentre are estimated by
central differences.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import NumericWarning, ValidationError
from .polygon import TWO_PI, WeightVector, validate_weights, weight_violations
from .polyhedron import closed_geodesic_length, n_function

PHI5_PAIRS = ((1, 5), (2, 5), (3, 5), (4, 5))
PHI6_MERIDIANS = ((1, 4, 5), (2, 3, 4), (2, 3, 5), (2, 4, 5), (3, 4, 5))
PARABOLIC_TOL = 1e-9
RANK_RTOL = 1e-7

F_PRIME_0 = -6.0 * math.sqrt(3.0)


def _theta(theta, n):
    t = np.asarray(theta, dtype=float)
    if t.shape != (n,):
        raise ValidationError(f"expected {n} weights, got shape {t.shape}")
    return t


def phi5(theta) -> np.ndarray:
    """Lengths of the closed geodesics ``(15), (25), (35), (45)``."""
    t = _theta(theta, 5)
    return np.array([closed_geodesic_length(p, t) for p in PHI5_PAIRS])


@dataclass(frozen=True)
class MeridianLabel:
    triple: tuple

    def __post_init__(self):
        t = tuple(sorted(int(m) for m in self.triple))
        if len(set(t)) != 3 or not all(1 <= m <= 6 for m in t):
            raise ValidationError(f"meridian needs three distinct marks in 1..6, got {t}")
        object.__setattr__(self, "triple", t)

    def __str__(self):
        return "m" + "".join(str(m) for m in self.triple)

    def complement(self) -> "MeridianLabel":
        return MeridianLabel(tuple(m for m in range(1, 7) if m not in self.triple))


def _triple(m) -> tuple:
    return m.triple if isinstance(m, MeridianLabel) else MeridianLabel(tuple(m)).triple


def trace_meridian(m, theta) -> float:
    """Trace of the meridian around a triple-collision locus: ``2 N``."""
    t = _theta(theta, 6)
    return 2.0 * n_function(*_triple(m), t)


class MeridianClass(str, Enum):
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"


def classify_meridian(m, theta, tol: float = PARABOLIC_TOL) -> MeridianClass:
    """Rotation, parabolic or hyperbolic according to the sign of ``triple sum - pi``."""
    t = _theta(theta, 6)
    s = float(sum(t[i - 1] for i in _triple(m)))
    if abs(s - math.pi) < tol:
        return MeridianClass.PARABOLIC
    return MeridianClass.ELLIPTIC if s < math.pi else MeridianClass.HYPERBOLIC


def phi6(theta) -> np.ndarray:
    """Traces of the meridians ``m145, m234, m235, m245, m345``."""
    t = _theta(theta, 6)
    return np.array([trace_meridian(m, t) for m in PHI6_MERIDIANS])


def f_closed_form(t: float) -> float:
    """The common non-constant component of ``phi6`` along the standard paths."""
    s3 = math.sin(math.pi / 3.0)
    num = s3 * math.sin(math.pi / 3.0 - t) - s3 * math.sin(t) - 2.0 * math.sin(t) * math.sin(
        math.pi / 3.0 - t)
    return 2.0 * num / math.sin(2.0 * math.pi / 3.0 - t) ** 2


# --------------------------------------------------------------------------- paths


@dataclass(frozen=True)
class ThetaPath:
    """``base + t * direction`` with ``direction`` one ``+1`` and one ``-1`` entry."""

    base: np.ndarray
    plus: int
    minus: int

    @property
    def direction(self) -> np.ndarray:
        d = np.zeros(len(self.base))
        d[self.plus - 1] += 1.0
        d[self.minus - 1] -= 1.0
        return d

    def __call__(self, t: float) -> np.ndarray:
        return np.asarray(self.base, dtype=float) + t * self.direction

    def max_step(self) -> float:
        """Largest ``|t|`` for which the path stays inside the admissible set."""
        b = np.asarray(self.base, dtype=float)
        d = self.direction
        bound = math.inf
        n = b.shape[0]
        for i in range(n):
            for j in range(i + 1, n):
                s, v = b[i] + b[j], d[i] + d[j]
                if v != 0:
                    bound = min(bound, s / abs(v), (math.pi - s) / abs(v))
        return bound


def equal_base(n: int) -> np.ndarray:
    return np.full(n, TWO_PI / n)


def phi5_paths(base=None) -> list[ThetaPath]:
    b = equal_base(5) if base is None else np.asarray(base, dtype=float)
    return [ThetaPath(b, j, j + 1) for j in range(1, 5)]


def phi6_paths(base=None) -> list[ThetaPath]:
    b = equal_base(6) if base is None else np.asarray(base, dtype=float)
    return [ThetaPath(b, 6, j) for j in range(1, 6)]


# --------------------------------------------------------------------------- jacobians


@dataclass
class JacobianReport:
    """Derivatives of a deformation map along a set of paths.

    Row ``j`` of ``matrix`` is the derivative of the map along path ``j``.
    """

    map_name: str
    matrix: np.ndarray
    rank: int
    determinant: float
    h: float
    method: str
    singular_values: np.ndarray
    richardson: np.ndarray
    richardson_gap: float
    structure: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "map": self.map_name,
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "rank": int(self.rank),
            "determinant": float(self.determinant),
            "h": float(self.h),
            "method": self.method,
            "singular_values": [float(v) for v in self.singular_values],
            "richardson_gap": float(self.richardson_gap),
            "structure": self.structure,
        }


def numerical_rank(matrix, rtol: float = RANK_RTOL) -> int:
    sv = np.linalg.svd(np.asarray(matrix, dtype=float), compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def _central(fn, path: ThetaPath, h: float) -> np.ndarray:
    return (fn(path(h)) - fn(path(-h))) / (2.0 * h)


def directional_jacobian(fn: Callable, paths: Sequence[ThetaPath], h: float = 1e-5,
                         name: str = "map") -> JacobianReport:
    """Central differences along each path with a Richardson cross-check.

    A warning is emitted when the plain estimate and the extrapolated one
    disagree by more than the expected truncation error, which usually means
    ``h`` is small enough for cancellation to dominate.
    """
    if not 1e-7 <= h <= 1e-3:
        raise ValidationError("step h must lie in [1e-7, 1e-3]")
    for p in paths:
        if h >= p.max_step():
            raise ValidationError("step leaves the admissible weights")
    rows = np.array([_central(fn, p, h) for p in paths])
    half = np.array([_central(fn, p, h / 2.0) for p in paths])
    rich = (4.0 * half - rows) / 3.0
    gap = float(np.max(np.abs(rows - rich)))
    scale = max(1.0, float(np.max(np.abs(rich))))
    if gap > max(1e-4, 100.0 * h * h) * scale:
        warnings.warn(
            f"finite differences disagree with Richardson extrapolation by {gap:.2e}",
            NumericWarning,
            stacklevel=2,
        )
    sv = np.linalg.svd(rows, compute_uv=False)
    det = float(np.linalg.det(rows)) if rows.shape[0] == rows.shape[1] else float("nan")
    return JacobianReport(
        map_name=name,
        matrix=rows,
        rank=numerical_rank(rows),
        determinant=det,
        h=h,
        method="central difference, Richardson check at h/2",
        singular_values=sv,
        richardson=rich,
        richardson_gap=gap,
    )


def jacobian(map_name: str = "phi6", h: float = 1e-5, base=None) -> JacobianReport:
    """Jacobian of ``phi5`` or ``phi6`` along the standard paths through ``base``."""
    if map_name == "phi5":
        rep = directional_jacobian(phi5, phi5_paths(base), h, "phi5")
        m = rep.matrix
        # along the first path the lengths move as (a, b, c, c)
        rep.structure = {
            "a_prime": float(m[0, 0]),
            "b_prime": float(m[0, 1]),
            "c_prime": float(m[0, 2]),
            "d_prime": float(m[3, 3]),
            "a_plus_b": float(m[0, 0] + m[0, 1]),
        }
    elif map_name == "phi6":
        rep = directional_jacobian(phi6, phi6_paths(base), h, "phi6")
        m = rep.matrix
        pattern = np.abs(m) > 1e-3 * max(1.0, float(np.max(np.abs(m))))
        rep.structure = {
            "pattern": pattern.astype(int).tolist(),
            "nonzero_entries": sorted({round(float(v), 6) for v in m[pattern]}),
            "expected_entry": F_PRIME_0,
            "expected_determinant": -3.0 * F_PRIME_0 ** 5,
            "pattern_determinant": int(round(np.linalg.det(pattern.astype(float)))),
        }
    else:
        raise ValidationError(f"unknown map {map_name!r}; use phi5 or phi6")
    return rep


def deformation_report(theta) -> dict:
    """Map values and per-coordinate diagnostics for one weight vector."""
    w = validate_weights(theta)
    t = w.theta
    if w.n == 5:
        values = phi5(t)
        return {
            "n": 5,
            "theta": w.tolist(),
            "phi5": [float(v) for v in values],
            "components": [
                {"pair": list(p), "N": n_function(*[m for m in range(1, 6) if m not in p], t),
                 "length": float(v)}
                for p, v in zip(PHI5_PAIRS, values)
            ],
        }
    if w.n == 6:
        comps = []
        for m in PHI6_MERIDIANS:
            comps.append({
                "meridian": str(MeridianLabel(m)),
                "trace": trace_meridian(m, t),
                "class": classify_meridian(m, t).value,
                "triple_sum": float(sum(t[i - 1] for i in m)),
            })
        return {"n": 6, "theta": w.tolist(), "phi6": [c["trace"] for c in comps],
                "components": comps}
    raise ValidationError("deformation maps exist for n = 5 and n = 6")


def path_is_admissible(path: ThetaPath, t: float) -> bool:
    return not weight_violations(path(t))


__all__ = [
    "phi5",
    "phi6",
    "trace_meridian",
    "classify_meridian",
    "MeridianLabel",
    "MeridianClass",
    "ThetaPath",
    "JacobianReport",
    "jacobian",
    "directional_jacobian",
    "deformation_report",
    "f_closed_form",
    "WeightVector",
]
