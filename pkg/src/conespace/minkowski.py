"""Lorentzian linear algebra on a diagonal form of signature (1, d-1).

Points of hyperbolic space are unit timelike vectors with positive leading
coordinate; hyperplanes are described by unit spacelike normals
(``q(n, n) = -1``).  Dihedral angles and distances are computed from a single
square root of the positive product ``q(n1, n1) * q(n2, n2)`` so no imaginary
lengths ever appear.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import tolerance
from .errors import ConsistencyError, ValidationError

__all__ = [
    "LorentzForm",
    "VectorKind",
    "MinkowskiVector",
    "PlaneRelation",
    "lorentz_q",
    "point_distance",
    "plane_relation",
    "reflect",
    "make_point",
    "make_normal",
    "make_lightlike",
    "RelationKind",
    "reflection_matrix",
    "is_isometry",
]


@dataclass(frozen=True)
class LorentzForm:
    """Diagonal form ``diag(+1, -1, ..., -1)`` of the given dimension."""

    dimension: int
    signature: tuple = field(default=None)

    def __post_init__(self):
        if self.dimension < 2:
            raise ValidationError("a Lorentz form needs dimension >= 2")
        sig = self.signature
        if sig is None:
            sig = (1.0,) + (-1.0,) * (self.dimension - 1)
        sig = tuple(float(s) for s in sig)
        if len(sig) != self.dimension:
            raise ValidationError("signature length does not match dimension")
        if sig[0] != 1.0 or any(s != -1.0 for s in sig[1:]):
            raise ValidationError("signature must be (+1, -1, ..., -1)")
        object.__setattr__(self, "signature", sig)

    @property
    def diag(self) -> np.ndarray:
        return np.asarray(self.signature)

    def __call__(self, u, v) -> float:
        return lorentz_q(u, v, self)


class VectorKind(str, Enum):
    POINT = "Point"
    NORMAL = "Normal"
    LIGHTLIKE = "Lightlike"
    GENERAL = "General"


@dataclass(frozen=True, eq=False)
class MinkowskiVector:
    coords: np.ndarray
    kind: VectorKind = VectorKind.GENERAL

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "kind", VectorKind(self.kind))

    @property
    def dimension(self) -> int:
        return self.coords.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __len__(self):
        return self.dimension

    def __repr__(self):
        return f"MinkowskiVector({np.array2string(self.coords, precision=6)}, {self.kind.value})"


def _coords(v) -> np.ndarray:
    if isinstance(v, MinkowskiVector):
        return v.coords
    return np.asarray(v, dtype=float)


def lorentz_q(u, v, form: LorentzForm | None = None) -> float:
    """Symmetric bilinear pairing ``x0*y0 - x1*y1 - ... - x_{d-1}*y_{d-1}``."""
    a, b = _coords(u), _coords(v)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if form is None:
        form = LorentzForm(a.shape[0])
    elif form.dimension != a.shape[0]:
        raise ValidationError(
            f"vectors have dimension {a.shape[0]}, form has {form.dimension}"
        )
    return float(np.dot(a * form.diag, b))


def make_point(coords, tol=None) -> MinkowskiVector:
    """Normalize a timelike vector onto the upper sheet ``q = 1``."""
    c = _coords(coords)
    qq = lorentz_q(c, c)
    if qq <= tolerance(tol):
        raise ConsistencyError(f"vector is not timelike (q = {qq:.3e})")
    c = c / math.sqrt(qq)
    if c[0] < 0:
        c = -c
    return MinkowskiVector(c, VectorKind.POINT)


def make_normal(coords, tol=None) -> MinkowskiVector:
    """Normalize a spacelike vector to ``q = -1`` (orientation kept)."""
    c = _coords(coords)
    qq = lorentz_q(c, c)
    if qq >= -tolerance(tol):
        raise ConsistencyError(f"vector is not spacelike (q = {qq:.3e})")
    return MinkowskiVector(c / math.sqrt(-qq), VectorKind.NORMAL)


def make_lightlike(coords, tol=None) -> MinkowskiVector:
    """Scale a null vector so its leading coordinate is 1."""
    c = _coords(coords)
    if abs(c[0]) < tolerance(tol):
        raise ConsistencyError("null vector with vanishing leading coordinate")
    c = c / c[0]
    qq = lorentz_q(c, c)
    if abs(qq) > 1e3 * tolerance(tol):
        raise ConsistencyError(f"vector is not lightlike (q = {qq:.3e})")
    return MinkowskiVector(c, VectorKind.LIGHTLIKE)


def point_distance(p1, p2, tol=None) -> float:
    """Hyperbolic distance between two points of the upper hyperboloid."""
    c = lorentz_q(p1, p2)
    if c < 1.0 - tolerance(tol):
        raise ConsistencyError(
            f"q(p1, p2) = {c:.12g} < 1: inputs are not both on the upper hyperboloid"
        )
    return math.acosh(max(c, 1.0))


class RelationKind(str, Enum):
    INTERSECTING = "Intersecting"
    ULTRAPARALLEL = "Ultraparallel"
    ASYMPTOTIC = "Asymptotic"


@dataclass(frozen=True)
class PlaneRelation:
    """How two hyperplanes sit: an angle, a distance, or tangency at infinity."""

    kind: RelationKind
    value: float = 0.0
    cosine: float = float("nan")

    Intersecting = RelationKind.INTERSECTING
    Ultraparallel = RelationKind.ULTRAPARALLEL
    Asymptotic = RelationKind.ASYMPTOTIC

    @property
    def angle(self) -> float:
        if self.kind is RelationKind.ASYMPTOTIC:
            return 0.0
        if self.kind is not RelationKind.INTERSECTING:
            raise ValueError("planes do not intersect")
        return self.value

    @property
    def distance(self) -> float:
        if self.kind is RelationKind.ASYMPTOTIC:
            return 0.0
        if self.kind is not RelationKind.ULTRAPARALLEL:
            raise ValueError("planes intersect")
        return self.value

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "cosine": self.cosine}
        if self.kind is RelationKind.INTERSECTING:
            out["angle"] = self.value
            out["angle_deg"] = round(math.degrees(self.value), 4)
        elif self.kind is RelationKind.ULTRAPARALLEL:
            out["distance"] = self.value
        return out


def plane_relation(n1, n2, tol=None) -> PlaneRelation:
    """Classify two hyperplanes from their spacelike normals.

    With both normals pointing into a common region, ``r = q(n1, n2) /
    sqrt(q(n1, n1) q(n2, n2))`` is the cosine of the interior dihedral angle
    when ``|r| < 1`` and ``cosh`` of the distance when ``|r| > 1``.
    """
    a, b = _coords(n1), _coords(n2)
    qa, qb = lorentz_q(a, a), lorentz_q(b, b)
    if qa >= 0 or qb >= 0:
        raise ValidationError("plane_relation needs spacelike normals")
    r = lorentz_q(a, b) / math.sqrt(qa * qb)
    t = tolerance(tol)
    if abs(abs(r) - 1.0) <= t:
        return PlaneRelation(RelationKind.ASYMPTOTIC, 0.0, r)
    if abs(r) < 1.0:
        return PlaneRelation(RelationKind.INTERSECTING, math.acos(r), r)
    return PlaneRelation(RelationKind.ULTRAPARALLEL, math.acosh(abs(r)), r)


def reflect(v, mirror):
    """Reflect ``v`` in the hyperplane orthogonal to the spacelike ``mirror``."""
    m = _coords(mirror)
    qm = lorentz_q(m, m)
    if qm >= 0:
        raise ValidationError("mirror must be spacelike")
    c = _coords(v)
    out = c - 2.0 * lorentz_q(c, m) / qm * m
    if isinstance(v, MinkowskiVector):
        return MinkowskiVector(out, v.kind)
    return out


def reflection_matrix(mirror) -> np.ndarray:
    """Matrix of :func:`reflect` for a fixed mirror."""
    m = _coords(mirror)
    qm = lorentz_q(m, m)
    if qm >= 0:
        raise ValidationError("mirror must be spacelike")
    d = m.shape[0]
    diag = LorentzForm(d).diag
    return np.eye(d) - 2.0 / qm * np.outer(m, m * diag)


def is_isometry(matrix, tol=1e-9) -> bool:
    """True when ``matrix`` preserves the standard diagonal form."""
    g = np.asarray(matrix, dtype=float)
    j = np.diag(LorentzForm(g.shape[0]).diag)
    return bool(np.max(np.abs(g.T @ j @ g - j)) < tol)
