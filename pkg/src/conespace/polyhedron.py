"""Hyperbolic polyhedral blocks and their closed-form geometry.

A block is the set of unit-area polygons with a fixed circular marking,
viewed inside the hyperboloid ``{Area = 1}`` of the closure subspace.  Its
faces are the hyperplanes ``{x_a = 0}``; in the diagonal coordinates of the
area form the inward unit normal of face ``a`` is ``J f_a`` where ``f_a`` is
the linear functional ``x_a`` and ``J = diag(1, -1, ..., -1)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import bernoulli

from .config import tolerance
from .errors import ConsistencyError, DomainError, ValidationError
from .minkowski import (
    LorentzForm,
    MinkowskiVector,
    PlaneRelation,
    VectorKind,
    lorentz_q,
    make_lightlike,
    make_normal,
    make_point,
    plane_relation,
    point_distance,
)
from .polygon import (
    AreaForm,
    MarkedPermutation,
    WeightVector,
    as_order,
    build_area_form,
    equal_weights,
    tangential_lengths,
    validate_weights,
)

VERTEX_RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MarkedBlock:
    """One polyhedral block: marking, weights, area form and face normals.

    ``order`` is the explicit vertex order the block was built from (face
    ``a`` is ``{x_a = 0}``, the collision of marks ``order[a]`` and
    ``order[a + 1]``); ``p`` is its canonical class.
    """

    order: tuple
    theta: WeightVector
    form: AreaForm
    face_normals: tuple
    centre: MinkowskiVector

    @property
    def p(self) -> MarkedPermutation:
        return MarkedPermutation(self.order)

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def lorentz(self) -> LorentzForm:
        return LorentzForm(self.n - 2)

    def face_label(self, a: int) -> tuple:
        """Marks colliding on face ``a``."""
        n = self.n
        return self.order[a % n], self.order[(a + 1) % n]

    def face_index(self, pair) -> int:
        """Face index of the collision of two marks adjacent in this block."""
        i, j = pair
        for a in range(self.n):
            if set(self.face_label(a)) == {i, j}:
                return a
        raise ValidationError(f"marks {i} and {j} are not adjacent in {self.order}")

    def contains(self, y, tol: float = 1e-9) -> bool:
        y = np.asarray(y, dtype=float)
        scale = max(1.0, float(np.max(np.abs(y))))
        return all(lorentz_q(y, m) >= -tol * scale for m in self.face_normals)

    def point_from_lengths(self, x) -> MinkowskiVector:
        """Unit-area point of a positive closed edge vector."""
        return make_point(self.form.coords(x))

    def lengths_of(self, y) -> np.ndarray:
        return self.form.edge_from_coords @ np.asarray(y, dtype=float)


def _as_weights(theta, n=None) -> WeightVector:
    if theta is None:
        if n is None:
            raise ValidationError("weights or n required")
        return equal_weights(n)
    w = theta if isinstance(theta, WeightVector) else validate_weights(theta)
    if n is not None and w.n != n:
        raise ValidationError(f"expected {n} weights, got {w.n}")
    return w


def build_block(p, theta=None, cuts: Sequence[int] | None = None) -> MarkedBlock:
    """Construct the block of marking ``p`` (explicit order kept) and weights ``theta``."""
    order = as_order(p)
    w = _as_weights(theta, len(order))
    form = build_area_form(order, w, cuts=cuts)
    lor = LorentzForm(form.dimension)
    jmat = lor.diag
    edge = form.edge_from_coords
    normals = []
    for a in range(form.n):
        f = edge[a]
        normals.append(make_normal(jmat * f))
    centre = make_point(form.coords(tangential_lengths(order, w.theta)))
    block = MarkedBlock(order, w, form, tuple(normals), centre)
    if not block.contains(centre.coords):
        raise ConsistencyError("reference polygon is not inside its block")
    return block


def face_relation(block: MarkedBlock, i: int, j: int, tol=None) -> PlaneRelation:
    """Relation between faces ``i`` and ``j`` (edge indices) of a block."""
    n = block.n
    if i % n == j % n:
        raise ValidationError("face_relation needs two different faces")
    return plane_relation(block.face_normals[i % n], block.face_normals[j % n], tol)


def face_relation_table(block: MarkedBlock) -> list[dict]:
    rows = []
    for i in range(block.n):
        for j in range(i + 1, block.n):
            rel = face_relation(block, i, j)
            rows.append({"faces": [i, j],
                         "labels": [list(block.face_label(i)), list(block.face_label(j))],
                         **rel.to_dict()})
    return rows


@dataclass(frozen=True)
class BlockVertex:
    faces: tuple
    vector: MinkowskiVector

    @property
    def ideal(self) -> bool:
        return self.vector.kind is VectorKind.LIGHTLIKE


def vertex_on_faces(block: MarkedBlock, faces: Sequence[int], tol=None):
    """Intersection of ``n - 3`` faces, or ``None`` if it misses the closed block.

    The common q-orthogonal complement of the chosen normals is a line; the
    vertex is its timelike (finite) or null (ideal) generator.
    """
    t = tolerance(tol)
    jmat = block.lorentz.diag
    rows = np.array([jmat * block.face_normals[a].coords for a in faces])
    _, sv, vt = np.linalg.svd(rows)
    if sv.shape[0] < len(faces) or sv[-1] < VERTEX_RANK_TOL * max(1.0, sv[0]):
        return None
    v = vt[-1]
    qq = lorentz_q(v, v)
    if qq < -1e3 * t:
        return None
    if abs(v[0]) < t:
        return None
    if v[0] < 0:
        v = -v
    if qq > 1e3 * t:
        vec = make_point(v)
    else:
        vec = make_lightlike(v)
    c = vec.coords
    scale = max(1.0, float(np.max(np.abs(c))))
    for a, m in enumerate(block.face_normals):
        if a in faces:
            continue
        if lorentz_q(c, m) < -1e-8 * scale:
            return None
    return vec


def block_vertices(block: MarkedBlock, tol=None) -> list[BlockVertex]:
    """All finite and ideal vertices of a block, deduplicated."""
    out: list[BlockVertex] = []
    for faces in itertools.combinations(range(block.n), block.n - 3):
        vec = vertex_on_faces(block, faces, tol)
        if vec is None:
            continue
        dup = False
        for k, old in enumerate(out):
            if np.allclose(old.vector.coords, vec.coords, atol=1e-7):
                out[k] = BlockVertex(tuple(sorted(set(old.faces) | set(faces))), old.vector)
                dup = True
                break
        if not dup:
            out.append(BlockVertex(tuple(faces), vec))
    return out


# --------------------------------------------------------------------------- closed forms


class TrigBundle:
    """Sines of single, pair and triple weight sums along an ordered label list.

    Positions are 1-based, so ``s(1)`` is ``sin(theta[labels[0]])`` and
    ``s(1, 2)`` is ``sin(theta[labels[0]] + theta[labels[1]])``.
    """

    def __init__(self, labels: Sequence[int], theta):
        self.labels = tuple(int(m) for m in labels)
        self.theta = np.asarray(theta, dtype=float)
        self._cache: dict = {}

    def angle(self, *pos) -> float:
        return float(sum(self.theta[self.labels[k - 1] - 1] for k in pos))

    def s(self, *pos) -> float:
        key = tuple(sorted(pos))
        if key not in self._cache:
            self._cache[key] = math.sin(self.angle(*key))
        return self._cache[key]


def _check_marks(marks, n):
    if len(set(marks)) != len(marks) or any(not 1 <= m <= n for m in marks):
        raise ValidationError(f"marks {marks} must be distinct and within 1..{n}")


def pentagon_edge_length(labels: Sequence[int], theta, tol=None) -> float:
    """Length of the edge ``{x_{i4 i5} = 0}`` of the pentagon ``(i1 ... i5)``."""
    labels = tuple(labels)
    t = np.asarray(theta, dtype=float)
    if len(labels) != 5 or t.shape[0] != 5:
        raise ValidationError("pentagon edges need n = 5")
    _check_marks(labels, 5)
    s = TrigBundle(labels, t)
    den = s.s(1, 2) * s.s(2, 3)
    rad = s.s(1) * s.s(3) / den if den != 0 else -1.0
    if rad < (1.0 - tolerance(tol)) ** 2:
        raise ConsistencyError(f"cosh L radicand {rad:.6g} < 1: weights lie outside the admissible set")
    return math.acosh(max(math.sqrt(rad), 1.0))


def n_function(i1: int, i2: int, i3: int, theta, tol=None) -> float:
    """``(s1 s2 s3 - s123 (s1 s2 + s2 s3 + s3 s1)) / (s12 s23 s31)``."""
    t = np.asarray(theta, dtype=float)
    _check_marks((i1, i2, i3), t.shape[0])
    s = TrigBundle((i1, i2, i3), t)
    den = s.s(1, 2) * s.s(2, 3) * s.s(3, 1)
    if abs(den) < tolerance(tol):
        raise DomainError("pair sums of the triple make N singular")
    s1, s2, s3 = s.s(1), s.s(2), s.s(3)
    return (s1 * s2 * s3 - s.s(1, 2, 3) * (s1 * s2 + s2 * s3 + s3 * s1)) / den


def complement(marks: Sequence[int], n: int) -> tuple:
    return tuple(m for m in range(1, n + 1) if m not in set(marks))


def closed_geodesic_length(pair: Sequence[int], theta, tol=None) -> float:
    """Length of the closed geodesic formed by the ``(i4 i5)`` edges (``n = 5``)."""
    t = np.asarray(theta, dtype=float)
    if t.shape[0] != 5:
        raise ValidationError("closed geodesics of this kind live in the n = 5 space")
    pair = tuple(pair)
    if len(pair) != 2:
        raise ValidationError("a pair of marks is required")
    _check_marks(pair, 5)
    value = n_function(*complement(pair, 5), t)
    if value < 1.0 - tolerance(tol):
        raise ConsistencyError(f"N = {value:.6g} < 1")
    return math.acosh(max(value, 1.0))


def hexahedron_dihedral(labels: Sequence[int], theta, tol=None) -> float:
    """Angle between the faces ``(i1 i2)`` and ``(i2 i3)`` of the block ``(i1 ... i6)``."""
    labels = tuple(labels)
    t = np.asarray(theta, dtype=float)
    if t.shape[0] != 6:
        raise ValidationError("hexahedron angles need n = 6")
    if len(labels) < 3:
        raise ValidationError("at least three consecutive marks are required")
    _check_marks(labels, 6)
    s = TrigBundle(labels, t)
    if s.angle(1, 2, 3) >= math.pi - tolerance(tol):
        raise DomainError("triple sum >= pi: the two faces do not intersect")
    rad = s.s(1) * s.s(3) / (s.s(1, 2) * s.s(2, 3))
    return math.acos(min(1.0, math.sqrt(rad)))


def cone_angle(triple: Sequence[int], theta, tol=None) -> float:
    """Cone angle ``2 arccos N`` about the codimension-two locus of a triple collision."""
    t = np.asarray(theta, dtype=float)
    if t.shape[0] != 6:
        raise ValidationError("cone angles are defined here for n = 6")
    value = n_function(*triple, t)
    tt = tolerance(tol)
    if value > 1.0 + tt:
        raise DomainError("N > 1: triple sum exceeds pi, the locus is not a cone edge")
    return 2.0 * math.acos(max(-1.0, min(1.0, value)))


def cone_angle_by_dihedrals(triple: Sequence[int], theta) -> float:
    """Twice the sum of the three dihedral angles met going half-way around the locus."""
    a, b, c = triple
    rest = complement(triple, 6)
    total = 0.0
    for word in ((a, b, c), (b, a, c), (b, c, a)):
        total += hexahedron_dihedral(word + rest, theta)
    return 2.0 * total


def equal_weight_dihedral(n: int) -> PlaneRelation:
    """Relation of consecutive faces of the equal-weight block, in closed form.

    The cosine is ``1 / (2 cos(2 pi / n))``; two unit normals with that
    pairing are written down directly and classified.
    """
    if n < 5:
        raise DomainError("n must be at least 5")
    r = 1.0 / (2.0 * math.cos(2.0 * math.pi / n))
    n1 = np.array([0.0, 1.0, 0.0])
    n2 = np.array([math.sqrt(max(r * r - 1.0, 0.0)), -r, math.sqrt(max(1.0 - r * r, 0.0))])
    return plane_relation(n1, n2)


def omega(n: int) -> float:
    """Dihedral angle between consecutive faces of the equal-weight block, ``n >= 7``."""
    if n < 7:
        raise DomainError("consecutive faces intersect only for n >= 7")
    return math.acos(1.0 / (2.0 * math.cos(2.0 * math.pi / n)))


def equal_weight_cone_angle(n: int) -> float:
    """Total angle ``6 omega_n`` around a triple-collision stratum (``n >= 7``)."""
    if n < 7:
        raise DomainError("equal-weight cone angles are singular only for n >= 7")
    return 6.0 * omega(n)


# --------------------------------------------------------------------------- volume


@lru_cache(maxsize=1)
def _clausen_coefficients(terms: int = 40) -> np.ndarray:
    b = bernoulli(2 * terms)
    k = np.arange(1, terms + 1)
    fact = np.array([math.factorial(2 * j + 1) for j in k], dtype=float)
    return np.abs(b[2 * k]) / (2 * k * fact)


def clausen2(x: float) -> float:
    """Clausen function ``Cl_2(x) = -int_0^x log|2 sin(t/2)| dt``.

    Reduced to ``(-pi, pi]`` by periodicity and oddness, then summed from the
    Bernoulli-number series, whose terms fall faster than ``(x / 2 pi)^(2k)``;
    forty terms leave a tail far below ``1e-15`` on the reduced interval.
    """
    x = math.fmod(float(x), 2.0 * math.pi)
    if x > math.pi:
        x -= 2.0 * math.pi
    elif x <= -math.pi:
        x += 2.0 * math.pi
    if x == 0.0:
        return 0.0
    sign = 1.0 if x > 0 else -1.0
    x = abs(x)
    c = _clausen_coefficients()
    powers = x ** (2 * np.arange(1, c.shape[0] + 1) + 1)
    return sign * (x - x * math.log(x) + float(np.sum(c * powers)))


def lobachevsky(theta: float) -> float:
    """``Lambda(theta) = -int_0^theta log|2 sin t| dt = Cl_2(2 theta) / 2``."""
    return 0.5 * clausen2(2.0 * theta)


def ideal_octahedron_volume() -> float:
    return 8.0 * lobachevsky(math.pi / 4.0)


def block_volume_x6() -> float:
    """The equal-weight hexahedron is scissors congruent to a quarter octahedron."""
    return ideal_octahedron_volume() / 4.0


def volume_x6() -> float:
    """Volume of the whole six-point space: sixty blocks."""
    return 60.0 * block_volume_x6()
