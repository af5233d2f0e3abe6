"""Developing neighbouring blocks into a common chart.

Two blocks whose explicit orders differ by swapping the marks on face ``a``
share that face: on ``{x_a = 0}`` both describe the same degenerate polygon
with the same edge lengths.  The gluing isometry is the map that is the
identity on those shared polygons and sends one block to the far side of the
other's face, i.e. the reflection in the face composed with the same-side
identification.  These maps give measurements of lengths, angles and
holonomies that do not use any of the closed-form formulas.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, ValidationError
from .minkowski import (
    is_isometry,
    plane_relation,
    point_distance,
    reflection_matrix,
)
from .polyhedron import MarkedBlock, build_block, complement, vertex_on_faces


def swap_at(order: Sequence[int], a: int) -> tuple:
    """Order with the marks on face ``a`` (positions ``a`` and ``a + 1``) exchanged."""
    w = list(order)
    n = len(w)
    i, j = a % n, (a + 1) % n
    w[i], w[j] = w[j], w[i]
    return tuple(w)


def _face_subspace(block: MarkedBlock, a: int) -> np.ndarray:
    """Edge-length vectors (columns) spanning the closure subspace inside ``{x_a = 0}``."""
    row = block.form.basis[a][None, :]
    _, _, vt = np.linalg.svd(row)
    return block.form.basis @ vt[1:].T


def gluing_map(inner: MarkedBlock, outer: MarkedBlock, a: int) -> np.ndarray:
    """Isometry taking ``outer``'s coordinates into ``inner``'s chart across face ``a``.

    ``outer`` must be built from ``swap_at(inner.order, a)`` with the same
    weights.  The result fixes the shared face pointwise and puts ``outer``
    on the side of face ``a`` away from ``inner``.
    """
    if tuple(outer.order) != swap_at(inner.order, a):
        raise ValidationError("blocks are not adjacent across the given face")
    face = _face_subspace(inner, a)
    jdiag = inner.lorentz.diag
    u_out = outer.form.transform @ face
    u_in = inner.form.transform @ face
    # both charts see the same face Gram matrix; an orthonormal frame for it
    # makes the inverse a transpose and keeps skewed charts well conditioned
    gram = u_in.T @ (jdiag[:, None] * u_in)
    ev, vecs = np.linalg.eigh(0.5 * (gram + gram.T))
    frame = vecs / np.sqrt(np.abs(ev))
    src = np.column_stack([u_out @ frame, outer.face_normals[a].coords])
    same_side = np.column_stack([u_in @ frame, inner.face_normals[a].coords])
    eta = np.append(np.sign(ev), -1.0)
    identify = same_side @ (eta[:, None] * src.T * jdiag[None, :])
    g = reflection_matrix(inner.face_normals[a]) @ identify
    # long thin blocks give large boosts; roundoff in g^T J g grows like |g|^2
    scale = max(1.0, float(np.max(np.abs(g))))
    if not is_isometry(g, 1e-10 * scale * scale):
        raise ConsistencyError("gluing map is not an isometry")
    return g


def develop_chain(start: Sequence[int], faces: Sequence[int], theta):
    """Blocks reached by crossing ``faces`` in turn, with maps into the first chart.

    Returns a list of ``(block, matrix)`` pairs beginning with the start block
    and the identity.
    """
    order = tuple(start)
    block = build_block(order, theta)
    out = [(block, np.eye(block.n - 2))]
    acc = np.eye(block.n - 2)
    for a in faces:
        nxt = build_block(swap_at(block.order, a), theta)
        acc = acc @ gluing_map(block, nxt, a)
        out.append((nxt, acc))
        block = nxt
    return out


def developed_geodesic_length(labels: Sequence[int], theta) -> dict:
    """Length of the closed ``(i4 i5)`` geodesic measured by developing three pentagons.

    Starting from the block ``(i1 i2 i3 i4 i5)`` the ``(i4 i5)`` edges of
    ``(i1 i2 i3 ...)``, ``(i2 i1 i3 ...)`` and ``(i2 i3 i1 ...)`` join up at
    right angles to the crossed faces.  The distance between the first start
    point and the developed last end point is returned along with the three
    edge lengths and a collinearity residual.
    """
    labels = tuple(labels)
    if len(labels) != 5:
        raise ValidationError("five labels are required")
    chain = develop_chain(labels, (0, 1), theta)
    # the walk runs face (i2 i3) -> (i1 i2) in the first pentagon, then
    # (i2 i1) -> (i1 i3) in the second and (i3 i1) -> (i2 i3) in the third
    ends = (((1, 3), (0, 3)), ((0, 3), (1, 3)), ((1, 3), (0, 3)))
    pieces, points = [], []
    for (block, g), (fa, fb) in zip(chain, ends):
        u = vertex_on_faces(block, fa)
        v = vertex_on_faces(block, fb)
        if u is None or v is None:
            raise ConsistencyError("edge endpoint missing from the block")
        pieces.append(point_distance(u, v))
        points.append((g @ u.coords, g @ v.coords))
    join = max(
        float(np.max(np.abs(points[k][1] - points[k + 1][0]))) for k in range(2)
    )
    total = point_distance(points[0][0], points[-1][1])
    return {
        "length": total,
        "pieces": pieces,
        "piece_sum": float(sum(pieces)),
        "join_residual": join,
        "collinearity_residual": abs(total - sum(pieces)),
    }


def locus_blocks(triple: Sequence[int], rest: Sequence[int]) -> list[tuple]:
    """The six explicit orders around the codimension-two face ``(abc) rest``.

    Consecutive orders differ by one swap inside the first three positions,
    alternating faces 0 and 1, and the last swaps back to the first.
    """
    a, b, c = triple
    rest = tuple(rest)
    words = [(a, b, c), (b, a, c), (b, c, a), (c, b, a), (c, a, b), (a, c, b)]
    return [w + rest for w in words]


def locus_wedge(triple: Sequence[int], theta, rest=None):
    """Relation between the two bounding faces of three developed blocks.

    The walk ``(abc..) -> (bac..) -> (bca..)`` sweeps a wedge bounded by the
    ``(b c)`` face of the first block and the developed ``(b c)`` face of the
    third; for a cone edge its angle is half the cone angle, and for a
    hyperbolic triple the two faces are ultraparallel at half the
    translation length.
    """
    t = np.asarray(theta, dtype=float)
    if rest is None:
        rest = complement(triple, t.shape[0])
    orders = locus_blocks(triple, rest)
    chain = develop_chain(orders[0], (0, 1), t)
    first = chain[0][0].face_normals[1].coords
    last_block, g = chain[2]
    last = g @ last_block.face_normals[0].coords
    return plane_relation(first, last)


def locus_holonomy(triple: Sequence[int], theta, rest=None) -> np.ndarray:
    """Composition of the six gluing maps around a triple-collision face."""
    t = np.asarray(theta, dtype=float)
    if rest is None:
        rest = complement(triple, t.shape[0])
    orders = locus_blocks(triple, rest)
    faces = (0, 1, 0, 1, 0, 1)
    chain = develop_chain(orders[0], faces, t)
    closing_block, g = chain[-1]
    if tuple(closing_block.order) != orders[0]:
        raise ConsistencyError("six swaps did not return to the starting block")
    return g


def translation_length(h: np.ndarray) -> float:
    """Translation length of a hyperbolic isometry from its top eigenvalue."""
    ev = np.linalg.eigvals(np.asarray(h, dtype=float))
    top = float(np.max(np.abs(ev)))
    return math.log(top) if top > 1.0 else 0.0


def rotation_angle(h: np.ndarray) -> float:
    """Rotation angle of an elliptic isometry fixing a codimension-two plane.

    Such a matrix is conjugate to the identity plus a plane rotation, so its
    trace is ``d - 2 + 2 cos(angle)``.
    """
    h = np.asarray(h, dtype=float)
    d = h.shape[0]
    c = (np.trace(h) - (d - 2)) / 2.0
    return math.acos(max(-1.0, min(1.0, c)))


def fixed_point_check(h: np.ndarray, point) -> float:
    """How far ``h`` moves a point, in the ambient sup norm."""
    p = np.asarray(point, dtype=float)
    return float(np.max(np.abs(h @ p - p)))


__all__ = [
    "swap_at",
    "gluing_map",
    "develop_chain",
    "developed_geodesic_length",
    "locus_blocks",
    "locus_wedge",
    "locus_holonomy",
    "translation_length",
    "rotation_angle",
    "fixed_point_check",
]
