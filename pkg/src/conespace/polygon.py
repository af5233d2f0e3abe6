"""Marked Euclidean polygons with prescribed exterior angles.

A polygon is recorded by its edge lengths ``x[a]`` where edge ``a`` runs from
the vertex marked ``order[a]`` to the vertex marked ``order[a + 1]``.  The
exterior angle at the vertex marked ``j`` is ``theta[j - 1]``, so edge ``a``
points in direction ``sum(theta[order[1..a]])``.

The area, as a quadratic form on the closure subspace, is diagonalized by
cutting off "ear" triangles one edge at a time: cutting edge ``a`` (whose end
vertices carry exterior angles ``alpha`` and ``beta``) removes a triangle of
area ``x_a**2 * sin(alpha) sin(beta) / (2 sin(alpha + beta))`` and merges the
two vertices into one of exterior angle ``alpha + beta``.  After ``n - 3``
cuts a triangle remains whose area is a single positive square, giving the
form ``X**2 - Y_1**2 - ... - Y_{n-3}**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, ValidationError

TWO_PI = 2.0 * math.pi
SIGNATURE_TOL = 1e-10
_SIN_MARGIN = 1e-12


# --------------------------------------------------------------------------- weights


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Exterior angles ``theta[j - 1]`` at the vertex marked ``j`` (radians)."""

    theta: np.ndarray

    def __post_init__(self):
        t = np.array(self.theta, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "theta", t)

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    def __getitem__(self, mark: int) -> float:
        """Weight of a mark (1-based)."""
        return float(self.theta[mark - 1])

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.theta, dtype=dtype)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, WeightVector):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.theta, other.theta))

    def __hash__(self):
        return hash(self.theta.tobytes())

    def is_positive(self) -> bool:
        return bool(np.all(self.theta > 0))

    def tolist(self) -> list:
        return [float(t) for t in self.theta]


def weight_violations(theta) -> list[str]:
    t = np.asarray(theta, dtype=float)
    problems = []
    if t.ndim != 1:
        return ["weights must be a flat sequence"]
    n = t.shape[0]
    if n < 5:
        problems.append(f"need at least 5 weights, got {n}")
    if not np.all(np.isfinite(t)):
        problems.append("weights must be finite")
        return problems
    total = float(np.sum(t))
    if abs(total - TWO_PI) > 1e-12 * max(1, n):
        problems.append(f"weights sum to {total!r}, not 2*pi")
    for i in range(n):
        for j in range(i + 1, n):
            s = t[i] + t[j]
            if not 0.0 < s < math.pi:
                problems.append(
                    f"theta_{i + 1} + theta_{j + 1} = {s:.6g} is outside (0, pi)"
                )
    return problems


def validate_weights(theta) -> WeightVector:
    """Check the admissibility conditions and wrap the weights."""
    if isinstance(theta, WeightVector):
        theta = theta.theta
    problems = weight_violations(theta)
    if problems:
        raise ValidationError("inadmissible weights: " + "; ".join(problems))
    return WeightVector(theta)


def equal_weights(n: int) -> WeightVector:
    return validate_weights(np.full(n, TWO_PI / n))


def sample_weights(n: int, rng: np.random.Generator, spread: float | None = None,
                   max_tries: int = 10_000) -> WeightVector:
    """Random admissible weights with all entries positive.

    ``spread=None`` draws uniformly from the positive part of the admissible
    polytope (rejection from the scaled simplex).  A number draws a
    perturbation of the equal weights of at most that size per coordinate.
    """
    for _ in range(max_tries):
        if spread is None:
            t = rng.dirichlet(np.ones(n)) * TWO_PI
        else:
            d = rng.uniform(-spread, spread, size=n)
            d -= d.mean()
            t = np.full(n, TWO_PI / n) + d
        t[-1] = TWO_PI - np.sum(t[:-1])
        if np.all(t > 0) and not weight_violations(t):
            return WeightVector(t)
    raise RuntimeError(f"could not sample admissible weights for n={n}")


# --------------------------------------------------------------------------- markings


def _dihedral_images(word: Sequence) -> list[tuple]:
    w = tuple(word)
    n = len(w)
    rev = w[::-1]
    return [w[i:] + w[:i] for i in range(n)] + [rev[i:] + rev[:i] for i in range(n)]


def canonical_circular(word: Sequence) -> tuple:
    """Smallest rotation or reflection of a circular word."""
    return min(_dihedral_images(word))


@dataclass(frozen=True, order=True)
class MarkedPermutation:
    """Circular order of the marks 1..n up to rotation and reflection.

    ``order`` is always the canonical representative: the lexicographically
    smallest rotation/reflection, which starts with mark 1.
    """

    order: tuple

    def __post_init__(self):
        word = tuple(int(m) for m in self.order)
        if sorted(word) != list(range(1, len(word) + 1)):
            raise ValidationError(f"{word} is not a permutation of 1..{len(word)}")
        object.__setattr__(self, "order", canonical_circular(word))

    @property
    def n(self) -> int:
        return len(self.order)

    def __str__(self):
        return "".join(str(m) for m in self.order) if self.n < 10 else "-".join(
            str(m) for m in self.order)

    def __iter__(self):
        return iter(self.order)

    def __len__(self):
        return self.n


def as_order(p) -> tuple:
    """Explicit vertex order of a marking (keeps the given rotation/reflection)."""
    if isinstance(p, MarkedPermutation):
        return p.order
    if isinstance(p, str):
        word = tuple(int(c) for c in p)
    else:
        word = tuple(int(m) for m in p)
    if sorted(word) != list(range(1, len(word) + 1)):
        raise ValidationError(f"{word} is not a permutation of 1..{len(word)}")
    return word


# --------------------------------------------------------------------------- polygons


def vertex_angles(order, theta) -> np.ndarray:
    """Exterior angle at the start vertex of each edge."""
    order = as_order(order)
    t = np.asarray(theta, dtype=float)
    _check_sizes(order, t)
    return t[np.asarray(order) - 1]


def edge_directions(order, theta) -> np.ndarray:
    """Direction angle of each edge; edge 0 lies along the positive real axis."""
    ang = vertex_angles(order, theta)
    return np.concatenate([[0.0], np.cumsum(ang[1:])])


def _check_sizes(order, t):
    if len(order) != t.shape[0]:
        raise ValidationError(
            f"marking has {len(order)} marks but {t.shape[0]} weights given"
        )


def closure_residual(x, order, theta) -> float:
    phi = edge_directions(order, theta)
    x = np.asarray(x, dtype=float)
    return float(abs(np.sum(x * np.exp(1j * phi))))


def closure_basis(order, theta) -> np.ndarray:
    """``n x (n-2)`` matrix whose columns span the closure subspace.

    The first ``n - 2`` edge lengths are free; the last two are solved from
    the real and imaginary parts of the closure equation.
    """
    phi = edge_directions(order, theta)
    n = phi.shape[0]
    d = np.exp(1j * phi)
    m = np.array([[d[n - 2].real, d[n - 1].real], [d[n - 2].imag, d[n - 1].imag]])
    if abs(np.linalg.det(m)) < 1e-12:
        raise ConsistencyError("last two edges are parallel; closure cannot be solved")
    rhs = -np.vstack([d[: n - 2].real, d[: n - 2].imag])
    tail = np.linalg.solve(m, rhs)
    return np.vstack([np.eye(n - 2), tail])


def area_matrix(order, theta) -> np.ndarray:
    """Symmetric ``A`` with ``x @ A @ x`` the shoelace area of a closed polygon."""
    phi = edge_directions(order, theta)
    diff = phi[None, :] - phi[:, None]
    a = 0.25 * np.sin(diff)
    a = np.triu(a, 1)
    return a + a.T


def embed_polygon(x, order, theta, tol: float = 1e-9):
    """Lay the polygon out in the plane by successive turns.

    Returns ``(vertices, signed_area)``; ``vertices[k]`` is the vertex marked
    ``order[k]`` with the first one at the origin.
    """
    x = np.asarray(x, dtype=float)
    order = as_order(order)
    phi = edge_directions(order, theta)
    if x.shape != phi.shape:
        raise ValidationError("edge vector has the wrong length")
    steps = x * np.exp(1j * phi)
    pts = np.concatenate([[0.0 + 0.0j], np.cumsum(steps)])
    scale = max(1.0, float(np.max(np.abs(x))))
    if abs(pts[-1]) > tol * scale:
        raise ConsistencyError(f"polygon does not close (gap {abs(pts[-1]):.3e})")
    verts = pts[:-1]
    area = 0.5 * float(np.sum(verts.real * np.roll(verts.imag, -1)
                              - np.roll(verts.real, -1) * verts.imag))
    return np.column_stack([verts.real, verts.imag]), area


def tangential_lengths(order, theta) -> np.ndarray:
    """Edge lengths of the polygon circumscribed about the unit circle.

    A vertex of exterior angle ``t`` sits at tangent distance ``tan(t/2)``
    from both touching points, so this polygon always closes and, for
    positive weights, lies strictly inside the block.
    """
    half = np.tan(vertex_angles(order, theta) / 2.0)
    return half + np.roll(half, -1)


# --------------------------------------------------------------------------- area form


@dataclass(frozen=True, eq=False)
class AreaForm:
    """Area quadratic form of one marking, with its diagonalizing coordinates.

    ``transform`` maps edge lengths (in the closure subspace) to coordinates
    ``(X, Y_1, ..., Y_{n-3})`` in which the area is ``X**2 - sum(Y**2)``;
    ``Y_k`` is the ear cut of edge ``cuts[k - 1]`` and ``X`` the remaining
    triangle measured on ``base_edge``.
    """

    order: tuple
    theta: WeightVector
    basis: np.ndarray
    gram: np.ndarray
    matrix: np.ndarray
    transform: np.ndarray
    cuts: tuple
    base_edge: int
    signature: tuple

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def dimension(self) -> int:
        return self.n - 2

    @property
    def edge_from_coords(self) -> np.ndarray:
        """``n x (n-2)`` map from diagonal coordinates back to edge lengths."""
        k = self.transform @ self.basis
        return self.basis @ np.linalg.inv(k)

    def area(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.matrix @ x)

    def coords(self, x) -> np.ndarray:
        return self.transform @ np.asarray(x, dtype=float)


def signature_of(gram, tol: float = SIGNATURE_TOL) -> tuple:
    """``(positive, negative)`` eigenvalue counts; ``|ev| <= tol*scale`` is zero."""
    ev = np.linalg.eigvalsh(np.asarray(gram, dtype=float))
    scale = max(1.0, float(np.max(np.abs(ev))))
    pos = int(np.sum(ev > tol * scale))
    neg = int(np.sum(ev < -tol * scale))
    return pos, neg


def fan_cuts(n: int) -> tuple:
    """Cut order of the classical fan: right side, left side, then the top edge.

    Edges ``0 .. m-2`` are cut in turn on one side, ``n-2 .. n-m`` on the other
    and, for even ``n``, edge ``m`` on top, with ``m = (n - 1) // 2`` for odd
    ``n`` and ``(n - 2) // 2`` for even ``n``.
    """
    if n % 2:
        m = (n - 1) // 2
    else:
        m = (n - 2) // 2
    cuts = list(range(0, m - 1)) + [n - 1 - j for j in range(1, m)]
    if n % 2 == 0:
        cuts.append(m)
    return tuple(cuts)


class _CutError(Exception):
    pass


def _ear_coefficient(alpha, beta):
    sa, sb, sab = math.sin(alpha), math.sin(beta), math.sin(alpha + beta)
    if sa <= _SIN_MARGIN or sb <= _SIN_MARGIN or sab <= _SIN_MARGIN:
        raise _CutError
    return sa * sb / (2.0 * sab), sb / sab, sa / sab


def _run_cuts(angles, cuts, base=None, greedy=False):
    n = len(angles)
    alive = list(range(n))
    funcs = {a: np.eye(n)[a] for a in alive}
    start = {a: float(angles[a]) for a in alive}
    rows, done = [], []
    todo = list(cuts)
    while len(alive) > 3:
        if greedy:
            best = None
            for i, k in enumerate(alive):
                nxt = alive[(i + 1) % len(alive)]
                a, b = start[k], start[nxt]
                margin = min(math.sin(a), math.sin(b), math.sin(a + b))
                if best is None or margin > best[0] + 1e-15:
                    best = (margin, k)
            k = best[1]
        else:
            if not todo:
                raise _CutError
            k = todo.pop(0)
            if k not in alive:
                raise _CutError
        i = alive.index(k)
        prev, nxt = alive[i - 1], alive[(i + 1) % len(alive)]
        c, to_prev, to_next = _ear_coefficient(start[k], start[nxt])
        rows.append(math.sqrt(c) * funcs[k])
        funcs[prev] = funcs[prev] + to_prev * funcs[k]
        funcs[nxt] = funcs[nxt] + to_next * funcs[k]
        start[nxt] = start[k] + start[nxt]
        alive.remove(k)
        done.append(k)
    if base is None:
        base = n - 1 if n - 1 in alive else alive[-1]
    if base not in alive:
        raise _CutError
    i = alive.index(base)
    alpha, beta = start[base], start[alive[(i + 1) % 3]]
    gamma = TWO_PI - alpha - beta
    if min(alpha, beta, gamma) <= _SIN_MARGIN or max(alpha, beta, gamma) >= math.pi - _SIN_MARGIN:
        raise _CutError
    c = -math.sin(alpha) * math.sin(beta) / (2.0 * math.sin(alpha + beta))
    x_row = math.sqrt(c) * funcs[base]
    return np.vstack([x_row] + rows), tuple(done), base


def build_area_form(order, theta, cuts: Sequence[int] | None = None,
                    base_edge: int | None = None) -> AreaForm:
    """Area form of the marking ``order`` with weights ``theta``.

    ``cuts`` fixes the ear-cut sequence (edge indices).  By default the fan
    is used when all of its ears are proper triangles and a greedy order
    otherwise.
    """
    order = as_order(order)
    w = theta if isinstance(theta, WeightVector) else validate_weights(theta)
    _check_sizes(order, w.theta)
    n = len(order)
    angles = vertex_angles(order, w.theta)
    try:
        if cuts is not None:
            t, done, base = _run_cuts(angles, cuts, base_edge)
        else:
            try:
                t, done, base = _run_cuts(angles, fan_cuts(n), base_edge)
            except _CutError:
                t, done, base = _run_cuts(angles, (), base_edge, greedy=True)
    except _CutError:
        raise ConsistencyError(
            "no ear-cut sequence with proper triangles; weights need to be positive"
        ) from None
    basis = closure_basis(order, w.theta)
    mat = area_matrix(order, w.theta)
    gram = basis.T @ mat @ basis
    k = t @ basis
    if abs(np.linalg.det(k)) < 1e-14:
        raise ConsistencyError("triangle coordinates are degenerate")
    return AreaForm(
        order=order,
        theta=w,
        basis=basis,
        gram=gram,
        matrix=mat,
        transform=t,
        cuts=done,
        base_edge=base,
        signature=signature_of(gram),
    )


def triangle_coordinates(x, form: AreaForm) -> np.ndarray:
    """Diagonal coordinates ``(X, Y_1, ..., Y_{n-3})`` of an edge vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (form.n,):
        raise ValidationError(f"expected {form.n} edge lengths, got shape {x.shape}")
    return form.transform @ x


def random_closed_lengths(order, theta, rng: np.random.Generator, positive=True,
                          max_tries: int = 100_000) -> np.ndarray:
    """A random closure-satisfying edge vector (all entries positive by default)."""
    order = as_order(order)
    basis = closure_basis(order, theta)
    n = len(order)
    if not positive:
        return basis @ rng.normal(size=n - 2)
    centre = tangential_lengths(order, theta)
    centre_free = centre[: n - 2]
    for _ in range(max_tries):
        free = centre_free * rng.uniform(0.05, 2.0, size=n - 2)
        x = basis @ free
        if np.all(x > 0):
            return x
    raise RuntimeError("could not sample a positive polygon")
