"""Combinatorics of gluing all blocks into one cone-manifold.

Cells are indexed by degenerate configurations: a circular word whose
letters are groups of collided marks, taken up to rotation and reflection.
A block meets a cell once for every way of expanding each group into a run
of consecutive marks, so a label with group sizes ``g_1, g_2, ...`` is shared
by ``prod(g_i!)`` blocks.  Groups at least half the circle long are excluded
(their total weight reaches ``pi`` and they sit at infinity or are absent).
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .polygon import canonical_circular, equal_weights
from .polyhedron import build_block, face_relation

# --------------------------------------------------------------------------- labels


def enumerate_blocks(n: int) -> list[tuple]:
    """Canonical circular orders of ``1..n`` up to rotation and reflection."""
    if n < 5:
        raise ValidationError("n must be at least 5")
    out = []
    for rest in itertools.permutations(range(2, n + 1)):
        if rest[0] < rest[-1]:
            out.append((1,) + rest)
    return sorted(out)


def canonical_order(order: Sequence[int]) -> tuple:
    return canonical_circular(tuple(order))


def max_group_size(n: int) -> int:
    """Largest collision group that stays at finite distance for equal weights."""
    return (n + 1) // 2 - 1


def groups_of(order: Sequence[int], collapsed: Iterable[int]) -> list[tuple]:
    """Split the circular order into runs joined by the collapsed edges.

    Edge ``a`` joins positions ``a`` and ``a + 1``.  The runs are returned in
    circular order as sorted tuples of marks.
    """
    order = tuple(order)
    n = len(order)
    s = {a % n for a in collapsed}
    if len(s) >= n:
        raise ValidationError("cannot collapse every edge")
    start = next(a for a in range(n) if (a - 1) % n not in s)
    groups, cur = [], []
    for k in range(n):
        pos = (start + k) % n
        cur.append(order[pos])
        if pos not in s:
            groups.append(tuple(sorted(cur)))
            cur = []
    return groups


def collapse_label(order: Sequence[int], collapsed: Iterable[int]) -> tuple:
    """Canonical degenerate-configuration label of a set of collapsed edges."""
    return canonical_circular(groups_of(order, collapsed))


def codimension(label: Sequence[tuple]) -> int:
    return sum(len(g) - 1 for g in label)


def is_admissible(label: Sequence[tuple], n: int) -> bool:
    return max(len(g) for g in label) <= max_group_size(n)


def label_str(label: Sequence[tuple]) -> str:
    parts = []
    for g in label:
        word = "".join(str(m) for m in g) if len(g) == 1 or max(g) < 10 else "-".join(
            str(m) for m in g)
        parts.append(word if len(g) == 1 else f"({word})")
    return "".join(parts)


def incidence_count(label: Sequence[tuple]) -> int:
    return math.prod(math.factorial(len(g)) for g in label)


def swap_at(order: Sequence[int], a: int) -> tuple:
    w = list(order)
    n = len(w)
    w[a % n], w[(a + 1) % n] = w[(a + 1) % n], w[a % n]
    return tuple(w)


# --------------------------------------------------------------------------- surfaces


@dataclass
class SurfaceReport:
    faces: int
    edges: int
    vertices: int
    euler: int
    orientable: bool
    closed: bool

    def to_dict(self) -> dict:
        return {
            "faces": self.faces,
            "edges": self.edges,
            "vertices": self.vertices,
            "euler": self.euler,
            "orientable": self.orientable,
            "closed": self.closed,
        }


def polygon_surface(cells: Sequence[tuple]) -> SurfaceReport:
    """Invariants of a surface glued from polygons.

    Each cell is ``(sides, corners)``: side ``i`` runs from ``corners[i]`` to
    ``corners[i + 1]`` and sides with equal keys are identified.  Orientability
    is decided by propagating orientations across shared sides breadth-first
    and looking for a contradiction.
    """
    by_side: dict = defaultdict(list)
    corners = set()
    for idx, (sides, cs) in enumerate(cells):
        k = len(sides)
        for i, s in enumerate(sides):
            by_side[s].append((idx, i, cs[i], cs[(i + 1) % k]))
        corners.update(cs)
    closed = all(len(v) == 2 for v in by_side.values())
    orient = [0] * len(cells)
    ok = True
    for root in range(len(cells)):
        if orient[root]:
            continue
        orient[root] = 1
        queue = deque([root])
        while queue:
            idx = queue.popleft()
            for i, s in enumerate(cells[idx][0]):
                mine = next(t for t in by_side[s] if t[:2] == (idx, i))
                for other in by_side[s]:
                    if other[:2] == (idx, i):
                        continue
                    # glued sides must be run in opposite directions
                    same = other[2:] == mine[2:]
                    want = -orient[idx] if same else orient[idx]
                    j = other[0]
                    if orient[j] == 0:
                        orient[j] = want
                        queue.append(j)
                    elif orient[j] != want:
                        ok = False
    f, e, v = len(cells), len(by_side), len(corners)
    return SurfaceReport(f, e, v, v - e + f, ok, closed)


# --------------------------------------------------------------------------- complex


@dataclass
class GluingComplex:
    """All blocks of one ``n`` with their cells, pairings and links.

    ``cells[k]`` maps each admissible codimension-``k`` label to its incidences
    ``(block, collapsed_edges)``; ``pairings`` sends ``(block, face)`` to the
    ``(block, face)`` it is glued to; ``links`` lists the blocks met walking
    once around each codimension-two label.
    """

    n: int
    blocks: list
    cells: dict
    pairings: dict
    links: dict
    cusp_classes: list = field(default_factory=list)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def counts(self) -> dict:
        return {k: len(v) for k, v in sorted(self.cells.items())}


def _block_incidences(order: tuple, n: int, max_codim: int):
    cap = max_group_size(n)
    for k in range(1, max_codim + 1):
        for s in itertools.combinations(range(n), k):
            groups = groups_of(order, s)
            if max(len(g) for g in groups) > cap:
                continue
            yield k, canonical_circular(groups), s


def link_walk(order: Sequence[int], collapsed: Sequence[int]) -> list[tuple]:
    """Blocks met around a codimension-two cell, crossing its two faces alternately."""
    a, b = collapsed
    start = tuple(order)
    walk = [canonical_order(start)]
    cur, step = start, 0
    while True:
        cur = swap_at(cur, (a, b)[step % 2])
        step += 1
        if cur == start:
            break
        walk.append(canonical_order(cur))
        if step > 24:
            raise RuntimeError("link walk did not close")
    return walk


def build_complex(n: int, max_codim: int | None = None) -> GluingComplex:
    """Assemble the gluing complex combinatorially."""
    blocks = enumerate_blocks(n)
    if max_codim is None:
        max_codim = n - 3 if n <= 7 else 2
    cells: dict = {k: defaultdict(list) for k in range(1, max_codim + 1)}
    for order in blocks:
        for k, label, s in _block_incidences(order, n, max_codim):
            cells[k][label].append((order, s))
    cells = {k: dict(sorted(v.items())) for k, v in cells.items()}
    pairings = {}
    for label, inc in cells.get(1, {}).items():
        if len(inc) != 2:
            raise RuntimeError(f"face {label_str(label)} has {len(inc)} incidences")
        (b1, (f1,)), (b2, (f2,)) = inc
        pairings[(b1, f1)] = (b2, f2)
        pairings[(b2, f2)] = (b1, f1)
    links = {}
    for label, inc in cells.get(2, {}).items():
        order, s = inc[0]
        links[label] = link_walk(order, s)
    cx = GluingComplex(n, blocks, cells, pairings, links)
    if n == 6:
        cx.cusp_classes = cusp_classes(6)
    return cx


def surface_invariants(cx: GluingComplex) -> SurfaceReport:
    """Cell counts, Euler characteristic and orientability of the ``n = 5`` surface."""
    if cx.n != 5:
        raise ValidationError("the complex is a surface only for n = 5")
    cells = []
    cycle = (0, 2, 4, 1, 3)
    for order in cx.blocks:
        sides = [collapse_label(order, (a,)) for a in cycle]
        corners = [
            collapse_label(order, (cycle[i - 1], cycle[i])) for i in range(5)
        ]
        cells.append((sides, corners))
    return polygon_surface(cells)


# --------------------------------------------------------------------------- cusps


def cusp_classes(n: int = 6) -> list[tuple]:
    """Partitions of the marks into two triples, one per cusp."""
    if n != 6:
        raise ValidationError("cusp classes are defined for n = 6")
    out = []
    for first in itertools.combinations(range(2, 7), 2):
        a = (1,) + first
        b = tuple(m for m in range(1, 7) if m not in a)
        out.append((a, b))
    return sorted(out)


def _partition_key(order: Sequence[int], k: int) -> tuple:
    w = tuple(order)
    a = tuple(sorted(w[(k + i) % 6] for i in range(3)))
    b = tuple(sorted(w[(k + 3 + i) % 6] for i in range(3)))
    return tuple(sorted((a, b)))


@dataclass
class Rectangle:
    """Cross-section of one ideal vertex: block, vertex position, four sides."""

    block: tuple
    position: int
    sides: tuple
    corners: tuple
    side_pairs: tuple


def ideal_rectangles(cx_or_blocks, cusp) -> list[Rectangle]:
    """The rectangles of one cusp class, read off from the blocks."""
    blocks = cx_or_blocks.blocks if isinstance(cx_or_blocks, GluingComplex) else cx_or_blocks
    key = tuple(sorted(tuple(sorted(t)) for t in cusp))
    out = []
    for order in blocks:
        for k in range(3):
            if _partition_key(order, k) != key:
                continue
            sides = (k, k + 3, k + 1, k + 4)
            corners = tuple(
                collapse_label(order, (sides[i - 1], sides[i])) for i in range(4)
            )
            pairs = tuple(tuple(sorted((order[s % 6], order[(s + 1) % 6]))) for s in sides)
            out.append(Rectangle(order, k, sides, corners, pairs))
    return out


def rectangle_neighbour(rect: Rectangle, side: int) -> tuple:
    """Block and side reached by crossing one side of a rectangle."""
    a = rect.sides[side]
    nxt = canonical_order(swap_at(rect.block, a))
    return nxt, rect.side_pairs[side]


def _side_key(block, pair, cusp_key):
    return (block, pair, cusp_key)


@dataclass
class CuspReport:
    cusp: tuple
    rectangles: int
    surface: SurfaceReport
    loop_pair: tuple
    loop_length: int
    loop_is_cycle: bool
    loop_nonseparating: bool

    def to_dict(self) -> dict:
        return {
            "cusp": [list(t) for t in self.cusp],
            "rectangles": self.rectangles,
            **{f"surface_{k}": v for k, v in self.surface.to_dict().items()},
            "loop_pair": list(self.loop_pair),
            "loop_length": self.loop_length,
            "loop_is_cycle": self.loop_is_cycle,
            "loop_nonseparating": self.loop_nonseparating,
        }


def cusp_structure(cx: GluingComplex, cusp, loop_pair: Sequence[int] | None = None) -> CuspReport:
    """Glue the rectangles of a cusp class and analyse the torus.

    ``loop_pair`` picks the side type whose edges form the horizontal loop;
    by default the two largest marks of the second triple.
    """
    if cx.n != 6:
        raise ValidationError("cusp structure is defined for n = 6")
    cusp = tuple(tuple(sorted(t)) for t in cusp)
    ckey = tuple(sorted(cusp))
    rects = ideal_rectangles(cx, cusp)
    if loop_pair is None:
        loop_pair = tuple(sorted(cusp[1])[1:])
    loop_pair = tuple(sorted(loop_pair))
    # each side is keyed by its (canonical block, mark pair); glue to the neighbour
    glue = {}
    for r in rects:
        for i in range(4):
            nb, pair = rectangle_neighbour(r, i)
            glue[(r.block, pair)] = (nb, pair)
    cells = []
    for r in rects:
        sides = []
        for i in range(4):
            here = (r.block, r.side_pairs[i])
            there = glue[here]
            sides.append(min(here, there))
        corners = [(c, ckey) for c in r.corners]
        cells.append((sides, corners))
    surface = polygon_surface(cells)

    # the loop: glued sides of the chosen type, as edges between corner keys
    loop_edges = {}
    for sides, corners in cells:
        for i, s in enumerate(sides):
            if s[1] == loop_pair:
                loop_edges[s] = (corners[i], corners[(i + 1) % 4])
    deg: dict = defaultdict(int)
    adj: dict = defaultdict(set)
    for u, v in loop_edges.values():
        deg[u] += 1
        deg[v] += 1
        adj[u].add(v)
        adj[v].add(u)
    is_cycle = bool(loop_edges) and all(d == 2 for d in deg.values())
    if is_cycle:
        seen, stack = set(), [next(iter(adj))]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(adj[u] - seen)
        is_cycle = len(seen) == len(deg)
    # cutting along the loop leaves the rectangles connected iff the loop is nonseparating
    by_side = defaultdict(list)
    for idx, (sides, _) in enumerate(cells):
        for s in sides:
            if s[1] != loop_pair:
                by_side[s].append(idx)
    parent = list(range(len(cells)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for members in by_side.values():
        for m in members[1:]:
            parent[find(m)] = find(members[0])
    nonsep = len({find(i) for i in range(len(cells))}) == 1
    return CuspReport(cusp, len(rects), surface, loop_pair, len(loop_edges), is_cycle, nonsep)


def loop_role(cusp, theta=None, tol: float = 1e-9) -> str:
    """What the horizontal loop of a cusp torus winds around for given weights."""
    t = np.asarray(equal_weights(6) if theta is None else theta, dtype=float)
    first, second = cusp
    s = float(sum(t[m - 1] for m in first))
    if abs(s - math.pi) <= tol:
        return f"parabolic: loop around the cusp {label_str((tuple(first),))}"
    if s < math.pi:
        return f"meridian: winds once around the locus {label_str((tuple(first),))}"
    return f"winds twice around the locus {label_str((tuple(second),))}"


# --------------------------------------------------------------------------- singular locus


@dataclass
class LocusEntry:
    label: tuple
    total_angle: float
    blocks: list

    def to_dict(self) -> dict:
        return {
            "label": label_str(self.label),
            "total_angle": self.total_angle,
            "total_angle_deg": round(math.degrees(self.total_angle), 4),
            "singular": abs(self.total_angle - 2 * math.pi) > 1e-9,
            "blocks": ["".join(str(m) for m in b) if len(b) < 10 else "-".join(
                str(m) for m in b) for b in self.blocks],
        }


def _dihedral_at(block, pair_a, pair_b) -> float:
    fa, fb = block.face_index(pair_a), block.face_index(pair_b)
    return face_relation(block, fa, fb).angle


def singular_locus_report(cx: GluingComplex, theta=None, include_double: bool = False):
    """Total angle around every codimension-two cell (triple collisions by default)."""
    n = cx.n
    if n < 7:
        raise ValidationError("singular loci of this kind exist for n >= 7")
    w = equal_weights(n) if theta is None else theta
    cache: dict = {}

    def block_of(order):
        if order not in cache:
            cache[order] = build_block(order, w)
        return cache[order]

    out = []
    for label, inc in cx.cells[2].items():
        triple = max(len(g) for g in label) == 3
        if not triple and not include_double:
            continue
        order, (a, b) = inc[0]
        total = 0.0
        cur = tuple(order)
        for step in range(len(cx.links[label])):
            blk = block_of(canonical_order(cur))
            pa = (cur[a % n], cur[(a + 1) % n])
            pb = (cur[b % n], cur[(b + 1) % n])
            total += _dihedral_at(blk, pa, pb)
            cur = swap_at(cur, (a, b)[step % 2])
        out.append(LocusEntry(label, total, cx.links[label]))
    return out


# --------------------------------------------------------------------------- serialization


def _block_str(b):
    return "".join(str(m) for m in b) if len(b) < 10 else "-".join(str(m) for m in b)


def complex_summary(cx: GluingComplex) -> dict:
    counts = cx.counts()
    out = {
        "n": cx.n,
        "blocks": cx.block_count,
        "cells_by_codimension": {str(k): v for k, v in counts.items()},
    }
    if cx.n == 5:
        rep = surface_invariants(cx)
        out.update(
            faces=rep.faces,
            edges=rep.edges,
            vertices=rep.vertices,
            euler=rep.euler,
            orientable=rep.orientable,
        )
    if cx.n == 6:
        out["cusps"] = [cusp_structure(cx, c).to_dict() for c in cx.cusp_classes]
        out["ideal_vertex_incidences"] = sum(
            len(ideal_rectangles(cx, c)) for c in cx.cusp_classes)
    if cx.n >= 7:
        rep = singular_locus_report(cx)
        angles = sorted({round(e.total_angle, 9) for e in rep})
        out["singular_loci"] = len(rep)
        out["singular_angles"] = angles
        out["singular_angles_deg"] = [round(math.degrees(a), 4) for a in angles]
    return out


def complex_to_json(cx: GluingComplex, full: bool = False) -> dict:
    """JSON-ready description; ``full`` adds pairings and links."""
    out = complex_summary(cx)
    if full:
        out["block_list"] = [_block_str(b) for b in cx.blocks]
        out["pairings"] = [
            {"block": _block_str(b), "face": f, "to_block": _block_str(b2), "to_face": f2}
            for (b, f), (b2, f2) in sorted(cx.pairings.items())
        ]
        out["links"] = {label_str(k): [_block_str(b) for b in v] for k, v in cx.links.items()}
    return out
