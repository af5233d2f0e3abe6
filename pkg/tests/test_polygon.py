import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conespace.errors import ConsistencyError, ValidationError
from conespace.polygon import (
    MarkedPermutation,
    area_matrix,
    as_order,
    build_area_form,
    canonical_circular,
    closure_basis,
    closure_residual,
    embed_polygon,
    equal_weights,
    random_closed_lengths,
    sample_weights,
    signature_of,
    tangential_lengths,
    triangle_coordinates,
    validate_weights,
    weight_violations,
)
from conespace.polyhedron import TrigBundle

seeds = st.integers(0, 2**32 - 1)
sizes = st.integers(5, 9)


def test_validate_weights_accepts_equal_and_rejects_bad_sums():
    assert validate_weights(np.full(5, 2 * math.pi / 5)).n == 5
    with pytest.raises(ValidationError, match="2\\*pi"):
        validate_weights([1.0] * 5)
    with pytest.raises(ValidationError, match="at least 5"):
        validate_weights([math.pi / 2] * 4)


def test_pair_sum_violations_are_named():
    t = [2.0, 1.3, 1.0, 1.0, 2 * math.pi - 5.3]
    problems = weight_violations(t)
    assert any("theta_1 + theta_2" in p for p in problems)


def test_weight_vector_is_one_based_and_immutable():
    w = equal_weights(6)
    assert w[1] == pytest.approx(math.pi / 3)
    with pytest.raises(ValueError):
        w.theta[0] = 1.0


@given(seeds, sizes)
def test_sampled_weights_are_admissible_and_positive(seed, n):
    w = sample_weights(n, np.random.default_rng(seed))
    assert w.is_positive()
    assert weight_violations(w.theta) == []


@given(st.permutations(range(1, 8)), st.integers(0, 6), st.booleans())
def test_canonical_word_ignores_rotation_and_reflection(word, shift, flip):
    w = tuple(word)
    other = w[shift:] + w[:shift]
    if flip:
        other = other[::-1]
    assert canonical_circular(other) == canonical_circular(w)
    assert MarkedPermutation(other) == MarkedPermutation(w)


@pytest.mark.parametrize("n", [5, 6, 7])
def test_circular_orders_count(n):
    classes = {canonical_circular(p) for p in itertools.permutations(range(1, n + 1))}
    assert len(classes) == math.factorial(n - 1) // 2


def test_as_order_parses_words():
    assert as_order("13245") == (1, 3, 2, 4, 5)
    assert as_order([2, 1, 3, 4, 5]) == (2, 1, 3, 4, 5)
    with pytest.raises(ValidationError):
        as_order("11345")


@given(seeds, sizes)
def test_closure_basis_spans_closed_polygons(seed, n):
    rng = np.random.default_rng(seed)
    w = sample_weights(n, rng)
    order = tuple(rng.permutation(n) + 1)
    b = closure_basis(order, w.theta)
    assert b.shape == (n, n - 2)
    assert np.linalg.matrix_rank(b) == n - 2
    x = b @ rng.normal(size=n - 2)
    assert closure_residual(x, order, w.theta) < 1e-10 * max(1.0, np.max(np.abs(x)))


@given(seeds, sizes)
def test_area_matrix_matches_shoelace(seed, n):
    rng = np.random.default_rng(seed)
    w = sample_weights(n, rng)
    order = tuple(rng.permutation(n) + 1)
    x = random_closed_lengths(order, w.theta, rng)
    _, area = embed_polygon(x, order, w.theta)
    assert x @ area_matrix(order, w.theta) @ x == pytest.approx(area, rel=1e-10, abs=1e-12)


def test_regular_pentagon_area():
    # unit sides: area 5 / (4 tan 36 deg)
    w = equal_weights(5)
    _, area = embed_polygon(np.ones(5), (1, 2, 3, 4, 5), w.theta)
    assert area == pytest.approx(5.0 / (4.0 * math.tan(math.pi / 5)), rel=1e-14)
    assert area == pytest.approx(1.7204774005889671, rel=1e-14)


def test_open_polygon_is_refused():
    w = equal_weights(5)
    with pytest.raises(ConsistencyError):
        embed_polygon([1, 1, 1, 1, 2], (1, 2, 3, 4, 5), w.theta)


def test_tangential_polygon_closes_with_positive_area():
    rng = np.random.default_rng(3)
    for n in range(5, 10):
        w = sample_weights(n, rng)
        x = tangential_lengths(tuple(range(1, n + 1)), w.theta)
        _, area = embed_polygon(x, tuple(range(1, n + 1)), w.theta)
        # circumscribed about the unit circle: area equals half the perimeter
        assert area == pytest.approx(0.5 * np.sum(x), rel=1e-12)


@pytest.mark.parametrize("n", range(5, 11))
def test_equal_weight_signature(n):
    form = build_area_form(tuple(range(1, n + 1)), equal_weights(n))
    assert form.signature == (1, n - 3)


@given(seeds, sizes)
def test_signature_for_random_markings(seed, n):
    rng = np.random.default_rng(seed)
    w = sample_weights(n, rng)
    order = tuple(rng.permutation(n) + 1)
    form = build_area_form(order, w)
    assert form.signature == (1, n - 3)
    assert signature_of(form.gram) == (1, n - 3)


@given(seeds, sizes)
def test_triangle_coordinates_diagonalize_the_area(seed, n):
    rng = np.random.default_rng(seed)
    w = sample_weights(n, rng)
    order = tuple(rng.permutation(n) + 1)
    form = build_area_form(order, w)
    x = random_closed_lengths(order, w.theta, rng, positive=False)
    c = triangle_coordinates(x, form)
    assert c[0] ** 2 - np.sum(c[1:] ** 2) == pytest.approx(form.area(x), rel=1e-9, abs=1e-10)
    assert np.allclose(form.edge_from_coords @ c, x, atol=1e-9 * max(1.0, np.max(np.abs(x))))


def test_negative_area_for_a_degenerate_pentagon():
    # a closed edge vector with one negative length can have negative area
    w = equal_weights(5)
    order = (1, 2, 3, 4, 5)
    form = build_area_form(order, w)
    x = form.edge_from_coords @ np.array([0.0, 1.0, 0.0])
    assert np.any(x < 0)
    _, area = embed_polygon(x, order, w.theta)
    assert area == pytest.approx(-1.0, abs=1e-12)
    assert form.area(x) == pytest.approx(-1.0, abs=1e-12)


def _fan_recurrence(x, n):
    """Equal-weight odd-n coordinates from the side-triangle recurrences."""
    th = 2 * math.pi / n
    m = (n - 1) // 2
    xs = np.r_[0.0, x]
    y, z = [0.0], [0.0]
    for j in range(1, m):
        y.append((xs[j] * math.sin(th) + y[j - 1] * math.sin((j - 1) * th)) / math.sin((j + 1) * th))
        z.append((xs[n - j] * math.sin(th) + z[j - 1] * math.sin((j - 1) * th))
                 / math.sin((j + 1) * th))
    w0 = xs[n] + sum(y) + sum(z)
    out = [w0 * math.sqrt(0.25 * math.tan(th / 2))]
    for j in range(1, m):
        k = math.sqrt(math.sin(j * th) * math.sin((j + 1) * th) / (2 * math.sin(th)))
        out += [y[j] * k, z[j] * k]
    return np.array(out)


@pytest.mark.parametrize("n", [5, 7, 9])
def test_odd_fan_coordinates_match_recurrence(n):
    rng = np.random.default_rng(n)
    order = tuple(range(1, n + 1))
    form = build_area_form(order, equal_weights(n))
    for _ in range(5):
        x = random_closed_lengths(order, equal_weights(n).theta, rng)
        ours = np.sort(np.abs(form.coords(x)))
        ref = np.sort(np.abs(_fan_recurrence(x, n)))
        assert np.allclose(ours, ref, rtol=1e-11)


def test_explicit_cut_sequence_and_bad_cuts():
    w = equal_weights(6)
    form = build_area_form((1, 2, 3, 4, 5, 6), w, cuts=(1, 3, 5))
    assert form.cuts == (1, 3, 5)
    assert form.signature == (1, 3)
    with pytest.raises(ConsistencyError):
        build_area_form((1, 2, 3, 4, 5, 6), w, cuts=(1, 1, 5))


@given(st.lists(st.floats(0.05, 1.2), min_size=5, max_size=5))
def test_hexagon_sine_identity(a):
    # six angles summing to 2 pi
    a = list(a) + [2 * math.pi - sum(a)]
    s = TrigBundle((1, 2, 3, 4, 5, 6), a)
    lhs = s.s(1, 2) * s.s(4) - s.s(5, 6) * s.s(3)
    rhs = s.s(1, 2, 3) * s.s(3, 4)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_three_angle_sine_identity(a, b, c):
    s = TrigBundle((1, 2, 3), [a, b, c])
    lhs = s.s(1) * s.s(3) - s.s(1, 2) * s.s(2, 3)
    assert lhs == pytest.approx(-s.s(2) * s.s(1, 2, 3), abs=1e-12)


def _axis_hits(verts, n):
    """Where the line of each edge meets the real axis (edge 0 lies on it)."""
    v = verts[:, 0] + 1j * verts[:, 1]
    d = np.roll(v, -1) - v
    hits = np.full(n, np.nan)
    for k in range(1, n):
        hits[k] = (v[k] - v[k].imag / d[k].imag * d[k]).real
    return v, hits


@pytest.mark.parametrize("n", [7, 9])
def test_side_triangle_recurrences_from_the_embedding(n):
    # measured on an actual polygon: edge 0 is the base, the side triangles
    # are cut off by extending edges 1, 2, ... and n-1, n-2, ... to the axis
    th = 2 * math.pi / n
    m = (n - 1) // 2
    order = tuple(range(1, n + 1))
    rng = np.random.default_rng(n)
    x = random_closed_lengths(order, equal_weights(n).theta, rng)
    verts, _ = embed_polygon(x, order, equal_weights(n).theta)
    v, hits = _axis_hits(verts, n)
    y = [0.0] + [abs(hits[j + 1] - hits[j]) for j in range(1, m)]
    z = [0.0] + [abs(hits[n - j] - hits[n - j - 1]) if j < n - 1 else 0.0 for j in range(1, m)]
    for j in range(1, m):
        lhs = y[j] * math.sin((j + 1) * th) - y[j - 1] * math.sin((j - 1) * th)
        assert lhs == pytest.approx(x[j] * math.sin(th), abs=1e-12)
        a_j = abs(v[j + 1] - hits[j + 1])
        assert a_j / math.sin(j * th) == pytest.approx(y[j] / math.sin(th), abs=1e-12)
        lhs = z[j] * math.sin((j + 1) * th) - z[j - 1] * math.sin((j - 1) * th)
        assert lhs == pytest.approx(x[n - j] * math.sin(th), abs=1e-12)
