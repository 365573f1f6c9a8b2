"""Property-based checks of the geometric kernels."""

import numpy as np
from hypothesis import assume, given, settings, strategies as st

from interlock.geom import (
    Location, Pierce, Segment, Tetrahedron, Triangle, convex_hull_small,
    point_in_tetrahedron, seg_seg_distance, seg_triangle_pierce,
)

coord = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
points = st.tuples(coord, coord, coord).map(lambda t: np.array(t, dtype=float))


def rotation(angles):
    a, b, c = angles
    Rz = np.array([[np.cos(a), -np.sin(a), 0], [np.sin(a), np.cos(a), 0], [0, 0, 1]])
    Ry = np.array([[np.cos(b), 0, np.sin(b)], [0, 1, 0], [-np.sin(b), 0, np.cos(b)]])
    Rx = np.array([[1, 0, 0], [0, np.cos(c), -np.sin(c)], [0, np.sin(c), np.cos(c)]])
    return Rz @ Ry @ Rx


angles = st.tuples(*[st.floats(min_value=-np.pi, max_value=np.pi)] * 3)


@given(points, points, points, points)
def test_seg_distance_symmetric_and_bounded(p, q, r, s):
    assume(np.linalg.norm(q - p) > 1e-3 and np.linalg.norm(s - r) > 1e-3)
    s1, s2 = Segment(p, q), Segment(r, s)
    d = seg_seg_distance(s1, s2)
    assert d >= 0
    assert abs(d - seg_seg_distance(s2, s1)) < 1e-9
    assert abs(d - seg_seg_distance(Segment(q, p), s2)) < 1e-9
    assert d <= min(np.linalg.norm(a - b) for a in (p, q) for b in (r, s)) + 1e-9


@given(points, points, points, points, angles, points)
def test_seg_distance_rigid_invariant(p, q, r, s, ang, shift):
    assume(np.linalg.norm(q - p) > 1e-3 and np.linalg.norm(s - r) > 1e-3)
    R = rotation(ang)
    before = seg_seg_distance(Segment(p, q), Segment(r, s))
    after = seg_seg_distance(Segment(R @ p + shift, R @ q + shift), Segment(R @ r + shift, R @ s + shift))
    assert abs(before - after) < 1e-7


@given(points, points, st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.1, 5))
def test_segment_through_an_interior_point_pierces(a, b, s, t, height):
    c = np.array([0.0, 0.0, 0.0])
    a = a.copy()
    b = b.copy()
    a[2] = b[2] = 0.0
    tri = Triangle(a, b, c)
    assume(tri.area > 0.5)
    u = min(s, t) * 0.5
    w = (1 - s) * 0.5
    inner = u * a + w * b + (1 - u - w) * c
    n = np.array([0.0, 0.0, 1.0])
    sg = Segment(inner - height * n, inner + height * n)
    assert seg_triangle_pierce(sg, tri) is Pierce.PIERCES
    assert seg_triangle_pierce(Segment(sg.q, sg.p), tri) is Pierce.PIERCES


@given(st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4))
def test_convex_combination_inside_tetrahedron(weights):
    T = Tetrahedron(np.array([0.0, 0, 0]), np.array([2.0, 0, 0]), np.array([0, 2.0, 0]), np.array([0, 0, 2.0]))
    w = np.array(weights) / sum(weights)
    p = sum(wi * vi for wi, vi in zip(w, T.vertices))
    assume(w.min() > 1e-6)
    assert point_in_tetrahedron(p, T) is Location.INSIDE


@settings(max_examples=50)
@given(st.permutations(list("abcde")), angles, points)
def test_hull_invariant_under_relabel_order_and_rigid_motion(order, ang, shift):
    base = {"a": [0, 0, 0], "b": [1, 0, 0], "c": [0, 1, 0], "d": [0, 0, 1], "e": [0.2, 0.2, 0.2]}
    ref = convex_hull_small({k: np.array(v, float) for k, v in base.items()})
    R = rotation(ang)
    moved = [(k, R @ np.array(base[k], float) + shift) for k in order]
    assert convex_hull_small(moved) == ref
