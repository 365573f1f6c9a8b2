"""Small 3D geometric primitives and predicates.

Points are plain ``numpy`` arrays of shape (3,).  The heavier loops are
delegated to the compiled helpers in :mod:`interlock._kernels`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels as K

LENGTH_TOL = 1e-9
DET_TOL = 1e-12


class GeometryError(ValueError):
    """Raised for degenerate or otherwise invalid geometric input."""


def point(x, y=None, z=None) -> np.ndarray:
    """Build a finite float64 point from three numbers or a length-3 sequence."""
    if y is None and z is None:
        p = np.asarray(x, dtype=float).reshape(3)
    else:
        p = np.array([x, y, z], dtype=float)
    if not np.all(np.isfinite(p)):
        raise GeometryError("non-finite coordinate")
    return p


@dataclass(frozen=True)
class Segment:
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", point(self.p))
        object.__setattr__(self, "q", point(self.q))

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.q - self.p))

    @property
    def direction(self) -> np.ndarray:
        d = self.q - self.p
        return d / np.linalg.norm(d)


@dataclass(frozen=True)
class Triangle:
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        for name in ("u", "v", "w"):
            object.__setattr__(self, name, point(getattr(self, name)))

    @property
    def area(self) -> float:
        return 0.5 * float(np.linalg.norm(np.cross(self.v - self.u, self.w - self.u)))


@dataclass(frozen=True)
class Tetrahedron:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, point(getattr(self, name)))

    @property
    def vertices(self) -> tuple[np.ndarray, ...]:
        return (self.a, self.b, self.c, self.d)

    @property
    def volume(self) -> float:
        m = np.stack([self.b - self.a, self.c - self.a, self.d - self.a])
        return abs(float(np.linalg.det(m))) / 6.0

    @property
    def centroid(self) -> np.ndarray:
        return (self.a + self.b + self.c + self.d) / 4.0


@dataclass(frozen=True)
class Disk:
    center: np.ndarray
    radius: float
    normal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", point(self.center))
        n = point(self.normal)
        norm = np.linalg.norm(n)
        if norm == 0.0:
            raise GeometryError("zero disk normal")
        object.__setattr__(self, "normal", n / norm)
        if not self.radius > 0:
            raise GeometryError("disk radius must be positive")


@dataclass(frozen=True)
class HullCombinatorics:
    """Extreme-point labels and facet label sets of a small convex hull."""

    extreme_labels: tuple[str, ...]
    facets: frozenset[frozenset[str]]

    def to_dict(self) -> dict:
        return {
            "extreme_labels": list(self.extreme_labels),
            "facets": sorted(sorted(f) for f in self.facets),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "HullCombinatorics":
        return cls(
            extreme_labels=tuple(sorted(data["extreme_labels"])),
            facets=frozenset(frozenset(f) for f in data["facets"]),
        )


class Pierce(str, Enum):
    PIERCES = "pierces"
    MISSES = "misses"
    DEGENERATE = "degenerate"


_PIERCE_CODES = {K.PIERCES: Pierce.PIERCES, K.MISSES: Pierce.MISSES, K.DEGENERATE: Pierce.DEGENERATE}


class Location(str, Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def _check_segment(s: Segment) -> None:
    if s.length <= LENGTH_TOL:
        raise GeometryError("degenerate segment")


def seg_seg_distance(s1: Segment, s2: Segment) -> float:
    """Minimum Euclidean distance between two closed segments."""
    _check_segment(s1)
    _check_segment(s2)
    return float(K.seg_seg_dist(s1.p, s1.q, s2.p, s2.q))


def pierce_with_margin(s: Segment, t: Triangle, tol: float = LENGTH_TOL) -> tuple[Pierce, float]:
    """Classify s against t and return a signed margin (positive iff it pierces).

    The margin is in length units: the smaller of the endpoints' distances to
    the triangle's plane and the crossing point's distance to the nearest edge.
    """
    if t.area <= DET_TOL:
        raise GeometryError("degenerate triangle")
    code, margin = K.seg_tri_pierce(s.p, s.q, t.u, t.v, t.w, tol)
    return _PIERCE_CODES[code], float(margin)


def seg_triangle_pierce(s: Segment, t: Triangle, tol: float = LENGTH_TOL) -> Pierce:
    return pierce_with_margin(s, t, tol)[0]


def tetra_signed_distance(p: np.ndarray, t: Tetrahedron) -> float:
    """Largest signed distance from p to the outward face planes of t.

    Negative inside, zero on the boundary, and a lower bound on the true
    distance outside.
    """
    if t.volume <= DET_TOL:
        raise GeometryError("degenerate tetrahedron")
    return float(K.tet_signed_dist(point(p), t.a, t.b, t.c, t.d))


def point_in_tetrahedron(p: np.ndarray, t: Tetrahedron, tol: float = LENGTH_TOL) -> Location:
    """Classify p by barycentric coordinates, with a boundary band of width tol."""
    if t.volume <= DET_TOL:
        raise GeometryError("degenerate tetrahedron")
    m = np.column_stack([t.b - t.a, t.c - t.a, t.d - t.a])
    lam = np.linalg.solve(m, point(p) - t.a)
    bary = np.array([1.0 - lam.sum(), *lam])
    # scale the band from length units to barycentric units per face
    heights = np.array([abs(tetra_face_height(t, i)) for i in range(4)])
    band = tol / heights
    if np.all(bary > band):
        return Location.INSIDE
    if np.all(bary >= -band):
        return Location.BOUNDARY
    return Location.OUTSIDE


def tetra_face_height(t: Tetrahedron, i: int) -> float:
    """Distance from vertex i to the plane of the opposite face."""
    verts = t.vertices
    a, b, c = (verts[(i + k) % 4] for k in (1, 2, 3))
    n = np.cross(b - a, c - a)
    return float(np.dot(verts[i] - a, n) / np.linalg.norm(n))


def _hull_2d(pts: np.ndarray) -> list[int]:
    """Indices of the strictly convex 2D hull vertices (monotone chain)."""
    order = sorted(range(len(pts)), key=lambda i: (pts[i][0], pts[i][1]))

    def cross(o, a, b):
        return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) - (
            pts[a][1] - pts[o][1]
        ) * (pts[b][0] - pts[o][0])

    scale = max(np.ptp(pts[:, 0]), np.ptp(pts[:, 1]), 1e-300)
    eps = DET_TOL * scale * scale
    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= eps:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in reversed(order):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= eps:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def convex_hull_small(points: Mapping[str, np.ndarray] | Sequence[tuple[str, np.ndarray]],
                      tol: float = LENGTH_TOL) -> HullCombinatorics:
    """Combinatorial type of the convex hull of at most 8 labeled points.

    Facets come from brute-force enumeration of point triples whose plane
    supports the whole set; coplanar vertices of one face are merged into a
    single facet label set.
    """
    items = list(points.items()) if isinstance(points, Mapping) else list(points)
    if not 4 <= len(items) <= 8:
        raise GeometryError("convex_hull_small needs between 4 and 8 points")
    labels = [lab for lab, _ in items]
    if len(set(labels)) != len(labels):
        raise GeometryError("duplicate labels")
    P = np.array([point(p) for _, p in items])
    scale = float(np.max(np.linalg.norm(P - P.mean(axis=0), axis=1)))
    if scale <= tol:
        raise GeometryError("degenerate hull")

    facets: set[frozenset[str]] = set()
    for i, j, k in itertools.combinations(range(len(P)), 3):
        n = np.cross(P[j] - P[i], P[k] - P[i])
        nn = np.linalg.norm(n)
        if nn <= DET_TOL * scale * scale:
            continue
        n = n / nn
        d = (P - P[i]) @ n
        on = np.abs(d) <= tol
        if np.all(d[~on] < 0) or np.all(d[~on] > 0):
            if np.all(on):
                raise GeometryError("degenerate hull")
            face = np.flatnonzero(on)
            e1 = (P[j] - P[i]) / np.linalg.norm(P[j] - P[i])
            e2 = np.cross(n, e1)
            local = np.column_stack([(P[face] - P[i]) @ e1, (P[face] - P[i]) @ e2])
            verts = [face[m] for m in _hull_2d(local)]
            facets.add(frozenset(labels[m] for m in verts))
    if len(facets) < 4:
        raise GeometryError("degenerate hull")
    extreme = tuple(sorted(set().union(*facets)))
    return HullCombinatorics(extreme_labels=extreme, facets=frozenset(facets))


def _disk_hit(p: np.ndarray, d: np.ndarray, disk: Disk, tol: float) -> bool:
    denom = float(np.dot(d, disk.normal))
    if abs(denom) <= DET_TOL:
        # line parallel to the disk plane: it must lie in it and cross the disk
        if abs(np.dot(p - disk.center, disk.normal)) > tol:
            return False
        w = p - disk.center
        closest = w - np.dot(w, d) * d
        return np.linalg.norm(closest) <= disk.radius + tol
    t = np.dot(disk.center - p, disk.normal) / denom
    return np.linalg.norm(p + t * d - disk.center) <= disk.radius + tol


def line_disk_deviation(s: Segment, d1: Disk, d2: Disk, tol: float = LENGTH_TOL) -> float:
    """Angle in [0, pi/2] between the line of s and the line through the disk centers."""
    _check_segment(s)
    axis = d2.center - d1.center
    if np.linalg.norm(axis) <= LENGTH_TOL:
        raise GeometryError("disk centers coincide")
    d = s.direction
    if not (_disk_hit(s.p, d, d1, tol) and _disk_hit(s.p, d, d2, tol)):
        raise GeometryError("line does not pierce both disks")
    axis = axis / np.linalg.norm(axis)
    c = abs(float(np.dot(d, axis)))
    sn = float(np.linalg.norm(np.cross(d, axis)))
    return math.atan2(sn, c)


def deviation_bound(eps: float, m: float) -> float:
    """First-order bound 2*eps/m on the deviation of a line through two eps-disks."""
    if not (eps > 0 and m > 0):
        raise GeometryError("eps and m must be positive")
    return 2.0 * eps / m


def bounding_diameter(points: Iterable[np.ndarray]) -> float:
    P = np.asarray(list(points), dtype=float)
    diff = P[:, None, :] - P[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max())
