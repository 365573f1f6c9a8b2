"""Executable checkers for the invariants of the tangle, frame and 2-chain threading."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .geom import (
    GeometryError,
    HullCombinatorics,
    Location,
    Pierce,
    Segment,
    Tetrahedron,
    Triangle,
    convex_hull_small,
    pierce_with_margin,
    point_in_tetrahedron,
    tetra_signed_distance,
)
from .linkage import (
    DEFAULT_TOL,
    Trajectory,
    chain_distance,
    is_simple,
    max_rel_length_error,
    random_fold,
)
from .model import FrameSpec, Scene, Tolerances

HULL_LABELS = ("B", "C", "D", "x", "y")
TANGLE_CORNER = ("A", "B", "C", "D", "E", "w", "x", "y", "z")
FRAME_CORNERS = {
    "O": ("A", "B", "C", "D", "w", "x", "y"),
    "P1": ("z", "H"),
    "P2": ("F", "G"),
}


class DegenerateHullError(GeometryError):
    def __init__(self, index: int, cause: Exception):
        super().__init__(f"degenerate hull at snapshot {index}: {cause}")
        self.index = index


@dataclass(frozen=True)
class FrameGeometry:
    O: np.ndarray
    P1: np.ndarray
    P2: np.ndarray

    @classmethod
    def from_spec(cls, spec: FrameSpec) -> "FrameGeometry":
        return cls(*spec.corner_centers)

    @property
    def m(self) -> float:
        return float(np.linalg.norm(self.P1 - self.O))

    @property
    def base(self) -> float:
        return float(np.linalg.norm(self.P2 - self.P1))

    @property
    def beta(self) -> float:
        a = self.O - self.P1
        b = self.P2 - self.P1
        return math.acos(float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b))))

    @property
    def h(self) -> float:
        b = self.P2 - self.P1
        return float(np.linalg.norm(np.cross(self.O - self.P1, b)) / np.linalg.norm(b))


@dataclass(frozen=True)
class VNMeasurement:
    v: np.ndarray
    N: np.ndarray
    vN: float
    N_interior: bool


@dataclass(frozen=True)
class ThreadingReport:
    pierces_DCF: bool
    straddles_yw: bool
    straddles_BC: bool
    straddles_AB: bool
    jag_z: bool
    jag_F: bool
    v_outside_T: bool
    margins: dict[str, float]

    FIELDS = ("pierces_DCF", "straddles_yw", "straddles_BC", "straddles_AB", "jag_z", "jag_F", "v_outside_T")

    @property
    def all_true(self) -> bool:
        return all(getattr(self, f) for f in self.FIELDS)

    def items(self):
        return [(f, getattr(self, f), self.margins[f]) for f in self.FIELDS]


@dataclass(frozen=True)
class PredicateResult:
    name: str
    passed: bool
    margin: float


@dataclass
class ValidationReport:
    results: list[PredicateResult] = field(default_factory=list)

    def add(self, name: str, passed: bool, margin: float = math.nan) -> None:
        self.results.append(PredicateResult(name, bool(passed), float(margin)))

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failed(self) -> list[str]:
        return [r.name for r in self.results if not r.passed]

    def __getitem__(self, name: str) -> PredicateResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "predicates": [
                {"name": r.name, "passed": r.passed, "margin": None if math.isnan(r.margin) else r.margin}
                for r in self.results
            ],
        }

    def format(self) -> str:
        lines = [f"{r.name}: {'PASS' if r.passed else 'FAIL'}  margin={r.margin:.6g}" for r in self.results]
        return "\n".join(lines)


def _require(scene: Scene, labels: Iterable[str]) -> None:
    missing = [lab for lab in labels if lab not in scene]
    if missing:
        raise KeyError(f"scene lacks joint labels {missing}")


# ---------------------------------------------------------------------------
# confinement and hull combinatorics


def corner_center(scene: Scene, which: str) -> np.ndarray:
    if which == "P":
        _require(scene, ("x", "y"))
        return 0.5 * (scene["x"] + scene["y"])
    if scene.frame is None:
        raise ValueError(f"corner {which!r} needs a frame")
    return {"O": scene.frame.O, "P1": scene.frame.P1, "P2": scene.frame.P2}[which]


def corner_joints(which: str) -> tuple[str, ...]:
    if which == "P":
        return TANGLE_CORNER
    try:
        return FRAME_CORNERS[which]
    except KeyError:
        raise ValueError(f"unknown corner {which!r}") from None


def check_confinement(scene: Scene, which: str = "P") -> tuple[bool, float]:
    """All joints of a corner inside the eps-ball about its center.

    ``which`` is ``"P"`` for a bare tangle (center = midpoint of xy) or one of
    ``"O"``, ``"P1"``, ``"P2"`` for the frame corners.  The margin is
    ``eps - max distance``.
    """
    labels = corner_joints(which)
    _require(scene, labels)
    center = corner_center(scene, which)
    dmax = max(float(np.linalg.norm(scene[lab] - center)) for lab in labels)
    margin = scene.eps - dmax
    return margin > 0, margin


def tangle_hull(scene: Scene) -> HullCombinatorics:
    _require(scene, HULL_LABELS)
    return convex_hull_small({lab: scene[lab] for lab in HULL_LABELS})


def golden_tangle_hull() -> HullCombinatorics:
    from .construction import _load_fixture

    return HullCombinatorics.from_dict(_load_fixture()["golden_hull"])


def check_hull_invariance(traj: Trajectory | Sequence[Scene], reference: HullCombinatorics) -> bool:
    snapshots = traj.snapshots if isinstance(traj, Trajectory) else traj
    for i, snap in enumerate(snapshots):
        try:
            hull = tangle_hull(snap)
        except GeometryError as exc:
            raise DegenerateHullError(i, exc) from exc
        if hull != reference:
            return False
    return True


def tangle_crossing(scene: Scene) -> tuple[bool, float]:
    """A short 4-chain link passes through the region spanned by the 3-chain.

    Accepts BC or CD piercing triangle wxy or xyz; the margin is the best
    of those four pierce margins.
    """
    _require(scene, ("w", "x", "y", "z", "B", "C", "D"))
    p = scene.__getitem__
    best = -math.inf
    for s in (("B", "C"), ("C", "D")):
        for t in (("w", "x", "y"), ("x", "y", "z")):
            _, m = pierce_with_margin(Segment(p(s[0]), p(s[1])), Triangle(*(p(k) for k in t)))
            best = max(best, m)
    return best > 0, best


# ---------------------------------------------------------------------------
# threading


def _pierce(scene: Scene, seg: tuple[str, str], tri: tuple[str, str, str]) -> tuple[bool, float]:
    p = scene.__getitem__
    kind, margin = pierce_with_margin(Segment(p(seg[0]), p(seg[1])), Triangle(*(p(k) for k in tri)))
    return kind is Pierce.PIERCES, margin


THREADING_LABELS = ("a", "v", "b", "B", "C", "D", "F", "G", "H", "y", "z", "w", "A")


def check_threading(scene: Scene) -> ThreadingReport:
    _require(scene, THREADING_LABELS)
    res = {
        "pierces_DCF": _pierce(scene, ("v", "a"), ("D", "C", "F")),
        "straddles_yw": _pierce(scene, ("y", "w"), ("a", "v", "b")),
        "straddles_BC": _pierce(scene, ("B", "C"), ("a", "v", "b")),
        "straddles_AB": _pierce(scene, ("A", "B"), ("a", "v", "b")),
        "jag_z": _pierce(scene, ("v", "a"), ("y", "z", "H")),
        "jag_F": _pierce(scene, ("v", "b"), ("D", "F", "G")),
    }
    T = Tetrahedron(scene["B"], scene["C"], scene["D"], scene["F"])
    where = point_in_tetrahedron(scene["v"], T)
    res["v_outside_T"] = (where is Location.OUTSIDE, tetra_signed_distance(scene["v"], T))
    flags = {k: v[0] for k, v in res.items()}
    return ThreadingReport(**flags, margins={k: v[1] for k, v in res.items()})


def threading_ok_fast(X: np.ndarray, idx: dict[str, int]) -> bool:
    """Same predicates as :func:`check_threading` on a raw coordinate array."""
    g = lambda k: X[idx[k]]  # noqa: E731
    tol = 1e-9
    checks = (
        ("v", "a", "D", "C", "F"),
        ("y", "w", "a", "v", "b"),
        ("B", "C", "a", "v", "b"),
        ("A", "B", "a", "v", "b"),
        ("v", "a", "y", "z", "H"),
        ("v", "b", "D", "F", "G"),
    )
    for s0, s1, t0, t1, t2 in checks:
        code, _ = K.seg_tri_pierce(g(s0), g(s1), g(t0), g(t1), g(t2), tol)
        if code != K.PIERCES:
            return False
    return K.tet_signed_dist(g("v"), g("B"), g("C"), g("D"), g("F")) > tol


# ---------------------------------------------------------------------------
# |vN| bounds


def vN_bounds(fg: FrameGeometry | FrameSpec, eps: float) -> tuple[float, float]:
    """Lower and upper bound on the distance from v to the base line P1P2."""
    if isinstance(fg, FrameSpec):
        fg = FrameGeometry.from_spec(fg)
    angle = fg.beta + 2.0 * eps / fg.m
    if not (0 < fg.beta < math.pi / 2 and angle < math.pi / 2):
        raise ValueError("angle not acute")
    return fg.h - eps, fg.base * math.tan(angle)


def measure_vN(scene: Scene) -> VNMeasurement:
    if scene.frame is None:
        raise ValueError("scene has no frame")
    _require(scene, ("v",))
    P1, P2 = scene.frame.P1, scene.frame.P2
    v = scene["v"]
    d = P2 - P1
    t = float(np.dot(v - P1, d) / np.dot(d, d))
    N = P1 + t * d
    return VNMeasurement(v=v, N=N, vN=float(np.linalg.norm(v - N)), N_interior=0.0 <= t <= 1.0)


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    observed_min: float
    observed_max: float
    lo: float
    hi: float
    feasible: bool

    @property
    def width(self) -> float:
        return self.observed_max - self.observed_min


def sweep_epsilon(frame_shape, eps_list: Sequence[float], samples_per_eps: int, seed: int,
                  leg_length: float = 5.0, tol: Tolerances = DEFAULT_TOL) -> list[SweepRow]:
    """Observed |vN| envelope of random feasible 2-chain placements per eps.

    The 10-chain is frozen and only a, v, b move.  Every row reuses the same
    random stream, so rows differ only through eps.
    """
    from .construction import InfeasibleError, build_full_scene, frame_from_shape

    eps_list = list(eps_list)
    if not eps_list or any(e <= 0 for e in eps_list):
        raise ValueError("eps list must be non-empty and positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps list must be strictly descending")
    rows = []
    for eps in eps_list:
        try:
            spec = frame_from_shape(frame_shape, eps)
            scene = build_full_scene(spec, leg_length)
            lo, hi = vN_bounds(spec, eps)
        except (InfeasibleError, ValueError):
            rows.append(SweepRow(eps, math.nan, math.nan, math.nan, math.nan, False))
            continue
        if samples_per_eps <= 0:
            rows.append(SweepRow(eps, math.nan, math.nan, lo, hi, True))
            continue
        frozen = scene.chain("ten").labels
        traj = random_fold(scene, seed, eps / 200.0, samples_per_eps, frozen_labels=frozen, tol=tol)
        values = [measure_vN(s).vN for s in traj.snapshots[1:]]
        rows.append(SweepRow(eps, min(values), max(values), lo, hi, True))
    return rows


SWEEP_HEADER = ("epsilon", "observed_min", "observed_max", "lo", "hi", "feasible")


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    """CSV text for sweep rows: 12 significant digits in scientific notation."""
    lines = [",".join(SWEEP_HEADER)]
    for r in rows:
        nums = (r.epsilon, r.observed_min, r.observed_max, r.lo, r.hi)
        lines.append(",".join(f"{x:.11e}" for x in nums) + "," + str(r.feasible).lower())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# aggregate validation


def validate_tangle(scene: Scene, report: ValidationReport | None = None) -> ValidationReport:
    report = report or ValidationReport()
    eps = scene.eps
    expected = {"three": [eps / 2, eps / 6, eps / 2], "four": [eps / 2, eps / 6, eps / 6, eps / 2]}
    for name, lengths in expected.items():
        c = scene.chain(name)
        err = float(np.max(np.abs(np.linalg.norm(np.diff(c.joints, axis=0), axis=1) - lengths))) / eps
        report.add(f"lengths_{name}", err < 1e-9, -err)
    ok, margin = check_confinement(scene, "P")
    report.add("confinement_P", ok, margin)
    try:
        hull = tangle_hull(scene)
        report.add("hull_golden", hull == golden_tangle_hull(), math.nan)
    except GeometryError:
        report.add("hull_golden", False, math.nan)
    ok, margin = tangle_crossing(scene)
    report.add("tangle_crossing", ok, margin)
    return report


def validate_frame_chain(scene: Scene, report: ValidationReport | None = None) -> ValidationReport:
    report = report or ValidationReport()
    spec = scene.frame
    ten = scene.chain("ten")
    report.add("link_count_10", ten.n_links == 10, ten.n_links - 10)
    for corner in ("O", "P1", "P2"):
        ok, margin = check_confinement(scene, corner)
        report.add(f"confinement_{corner}", ok, margin)
    c = spec.corner_centers
    gap = min(float(np.linalg.norm(c[i] - c[j])) for i, j in ((0, 1), (0, 2), (1, 2))) - 2 * spec.eps
    report.add("corner_balls_disjoint", gap > 0, gap)
    jag = [float(np.linalg.norm(scene["H"] - scene["z"])), float(np.linalg.norm(scene["G"] - scene["F"]))]
    report.add("jag_links_short", max(jag) < spec.eps, spec.eps - max(jag))
    clearance = DEFAULT_TOL.clearance_for(scene)
    report.add("simple_ten", is_simple(ten, DEFAULT_TOL, clearance), math.nan)
    return report


def validate_construction(scene: Scene, tol: Tolerances = DEFAULT_TOL) -> ValidationReport:
    """Run every checker that applies to the scene and collect pass/fail with margins."""
    report = ValidationReport()
    names = {c.name for c in scene.chains}
    clearance = tol.clearance_for(scene)
    err = max_rel_length_error(scene)
    report.add("rest_lengths", err < tol.len_tol, tol.len_tol - err)
    for c in scene.chains:
        if c.name != "ten":
            report.add(f"simple_{c.name}", is_simple(c, tol, clearance), math.nan)
    chains = scene.chains
    for i in range(len(chains)):
        for j in range(i + 1, len(chains)):
            d = chain_distance(chains[i], chains[j])
            report.add(f"disjoint_{chains[i].name}_{chains[j].name}", d >= clearance, d - clearance)
    if {"three", "four"} <= names:
        validate_tangle(scene, report)
    if "ten" in names and scene.frame is not None:
        validate_frame_chain(scene, report)
    if "two" in names and "ten" in names:
        th = check_threading(scene)
        for name, ok, margin in th.items():
            report.add(name, ok, margin)
        lo, hi = vN_bounds(scene.frame, scene.eps)
        vn = measure_vN(scene).vN
        report.add("vN_within_bounds", lo <= vn <= hi, min(vn - lo, hi - vn))
    return report
