"""Folding motions of open chains: straight links, fixed lengths, no crossings."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .geom import Segment, seg_seg_distance
from .model import Chain, Scene, Tolerances

DEFAULT_TOL = Tolerances()


class RejectReason(str, Enum):
    PROJECTION_FAILED = "projection_failed"
    SELF_INTERSECTION = "self_intersection"
    INTER_CHAIN_COLLISION = "inter_chain_collision"


_REASONS = {
    K.PROJECTION_FAILED: RejectReason.PROJECTION_FAILED,
    K.SELF_INTERSECTION: RejectReason.SELF_INTERSECTION,
    K.INTER_CHAIN_COLLISION: RejectReason.INTER_CHAIN_COLLISION,
}


@dataclass(frozen=True)
class Rejection:
    reason: RejectReason

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class StepMeta:
    label: str
    displacement: np.ndarray

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.displacement))


@dataclass
class Trajectory:
    """Accepted fold steps from an initial scene.

    ``snapshots[0]`` is the initial scene and ``snapshots[i + 1]`` results from
    applying ``step_meta[i]``.  Rejected attempts are only counted.
    """

    snapshots: list[Scene]
    step_meta: list[StepMeta]
    frozen_labels: frozenset[str] = frozenset()
    tol: Tolerances = DEFAULT_TOL
    rejections: Counter = field(default_factory=Counter)

    @property
    def initial(self) -> Scene:
        return self.snapshots[0]

    @property
    def final(self) -> Scene:
        return self.snapshots[-1]

    def __len__(self) -> int:
        return len(self.snapshots)


def link_lengths(c: Chain) -> np.ndarray:
    return np.linalg.norm(np.diff(c.joints, axis=0), axis=1)


def max_rel_length_error(scene: Scene) -> float:
    lay = scene.layout
    return float(K.max_rel_length_error(np.ascontiguousarray(scene.coords), lay.li, lay.lj, lay.rest))


def _links(c: Chain) -> list[Segment]:
    return [Segment(c.joints[k], c.joints[k + 1]) for k in range(c.n_links)]


def is_simple(c: Chain, tol: Tolerances = DEFAULT_TOL, clearance: float | None = None) -> bool:
    """Non-adjacent links at least `clearance` apart; adjacent links meet only at their joint.

    clearance defaults to ``tol.clearance`` (0 when that is unset).
    """
    if clearance is None:
        clearance = tol.clearance or 0.0
    J = np.ascontiguousarray(c.joints)
    n = c.n_links
    for a in range(n):
        for b in range(a + 1, n):
            if b == a + 1:
                d = K.adjacent_overlap_dist(J, a, a + 1, a + 2)
            else:
                d = K.seg_seg_dist(J[a], J[a + 1], J[b], J[b + 1])
            if d < clearance or d <= 0.0:
                return False
    return True


def chain_distance(c1: Chain, c2: Chain) -> float:
    return min(seg_seg_distance(s, t) for s in _links(c1) for t in _links(c2))


def chains_disjoint(c1: Chain, c2: Chain, tol: Tolerances = DEFAULT_TOL, clearance: float | None = None) -> bool:
    if clearance is None:
        clearance = tol.clearance or 0.0
    d = chain_distance(c1, c2)
    return d >= clearance and d > 0


def scene_valid(scene: Scene, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Independent re-validation of every folding invariant of a scene."""
    clearance = tol.clearance_for(scene)
    if max_rel_length_error(scene) >= tol.len_tol:
        return False
    if not all(is_simple(c, tol, clearance) for c in scene.chains):
        return False
    chains = scene.chains
    return all(
        chains_disjoint(chains[i], chains[j], tol, clearance)
        for i in range(len(chains))
        for j in range(i + 1, len(chains))
    )


class Folder:
    """Pre-packed kernel arguments for repeated fold steps on one scene topology."""

    def __init__(self, scene: Scene, tol: Tolerances = DEFAULT_TOL, frozen: Iterable[str] = ()):
        self.template = scene
        self.tol = tol
        lay = scene.layout
        self.layout = lay
        self.frozen = frozenset(frozen)
        unknown = self.frozen - set(lay.labels)
        if unknown:
            raise KeyError(f"unknown joint labels {sorted(unknown)}")
        self.invm = np.array([0.0 if lab in self.frozen else 1.0 for lab in lay.labels])
        self.movable = [lab for lab in lay.labels if lab not in self.frozen]
        self.clearance = tol.clearance_for(scene)

    def index(self, label: str) -> int:
        try:
            return self.layout.label_index[label]
        except KeyError:
            raise KeyError(f"unknown joint label {label!r}") from None

    def step(self, X: np.ndarray, k: int, disp: np.ndarray) -> tuple[int, np.ndarray]:
        lay = self.layout
        return K.fold(
            X, k, disp, lay.li, lay.lj, lay.rest, self.invm, lay.link_chain,
            self.tol.len_tol, self.tol.max_projection_sweeps, self.clearance,
        )


def fold_step(scene: Scene, joint_label: str, displacement, tol: Tolerances = DEFAULT_TOL,
              frozen: Iterable[str] = ()) -> Scene | Rejection:
    """Move one joint, restore link lengths by projection, and accept only valid results."""
    folder = Folder(scene, tol, frozen)
    k = folder.index(joint_label)
    disp = np.asarray(displacement, dtype=float).reshape(3)
    code, Y = folder.step(np.ascontiguousarray(scene.coords), k, disp)
    if code != K.ACCEPTED:
        return Rejection(_REASONS[code])
    return scene.with_coords(Y)


def random_direction(rng: np.random.Generator) -> np.ndarray:
    while True:
        d = rng.normal(size=3)
        n = np.linalg.norm(d)
        if n > 1e-12:
            return d / n


def random_fold(scene: Scene, rng_seed: int, step_size: float, n_steps: int,
                frozen_labels: Iterable[str] = (), tol: Tolerances = DEFAULT_TOL,
                max_attempts: int | None = None) -> Trajectory:
    """Random walk of accepted fold steps.

    Each attempt picks a movable joint uniformly and a uniformly random
    direction scaled by ``min(step_size, clearance / 2)``, so no link can
    pass through another between snapshots.  ``n_steps`` counts accepted
    steps; at most ``max_attempts`` (default ``20 * n_steps``) are tried.
    """
    if not step_size > 0:
        raise ValueError("step_size must be positive")
    folder = Folder(scene, tol, frozen_labels)
    step = min(step_size, folder.clearance / 2)
    rng = np.random.default_rng(rng_seed)
    traj = Trajectory([scene], [], folder.frozen, tol)
    if max_attempts is None:
        max_attempts = 20 * n_steps
    X = np.ascontiguousarray(scene.coords)
    movable = folder.movable
    attempts = 0
    while len(traj.step_meta) < n_steps and attempts < max_attempts and movable:
        attempts += 1
        label = movable[rng.integers(len(movable))]
        disp = step * random_direction(rng)
        code, Y = folder.step(X, folder.index(label), disp)
        if code != K.ACCEPTED:
            traj.rejections[_REASONS[code].value] += 1
            continue
        X = Y
        traj.snapshots.append(scene.with_coords(Y))
        traj.step_meta.append(StepMeta(label, disp))
    return traj


class ReplayMismatch(RuntimeError):
    pass


def replay_steps(initial: Scene, steps: Sequence[StepMeta], tol: Tolerances = DEFAULT_TOL,
                 frozen: Iterable[str] = ()) -> list[Scene]:
    """Re-apply recorded steps; every one of them must be accepted again."""
    folder = Folder(initial, tol, frozen)
    X = np.ascontiguousarray(initial.coords)
    out = [initial]
    for i, meta in enumerate(steps):
        code, Y = folder.step(X, folder.index(meta.label), np.asarray(meta.displacement, dtype=float))
        if code != K.ACCEPTED:
            raise ReplayMismatch(f"step {i} rejected on replay ({_REASONS[code].value})")
        X = Y
        out.append(initial.with_coords(Y))
    return out
