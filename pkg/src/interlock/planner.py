"""Randomized search for a folding motion that pulls two chains apart.

The search grows a tree of fold-step-reachable scenes.  A failed search is
only weak evidence of interlocking; a successful one carries a witness
trajectory that can be replayed and re-validated independently.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .geom import bounding_diameter
from .linkage import DEFAULT_TOL, Folder, StepMeta, Trajectory, random_direction
from .model import Scene, Tolerances

ESCAPE_SAMPLES = 100
ESCAPE_FACTOR = 10.0
CAMPAIGN_HEADER = ("seed", "separated", "iterations", "best_separation")


@dataclass(frozen=True)
class PlannerConfig:
    budget: int = 10_000
    step_size: float = 1.0
    rng_seed: int = 0
    R_sep: float | None = None  # None: twice the anchor chain's bounding diameter
    goal_bias: float = 0.2
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        if self.budget < 0:
            raise ValueError("budget must be non-negative")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if self.R_sep is not None and not self.R_sep > 0:
            raise ValueError("R_sep must be positive")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ValueError("goal_bias must lie in [0, 1]")

    def with_seed(self, seed: int) -> "PlannerConfig":
        return PlannerConfig(self.budget, self.step_size, seed, self.R_sep, self.goal_bias, self.tol)


@dataclass
class UnlockReport:
    separated: bool
    best_separation: float
    iterations: int
    seed: int
    witness: Trajectory | None = None
    nodes: int = 1
    R_sep: float = math.nan
    threading_checked: int = 0
    threading_held: int = 0
    rejections: dict = field(default_factory=dict)

    @property
    def threading_fraction(self) -> float:
        if self.threading_checked == 0:
            return math.nan
        return self.threading_held / self.threading_checked

    def to_dict(self) -> dict:
        out = {
            "separated": self.separated,
            "best_separation": self.best_separation,
            "iterations": self.iterations,
            "seed": self.seed,
            "nodes": self.nodes,
            "R_sep": self.R_sep,
            "threading_checked": self.threading_checked,
            "threading_held": self.threading_held,
            "rejections": dict(self.rejections),
            "witness": None,
        }
        if self.witness is not None:
            out["witness"] = [
                {"label": m.label, "displacement": [float(x) for x in m.displacement]}
                for m in self.witness.step_meta
            ]
        return out

    def csv_row(self) -> tuple:
        return (self.seed, str(self.separated).lower(), self.iterations, f"{self.best_separation:.11e}")


# ---------------------------------------------------------------------------
# separation criterion


def _roles(scene: Scene) -> tuple[int, int]:
    """(anchor, mover) chain indices: the mover is the 2-chain if present, else the last chain."""
    if len(scene.chains) != 2:
        raise ValueError("the planner needs a scene with exactly two chains")
    names = scene.layout.chain_names
    mover = names.index("two") if "two" in names else 1
    return 1 - mover, mover


def separation_distance(scene: Scene, c1: str, c2: str) -> float:
    """Minimum distance between any link of chain c1 and any link of chain c2."""
    i, j = scene.chain_index(c1), scene.chain_index(c2)
    lay = scene.layout
    return float(K.inter_min_dist(np.ascontiguousarray(scene.coords), lay.li, lay.lj, lay.link_chain, i, j))


def default_R_sep(scene: Scene) -> float:
    anchor, _ = _roles(scene)
    return 2.0 * bounding_diameter(scene.chains[anchor].joints)


def _centroids(X: np.ndarray, scene: Scene, anchor: int, mover: int) -> tuple[np.ndarray, np.ndarray]:
    sl = scene.layout.chain_slices
    return X[sl[anchor]].mean(axis=0), X[sl[mover]].mean(axis=0)


def _escape_clear(X: np.ndarray, scene: Scene, anchor: int, mover: int, R_sep: float, clearance: float) -> bool:
    ca, cm = _centroids(X, scene, anchor, mover)
    d = cm - ca
    n = np.linalg.norm(d)
    if n == 0.0:
        return False
    lay = scene.layout
    T = ESCAPE_FACTOR * R_sep * d / n
    if not K.translation_clear(X, lay.li, lay.lj, lay.link_chain, mover, T, ESCAPE_SAMPLES, clearance):
        return False
    # the samples are R_sep/10 apart; also rule out passing through a thin link in between
    return bool(K.sweep_clear(X, lay.li, lay.lj, lay.link_chain, mover, T, clearance))


def is_separated(scene: Scene, cfg: PlannerConfig = PlannerConfig()) -> bool:
    """Far apart and a straight rigid escape of the mover is collision-free."""
    anchor, mover = _roles(scene)
    R_sep = cfg.R_sep if cfg.R_sep is not None else default_R_sep(scene)
    names = scene.layout.chain_names
    if separation_distance(scene, names[anchor], names[mover]) <= R_sep:
        return False
    X = np.ascontiguousarray(scene.coords)
    return _escape_clear(X, scene, anchor, mover, R_sep, cfg.tol.clearance_for(scene))


# ---------------------------------------------------------------------------
# tree search


def _threading_index(scene: Scene) -> dict[str, int] | None:
    from .checks import THREADING_LABELS

    if all(k in scene for k in THREADING_LABELS):
        return dict(scene.layout.label_index)
    return None


def attempt_unlock(scene: Scene, cfg: PlannerConfig = PlannerConfig()) -> UnlockReport:
    """Grow a tree of folded scenes until the chains separate or the budget runs out.

    Each of the ``budget`` iterations tries one fold step.  With probability
    ``1 - goal_bias`` it expands a uniformly chosen node by moving a uniformly
    chosen joint (of either chain) in a random direction.  Otherwise it draws
    a far escape target for the mover's centroid (relative to the anchor's),
    expands the node whose mover lies nearest to that target, and pushes a
    random joint of the mover (v, or a leg end, for the 2-chain) toward it.  An
    accepted goal step is extended from the new node toward the same target
    on the following iterations until a step is rejected.
    The run is a deterministic function of the scene and config.
    """
    from .checks import threading_ok_fast

    anchor, mover = _roles(scene)
    R_sep = cfg.R_sep if cfg.R_sep is not None else default_R_sep(scene)
    folder = Folder(scene, cfg.tol)
    step = min(cfg.step_size, folder.clearance / 2.0)
    lay = scene.layout
    X0 = np.ascontiguousarray(scene.coords, dtype=float)
    rng = np.random.default_rng(cfg.rng_seed)

    n_alloc = cfg.budget + 1
    coords = np.empty((n_alloc,) + X0.shape)
    rel = np.empty((n_alloc, 3))  # mover centroid minus anchor centroid
    parent = np.full(n_alloc, -1, dtype=np.int64)
    moves: list[StepMeta | None] = [None]
    coords[0] = X0
    ca, cm = _centroids(X0, scene, anchor, mover)
    rel[0] = cm - ca
    n_nodes = 1

    def sep(X):
        return float(K.inter_min_dist(X, lay.li, lay.lj, lay.link_chain, anchor, mover))

    best = sep(X0)
    thr_idx = _threading_index(scene)
    thr_checked = thr_held = 0
    if thr_idx is not None:
        thr_checked = 1
        thr_held = int(threading_ok_fast(X0, thr_idx))

    mover_labels = [lab for lab in scene.chains[mover].labels if lab in folder.movable]
    movable_idx = [folder.index(lab) for lab in folder.movable]
    rejections: dict[str, int] = {}

    def report(separated: bool, iterations: int, leaf: int | None) -> UnlockReport:
        witness = None
        if separated:
            path = []
            k = leaf
            while k > 0:
                path.append(k)
                k = parent[k]
            path.reverse()
            witness = Trajectory([scene], [], frozenset(), cfg.tol)
            for k in path:
                witness.snapshots.append(scene.with_coords(coords[k].copy()))
                witness.step_meta.append(moves[k])
        return UnlockReport(separated, best, iterations, cfg.rng_seed, witness, n_nodes, R_sep,
                            thr_checked, thr_held, rejections)

    if best > R_sep and _escape_clear(X0, scene, anchor, mover, R_sep, folder.clearance):
        return report(True, 0, 0)

    target = None  # escape target being extended, if the last goal step succeeded
    extend_from = -1
    for it in range(1, cfg.budget + 1):
        if target is not None or (mover_labels and rng.random() < cfg.goal_bias):
            if target is None:
                target = 2.0 * R_sep * random_direction(rng)
                node = int(np.argmin(np.sum((rel[:n_nodes] - target) ** 2, axis=1)))
            else:
                node = extend_from
            k = folder.index(mover_labels[rng.integers(len(mover_labels))])
            d = target - rel[node]
            disp = step * d / np.linalg.norm(d)
            extending = True
        else:
            extending = False
            node = int(rng.integers(n_nodes))
            k = movable_idx[rng.integers(len(movable_idx))]
            disp = step * random_direction(rng)
        code, Y = folder.step(coords[node], k, disp)
        if code != K.ACCEPTED:
            reason = {K.PROJECTION_FAILED: "projection_failed", K.SELF_INTERSECTION: "self_intersection",
                      K.INTER_CHAIN_COLLISION: "inter_chain_collision"}[code]
            rejections[reason] = rejections.get(reason, 0) + 1
            target = None
            continue
        new = n_nodes
        coords[new] = Y
        ca, cm = _centroids(Y, scene, anchor, mover)
        rel[new] = cm - ca
        parent[new] = node
        moves.append(StepMeta(lay.labels[k], disp))
        n_nodes += 1
        if extending:
            extend_from = new
        if thr_idx is not None:
            thr_checked += 1
            thr_held += int(threading_ok_fast(Y, thr_idx))
        s = sep(Y)
        if s > best:
            best = s
        if s > R_sep and _escape_clear(Y, scene, anchor, mover, R_sep, folder.clearance):
            return report(True, it, new)
    return report(False, cfg.budget, None)


class ReplayError(RuntimeError):
    pass


def replay(report: UnlockReport, initial: Scene, cfg: PlannerConfig | None = None) -> Scene:
    """Re-run the witness from ``initial`` and confirm it ends separated."""
    from .linkage import ReplayMismatch, replay_steps

    if report.witness is None:
        raise ReplayError("no witness")
    cfg = cfg or PlannerConfig(R_sep=report.R_sep if math.isfinite(report.R_sep) else None)
    tol = report.witness.tol
    try:
        scenes = replay_steps(initial, report.witness.step_meta, tol)
    except (ReplayMismatch, KeyError) as exc:
        raise ReplayError(f"replay mismatch: {exc}") from None
    for i, (got, want) in enumerate(zip(scenes, report.witness.snapshots)):
        if got.coords.shape != want.coords.shape or np.max(np.abs(got.coords - want.coords)) > 1e-12:
            raise ReplayError(f"replay mismatch at snapshot {i}")
    final = scenes[-1]
    if not is_separated(final, cfg):
        raise ReplayError("replay mismatch: final scene is not separated")
    return final


# ---------------------------------------------------------------------------
# campaigns


def _run_one(args) -> UnlockReport:
    scene, cfg = args
    return attempt_unlock(scene, cfg)


def run_campaign(scene: Scene, cfg: PlannerConfig, seeds: Iterable[int], workers: int = 1) -> list[UnlockReport]:
    """One independent planner run per seed (optionally in worker processes)."""
    jobs = [(scene, cfg.with_seed(int(s))) for s in seeds]
    if workers <= 1 or len(jobs) <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))


def campaign_csv(reports: Sequence[UnlockReport]) -> str:
    lines = [",".join(CAMPAIGN_HEADER)]
    lines.extend(",".join(str(x) for x in r.csv_row()) for r in reports)
    return "\n".join(lines) + "\n"
