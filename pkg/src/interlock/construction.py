"""Explicit coordinates for the 3/4-tangle, the 10-link frame and the threaded 2-chain.

Joint positions near each frame corner come from a fixture table
(``data/fixture.json``) stored in units of the ball radius eps and in a
local orthonormal basis attached to the corner.  The table was derived once
by ``tools/derive_fixture.py`` (margin-maximizing search over the threading,
clearance and confinement predicates) and is frozen; building a scene is a
deterministic change of basis plus scaling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Mapping

import numpy as np

from .model import Chain, FrameSpec, Scene

TANGLE_THREE = ("w", "x", "y", "z")
TANGLE_FOUR = ("A", "B", "C", "D", "E")
TEN_CHAIN = ("w", "x", "y", "z", "H", "G", "F", "D", "C", "B", "A")
TWO_CHAIN = ("a", "v", "b")
CORNER_LABELS = {
    "O": ("A", "B", "C", "D", "w", "x", "y"),
    "P1": ("z", "H"),
    "P2": ("F", "G"),
}
TANGLE_JOINTS = ("A", "B", "C", "D", "E", "w", "x", "y", "z")
LEG_MULTIPLIER = 3.0

# arm directions of the canonical corner (equilateral frame, 60 degrees at O)
_U1 = np.array([math.cos(math.pi / 6), -math.sin(math.pi / 6), 0.0])
_U2 = np.array([math.cos(math.pi / 6), math.sin(math.pi / 6), 0.0])


class InfeasibleError(ValueError):
    """The requested construction cannot satisfy its own predicates."""


@dataclass(frozen=True)
class TangleSpec:
    eps: float
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(3))
        R = np.asarray(self.orientation, dtype=float).reshape(3, 3)
        if not np.allclose(R @ R.T, np.eye(3), atol=1e-9) or np.linalg.det(R) < 0:
            raise ValueError("orientation must be a proper rotation matrix")
        object.__setattr__(self, "orientation", R)


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


@lru_cache(maxsize=1)
def _load_fixture() -> dict:
    text = resources.files("interlock").joinpath("data/fixture.json").read_text()
    return json.loads(text)


def fixture() -> dict:
    """The frozen corner table as numpy arrays (directions normalized)."""
    raw = _load_fixture()
    return fixture_from_params(raw["params"])


def fixture_from_params(params: Mapping) -> dict:
    out = {}
    for key, val in params.items():
        arr = np.array(val, dtype=float)
        out[key] = _unit(arr) if key.endswith("_dir") else arr
    return out


# ---------------------------------------------------------------------------
# local corner geometry


def tangle_local(fx: Mapping) -> dict[str, np.ndarray]:
    """Joints near the tangle corner, in eps units and the corner's basis.

    The midpoint of xy is the origin; the short links have exactly the
    lengths BC = CD = xy = 1/6 and AB = xw = 1/2.
    """
    d = fx["xy_dir"]
    x = -d / 12.0
    y = d / 12.0
    C = fx["C"]
    B = C + fx["CB_dir"] / 6.0
    D = C + fx["CD_dir"] / 6.0
    A = B + fx["BA_dir"] / 2.0
    w = x + fx["xw_dir"] / 2.0
    return {"A": A, "B": B, "C": C, "D": D, "w": w, "x": x, "y": y}


def corner_bases(frame: FrameSpec) -> dict[str, np.ndarray]:
    """Orthonormal bases (rows) attached to the three corners of a frame.

    At O: (bisector into the triangle, toward P2, frame normal).
    At P1: (direction O->P1, in-plane toward P2, normal); P2 mirrors P1.
    """
    O, P1, P2 = frame.corner_centers
    u1 = _unit(P1 - O)
    u2 = _unit(P2 - O)
    n = _unit(np.cross(u1, u2))
    es = _unit(u1 + u2)
    et = np.cross(n, es)
    b1 = _unit(P2 - P1)
    b1 = _unit(b1 - np.dot(b1, u1) * u1)
    b2 = _unit(P1 - P2)
    b2 = _unit(b2 - np.dot(b2, u2) * u2)
    return {
        "O": np.stack([es, et, n]),
        "P1": np.stack([u1, b1, n]),
        "P2": np.stack([u2, b2, n]),
    }


def frame_points(frame: FrameSpec, fx: Mapping) -> dict[str, np.ndarray]:
    """World coordinates of the 10-chain joints and the 2-chain aim points."""
    eps = frame.eps
    jag = frame.jag_link_length
    bases = corner_bases(frame)
    O, P1, P2 = frame.corner_centers
    pts = {k: O + eps * (p @ bases["O"]) for k, p in tangle_local(fx).items()}
    pts["z"] = P1 + eps * (fx["z"] @ bases["P1"])
    pts["H"] = pts["z"] + jag * (fx["zH_dir"] @ bases["P1"])
    pts["F"] = P2 + eps * (fx["F"] @ bases["P2"])
    pts["G"] = pts["F"] + jag * (fx["FG_dir"] @ bases["P2"])
    pts["v"] = O + eps * (fx["v"] @ bases["O"])
    pts["aim_a"] = P1 + eps * (fx["aim_a"] @ bases["P1"])
    pts["aim_b"] = P2 + eps * (fx["aim_b"] @ bases["P2"])
    return pts


def two_chain_points(pts: Mapping[str, np.ndarray], leg_length: float) -> dict[str, np.ndarray]:
    v = pts["v"]
    return {
        "a": v + leg_length * _unit(pts["aim_a"] - v),
        "v": v,
        "b": v + leg_length * _unit(pts["aim_b"] - v),
    }


def canonical_frame(eps: float) -> FrameSpec:
    return equilateral_frame(side=1.0, eps=eps)


def equilateral_frame(side: float = 1.0, eps: float = 0.01, jag_link_length: float | None = None) -> FrameSpec:
    """Equilateral frame with O at the origin and base P1P2 below it (y < 0)."""
    h = side * math.sqrt(3.0) / 2.0
    centers = np.array([[0.0, 0.0, 0.0], [-side / 2.0, -h, 0.0], [side / 2.0, -h, 0.0]])
    if jag_link_length is None:
        jag_link_length = 0.5 * eps
    return FrameSpec(centers, eps, jag_link_length)


def frame_from_shape(shape: str | FrameSpec, eps: float) -> FrameSpec:
    """Resolve a named frame shape ('equilateral') or re-scale a FrameSpec to eps."""
    if isinstance(shape, FrameSpec):
        return FrameSpec(shape.corner_centers, eps, shape.jag_link_length / shape.eps * eps)
    if shape == "equilateral":
        return equilateral_frame(1.0, eps)
    raise ValueError(f"unknown frame shape {shape!r}")


# ---------------------------------------------------------------------------
# builders


def _provenance(generator: str, **params) -> dict:
    clean = {}
    for k, v in params.items():
        clean[k] = np.asarray(v).tolist() if isinstance(v, np.ndarray) else v
    return {"generator": generator, "parameters": clean, "seed": None}


def build_tangle(spec: TangleSpec) -> Scene:
    """The 3/4-tangle: 3-chain w-x-y-z and 4-chain A-B-C-D-E around center P."""
    eps = spec.eps
    fx = fixture()
    loc = tangle_local(fx)
    loc["z"] = loc["y"] + 0.5 * _U1
    loc["E"] = loc["D"] + 0.5 * _U2
    world = {k: spec.center + eps * (spec.orientation @ p) for k, p in loc.items()}
    three = Chain("three", TANGLE_THREE, np.array([world[k] for k in TANGLE_THREE]),
                  np.array([eps / 2, eps / 6, eps / 2]))
    four = Chain("four", TANGLE_FOUR, np.array([world[k] for k in TANGLE_FOUR]),
                 np.array([eps / 2, eps / 6, eps / 6, eps / 2]))
    prov = _provenance("build_tangle", eps=eps, center=spec.center, orientation=spec.orientation)
    return Scene((three, four), eps, None, prov)


def check_frame_spec(spec: FrameSpec) -> None:
    c = spec.corner_centers
    area = 0.5 * np.linalg.norm(np.cross(c[1] - c[0], c[2] - c[0]))
    if area <= 1e-12 * max(spec.sides) ** 2:
        raise InfeasibleError("infeasible frame: degenerate triangle")
    if not 0 < spec.jag_link_length < spec.eps:
        raise InfeasibleError("infeasible frame: jag link length must lie in (0, eps)")
    if not spec.beta + 2 * spec.eps / spec.m < math.pi / 2:
        raise InfeasibleError("infeasible frame: beta + 2 eps / m is not acute")
    if min(spec.sides) <= 2 * spec.eps * 1.5:
        raise InfeasibleError("infeasible frame: corner balls overlap")


def build_ten_chain(spec: FrameSpec) -> Scene:
    """One open 10-link chain w-x-y-z-H-G-F-D-C-B-A forming the triangular frame."""
    from .checks import validate_frame_chain

    check_frame_spec(spec)
    pts = frame_points(spec, fixture())
    eps = spec.eps
    J = np.array([pts[k] for k in TEN_CHAIN])
    rest = np.linalg.norm(np.diff(J, axis=0), axis=1)
    exact = {("w", "x"): eps / 2, ("x", "y"): eps / 6, ("D", "C"): eps / 6,
             ("C", "B"): eps / 6, ("B", "A"): eps / 2}
    for k in range(len(TEN_CHAIN) - 1):
        key = (TEN_CHAIN[k], TEN_CHAIN[k + 1])
        if key in exact:
            rest[k] = exact[key]
    ten = Chain("ten", TEN_CHAIN, J, rest)
    prov = _provenance("build_ten_chain", corner_centers=spec.corner_centers, eps=eps,
                       jag_link_length=spec.jag_link_length)
    scene = Scene((ten,), eps, spec, prov)
    report = validate_frame_chain(scene)
    if not report.all_passed:
        raise InfeasibleError(f"infeasible frame: {', '.join(report.failed)}")
    return scene


def thread_two_chain(scene: Scene, leg_length: float) -> Scene:
    """Add the 2-chain a-v-b with legs of length leg_length through the frame corners."""
    from .checks import validate_construction

    spec = scene.frame
    if spec is None:
        raise ValueError("scene has no frame")
    if not leg_length > LEG_MULTIPLIER * max(spec.sides):
        raise ValueError("legs too short")
    pts = frame_points(spec, fixture())
    two = two_chain_points(pts, leg_length)
    chain = Chain("two", TWO_CHAIN, np.array([two[k] for k in TWO_CHAIN]), [leg_length, leg_length])
    prov = dict(scene.provenance)
    prov["generator"] = "thread_two_chain"
    prov["parameters"] = dict(prov.get("parameters", {}), leg_length=leg_length)
    full = Scene((scene.chains[0], chain), scene.eps, spec, prov)
    report = validate_construction(full)
    if not report.all_passed:
        raise InfeasibleError(f"infeasible threading: {', '.join(report.failed)}")
    return full


def build_full_scene(spec: FrameSpec | None = None, leg_length: float = 5.0) -> Scene:
    if spec is None:
        spec = equilateral_frame()
    return thread_two_chain(build_ten_chain(spec), leg_length)


# ---------------------------------------------------------------------------
# positive controls


def build_positive_control(kind: str) -> Scene:
    """Threaded but separable chain pairs used as planner positive controls."""
    from .controls import two_vs_four, three_vs_three

    builders = {"two_vs_four": two_vs_four, "three_vs_three": three_vs_three}
    try:
        return builders[kind]()
    except KeyError:
        raise ValueError(f"unknown control kind {kind!r}") from None


# ---------------------------------------------------------------------------
# deliberate violations, used to show that the checkers are sensitive


def _with_joint(scene: Scene, chain_name: str, label: str, point) -> Scene:
    c = scene.chain(chain_name)
    J = c.joints.copy()
    J[list(c.labels).index(label)] = point
    return scene.replace_chain(Chain.from_points(chain_name, c.labels, J))


def unhook_jag_z(scene: Scene, shift: float = 0.4) -> Scene:
    """Move H by ``shift * eps`` across the jag triangle (y, z, H) so leg va no longer passes through it.

    H stays inside the P1 ball and the other joints are untouched; only the
    jag trap at z is broken.
    """
    y, z, H = scene["y"], scene["z"], scene["H"]
    n = np.cross(z - y, H - z)
    n /= np.linalg.norm(n)
    return _with_joint(scene, "ten", "H", H - shift * scene.eps * n)


def move_v_into_T(scene: Scene) -> Scene:
    """Move the apex v of the 2-chain to the centroid of T = CH(B, C, D, F)."""
    centroid = np.mean([scene[k] for k in ("B", "C", "D", "F")], axis=0)
    return _with_joint(scene, "two", "v", centroid)
