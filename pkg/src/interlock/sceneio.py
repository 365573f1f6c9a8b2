"""Scene files (JSON), unlock reports and Wavefront OBJ export.

Floats are written by the ``json`` module, which uses the shortest decimal
string that parses back to the same double, so a scene survives a
write/read round trip bit for bit.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .model import Chain, FrameSpec, Scene

SCENE_VERSION = 1


class SceneFormatError(ValueError):
    """A scene or OBJ file is unreadable or violates the format."""


def _plain(obj: Any) -> Any:
    """Convert numpy values nested in provenance data to JSON-ready Python values."""
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def scene_to_dict(scene: Scene) -> dict:
    prov = dict(scene.provenance)
    out = {
        "version": SCENE_VERSION,
        "epsilon": float(scene.eps),
        "chains": [
            {
                "name": c.name,
                "labels": list(c.labels),
                "joints": c.joints.tolist(),
                "rest_lengths": c.rest_lengths.tolist(),
            }
            for c in scene.chains
        ],
        "frame": None,
        "provenance": {
            "generator": prov.pop("generator", None),
            "parameters": _plain(prov.pop("parameters", {})),
            "seed": _plain(prov.pop("seed", None)),
            **_plain(prov),
        },
    }
    if scene.frame is not None:
        out["frame"] = {
            "corner_centers": scene.frame.corner_centers.tolist(),
            "jag_link_length": float(scene.frame.jag_link_length),
        }
    return out


def _field(data: Mapping, key: str, kind, where: str):
    if key not in data:
        raise SceneFormatError(f"{where}: missing field {key!r}")
    value = data[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise SceneFormatError(f"{where}: field {key!r} has the wrong type")
    return value


def scene_from_dict(data: Any) -> Scene:
    if not isinstance(data, Mapping):
        raise SceneFormatError("scene file must hold a JSON object")
    version = _field(data, "version", int, "scene")
    if version != SCENE_VERSION:
        raise SceneFormatError(f"unsupported scene version {version}")
    eps = float(_field(data, "epsilon", (int, float), "scene"))
    chains = []
    for i, c in enumerate(_field(data, "chains", list, "scene")):
        where = f"chain {i}"
        if not isinstance(c, Mapping):
            raise SceneFormatError(f"{where}: must be an object")
        name = _field(c, "name", str, where)
        labels = _field(c, "labels", list, where)
        joints = _field(c, "joints", list, where)
        rest = _field(c, "rest_lengths", list, where)
        if len(labels) != len(joints):
            raise SceneFormatError(f"{where}: labels and joints differ in length")
        if len(rest) != len(joints) - 1:
            raise SceneFormatError(f"{where}: need one rest length per link")
        try:
            chains.append(Chain(name, tuple(str(x) for x in labels),
                                np.array(joints, dtype=float), np.array(rest, dtype=float)))
        except (ValueError, TypeError) as exc:
            raise SceneFormatError(f"{where}: {exc}") from None
    frame = None
    fdata = data.get("frame")
    if fdata is not None:
        if not isinstance(fdata, Mapping):
            raise SceneFormatError("frame must be an object or null")
        try:
            frame = FrameSpec(np.array(_field(fdata, "corner_centers", list, "frame"), dtype=float), eps,
                              float(_field(fdata, "jag_link_length", (int, float), "frame")))
        except (ValueError, TypeError) as exc:
            raise SceneFormatError(f"frame: {exc}") from None
    prov = data.get("provenance") or {}
    if not isinstance(prov, Mapping):
        raise SceneFormatError("provenance must be an object")
    try:
        return Scene(tuple(chains), eps, frame, dict(prov))
    except ValueError as exc:
        raise SceneFormatError(str(exc)) from None


def dumps_scene(scene: Scene) -> str:
    return json.dumps(scene_to_dict(scene), indent=2, allow_nan=False) + "\n"


def loads_scene(text: str) -> Scene:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneFormatError(f"invalid JSON: {exc}") from None
    return scene_from_dict(data)


def write_scene(scene: Scene, path: str | Path) -> None:
    Path(path).write_text(dumps_scene(scene), encoding="utf-8")


def read_scene(path: str | Path) -> Scene:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise SceneFormatError(f"cannot read {path}: {exc}") from None
    return loads_scene(text)


# ---------------------------------------------------------------------------
# unlock reports


def write_json(data: Any, path: str | Path) -> None:
    """Write a JSON document; non-finite floats become null."""

    def clean(x):
        if isinstance(x, float) and not math.isfinite(x):
            return None
        if isinstance(x, Mapping):
            return {k: clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        return _plain(x)

    Path(path).write_text(json.dumps(clean(data), indent=2, allow_nan=False) + "\n", encoding="utf-8")


def witness_to_dict(report, initial: Scene) -> dict:
    """Unlock report plus the initial scene and every snapshot, enough to replay it elsewhere."""
    out = report.to_dict()
    out["initial_scene"] = scene_to_dict(initial)
    out["snapshots"] = None
    if report.witness is not None:
        out["snapshots"] = [s.coords.tolist() for s in report.witness.snapshots]
    return out


def witness_from_dict(data: Mapping):
    """Inverse of :func:`witness_to_dict`: ``(UnlockReport, initial scene)``."""
    from .linkage import StepMeta, Trajectory
    from .planner import UnlockReport

    try:
        initial = scene_from_dict(data["initial_scene"])
        witness = None
        if data.get("witness") is not None:
            steps = [StepMeta(str(m["label"]), np.array(m["displacement"], dtype=float)) for m in data["witness"]]
            snaps = [initial.with_coords(np.array(X, dtype=float)) for X in data["snapshots"]]
            witness = Trajectory(snaps, steps)
        R_sep = data.get("R_sep")
        report = UnlockReport(
            bool(data["separated"]), float(data["best_separation"]), int(data["iterations"]), int(data["seed"]),
            witness, int(data.get("nodes", 1)), math.nan if R_sep is None else float(R_sep),
            int(data.get("threading_checked", 0)), int(data.get("threading_held", 0)),
            dict(data.get("rejections", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneFormatError(f"bad witness file: {exc}") from None
    return report, initial


def read_witness(path: str | Path):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SceneFormatError(f"cannot read {path}: {exc}") from None
    return witness_from_dict(data)


# ---------------------------------------------------------------------------
# Wavefront OBJ


def _obj_comment(text: str) -> list[str]:
    return ["# " + line for line in text.splitlines()]


def dumps_obj(scene: Scene) -> str:
    """One object group per chain, one ``v`` per joint and one ``l`` per link."""
    lines = ["# interlock scene export"]
    lines += _obj_comment("provenance: " + json.dumps(_plain(dict(scene.provenance)), sort_keys=True))
    lines.append(f"# epsilon: {scene.eps!r}")
    base = 1
    for c in scene.chains:
        lines.append(f"o {c.name}")
        for label, p in zip(c.labels, c.joints):
            lines.append(f"v {p[0]:.12g} {p[1]:.12g} {p[2]:.12g}  # {label}")
        for k in range(c.n_links):
            lines.append(f"l {base + k} {base + k + 1}")
        base += len(c.labels)
    return "\n".join(lines) + "\n"


def write_obj(scene: Scene, path: str | Path) -> None:
    Path(path).write_text(dumps_obj(scene), encoding="utf-8")


def loads_obj(text: str) -> dict[str, np.ndarray]:
    """Vertices per object group, in file order.  Links are checked but not returned."""
    groups: dict[str, list[list[float]]] = {}
    current = None
    n_vertices = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "o":
            current = " ".join(rest)
            groups.setdefault(current, [])
        elif head == "v":
            if current is None:
                raise SceneFormatError(f"line {lineno}: vertex outside an object")
            try:
                groups[current].append([float(x) for x in rest[:3]])
            except ValueError:
                raise SceneFormatError(f"line {lineno}: bad vertex") from None
            if len(rest) < 3:
                raise SceneFormatError(f"line {lineno}: bad vertex")
            n_vertices += 1
        elif head == "l":
            try:
                idx = [int(x) for x in rest]
            except ValueError:
                raise SceneFormatError(f"line {lineno}: bad line element") from None
            if len(idx) < 2 or any(not 1 <= k <= n_vertices for k in idx):
                raise SceneFormatError(f"line {lineno}: line element refers to an unknown vertex")
    return {k: np.array(v, dtype=float).reshape(-1, 3) for k, v in groups.items()}
