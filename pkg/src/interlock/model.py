"""Core value types: chains, frame geometry, scenes and tolerances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np


def _frozen_array(a, shape=None) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if shape is not None:
        arr = arr.reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Chain:
    """An open chain: ordered labeled joints and one rest length per link."""

    name: str
    labels: tuple[str, ...]
    joints: np.ndarray
    rest_lengths: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        joints = _frozen_array(self.joints)
        if joints.ndim != 2 or joints.shape[1] != 3:
            raise ValueError(f"chain {self.name!r}: joints must have shape (n, 3)")
        n = joints.shape[0]
        if n < 2:
            raise ValueError(f"chain {self.name!r}: needs at least 2 joints")
        if len(self.labels) != n:
            raise ValueError(f"chain {self.name!r}: {len(self.labels)} labels for {n} joints")
        if not np.all(np.isfinite(joints)):
            raise ValueError(f"chain {self.name!r}: non-finite coordinate")
        rest = _frozen_array(self.rest_lengths)
        if rest.shape != (n - 1,):
            raise ValueError(f"chain {self.name!r}: need {n - 1} rest lengths")
        if np.any(rest <= 0):
            raise ValueError(f"chain {self.name!r}: rest lengths must be positive")
        object.__setattr__(self, "joints", joints)
        object.__setattr__(self, "rest_lengths", rest)

    @classmethod
    def from_points(cls, name: str, labels: Sequence[str], joints) -> "Chain":
        """Chain whose rest lengths are its current link lengths."""
        joints = np.asarray(joints, dtype=float)
        rest = np.linalg.norm(np.diff(joints, axis=0), axis=1)
        return cls(name, tuple(labels), joints, rest)

    @property
    def n_links(self) -> int:
        return len(self.rest_lengths)

    def joint(self, label: str) -> np.ndarray:
        return self.joints[self.labels.index(label)]


@dataclass(frozen=True, eq=False)
class FrameSpec:
    """Triangular frame: corner ball centers, ball radius and jag link length.

    corner_centers[0] is the tangle corner O; [1] and [2] are the jag
    corners P1 (reached along the side through z) and P2 (through F).
    """

    corner_centers: np.ndarray
    eps: float
    jag_link_length: float

    def __post_init__(self):
        object.__setattr__(self, "corner_centers", _frozen_array(self.corner_centers, (3, 3)))

    @property
    def O(self) -> np.ndarray:
        return self.corner_centers[0]

    @property
    def P1(self) -> np.ndarray:
        return self.corner_centers[1]

    @property
    def P2(self) -> np.ndarray:
        return self.corner_centers[2]

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

    @property
    def sides(self) -> tuple[float, float, float]:
        c = self.corner_centers
        return tuple(float(np.linalg.norm(c[i] - c[(i + 1) % 3])) for i in range(3))

    def scaled(self, s: float) -> "FrameSpec":
        return FrameSpec(self.corner_centers * s, self.eps * s, self.jag_link_length * s)


@dataclass(frozen=True)
class Tolerances:
    len_tol: float = 1e-10
    clearance: float | None = None  # None: eps/100 of the scene
    max_projection_sweeps: int = 100

    def __post_init__(self):
        if not self.len_tol > 0:
            raise ValueError("len_tol must be positive")
        if self.clearance is not None and self.clearance < 0:
            raise ValueError("clearance must be non-negative")

    def clearance_for(self, scene: "Scene") -> float:
        return scene.eps / 100.0 if self.clearance is None else self.clearance


@dataclass(frozen=True)
class Layout:
    """Flat index arrays describing a scene's topology for the kernels."""

    chain_names: tuple[str, ...]
    labels: tuple[str, ...]
    label_index: Mapping[str, int]
    joint_chain: np.ndarray
    chain_slices: tuple[slice, ...]
    li: np.ndarray
    lj: np.ndarray
    rest: np.ndarray
    link_chain: np.ndarray


@dataclass(frozen=True, eq=False)
class Scene:
    """Named chains plus the scene scale eps, optional frame and provenance."""

    chains: tuple[Chain, ...]
    eps: float
    frame: FrameSpec | None = None
    provenance: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "chains", tuple(self.chains))
        names = [c.name for c in self.chains]
        if len(set(names)) != len(names):
            raise ValueError("duplicate chain names")
        labels = [lab for c in self.chains for lab in c.labels]
        if len(set(labels)) != len(labels):
            raise ValueError("joint labels must be unique across the scene")
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    @cached_property
    def layout(self) -> Layout:
        labels, joint_chain, slices = [], [], []
        li, lj, rest, link_chain = [], [], [], []
        offset = 0
        for ci, c in enumerate(self.chains):
            n = len(c.labels)
            labels.extend(c.labels)
            joint_chain.extend([ci] * n)
            slices.append(slice(offset, offset + n))
            for k in range(n - 1):
                li.append(offset + k)
                lj.append(offset + k + 1)
                rest.append(c.rest_lengths[k])
                link_chain.append(ci)
            offset += n
        return Layout(
            chain_names=tuple(c.name for c in self.chains),
            labels=tuple(labels),
            label_index={lab: i for i, lab in enumerate(labels)},
            joint_chain=np.array(joint_chain, dtype=np.int64),
            chain_slices=tuple(slices),
            li=np.array(li, dtype=np.int64),
            lj=np.array(lj, dtype=np.int64),
            rest=np.array(rest, dtype=float),
            link_chain=np.array(link_chain, dtype=np.int64),
        )

    @cached_property
    def coords(self) -> np.ndarray:
        X = np.concatenate([c.joints for c in self.chains], axis=0)
        X.setflags(write=False)
        return X

    @property
    def labels(self) -> dict[str, tuple[str, int]]:
        """Joint label -> (chain name, index within chain)."""
        return {lab: (c.name, i) for c in self.chains for i, lab in enumerate(c.labels)}

    def chain(self, name: str) -> Chain:
        for c in self.chains:
            if c.name == name:
                return c
        raise KeyError(f"unknown chain {name!r}")

    def chain_index(self, name: str) -> int:
        try:
            return self.layout.chain_names.index(name)
        except ValueError:
            raise KeyError(f"unknown chain {name!r}") from None

    def __getitem__(self, label: str) -> np.ndarray:
        try:
            return self.coords[self.layout.label_index[label]]
        except KeyError:
            raise KeyError(f"unknown joint label {label!r}") from None

    def __contains__(self, label: str) -> bool:
        return label in self.layout.label_index

    def with_coords(self, X: np.ndarray) -> "Scene":
        """Same topology, new joint coordinates (the layout is shared)."""
        X = np.asarray(X, dtype=float)
        chains = tuple(
            Chain(c.name, c.labels, X[s], c.rest_lengths)
            for c, s in zip(self.chains, self.layout.chain_slices)
        )
        new = Scene(chains, self.eps, self.frame, self.provenance)
        new.__dict__["layout"] = self.layout
        return new

    def replace_chain(self, chain: Chain) -> "Scene":
        chains = tuple(chain if c.name == chain.name else c for c in self.chains)
        return Scene(chains, self.eps, self.frame, self.provenance)

    def without_chain(self, name: str) -> "Scene":
        return Scene(tuple(c for c in self.chains if c.name != name), self.eps, self.frame, self.provenance)
