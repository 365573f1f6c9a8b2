"""Positive-control scenes: chain pairs that look threaded but can be pulled apart.

Both scenes use links of length about 1 and a scene scale ``eps = 5`` so the
default clearance (eps/100 = 0.05) and the fold step cap (clearance/2) are
proportionate to the link lengths.
"""

from __future__ import annotations

import numpy as np

from .model import Chain, Scene

CONTROL_EPS = 5.0


def _scene(chains, generator: str) -> Scene:
    prov = {"generator": generator, "parameters": {}, "seed": None}
    return Scene(tuple(chains), CONTROL_EPS, None, prov)


def two_vs_four() -> Scene:
    """A 2-chain whose leg va runs through the U-shaped bight of an open 4-chain.

    The bight opens upward (+z); the leg can leave it by lifting or by sliding
    lengthwise, but a straight pull along the centroid direction hits the
    bight's upright.
    """
    four = Chain.from_points(
        "four", ("p0", "p1", "p2", "p3", "p4"),
        [[-0.5, 0.0, 1.2], [-0.5, 0.0, 0.0], [0.5, 0.0, 0.0], [0.5, 0.0, 1.2], [1.5, 0.0, 1.2]],
    )
    two = Chain.from_points("two", ("a", "v", "b"), [[0.0, 2.0, 0.5], [0.0, -0.6, 0.5], [1.5, -1.5, 0.5]])
    return _scene((four, two), "two_vs_four")


def three_vs_three() -> Scene:
    """Two U-shaped 3-chains hooked through each other in perpendicular planes.

    Pulling the second hook straight away from the first jams the two middle
    links against each other; it has to slide toward the first hook's open end.
    """
    p = Chain.from_points(
        "hook_p", ("p0", "p1", "p2", "p3"),
        [[1.0, 0.0, 0.5], [0.0, 0.0, 0.5], [0.0, 0.0, -0.5], [1.0, 0.0, -0.5]],
    )
    q = Chain.from_points(
        "hook_q", ("q0", "q1", "q2", "q3"),
        [[-0.8, 0.5, 0.0], [0.4, 0.5, 0.0], [0.4, -0.5, 0.0], [-0.8, -0.5, 0.0]],
    )
    return _scene((p, q), "three_vs_three")
