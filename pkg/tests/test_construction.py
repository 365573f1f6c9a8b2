import math

import numpy as np
import pytest

from interlock.checks import check_confinement, validate_construction
from interlock.construction import (
    InfeasibleError, TangleSpec, build_full_scene, build_positive_control, build_tangle,
    build_ten_chain, equilateral_frame, thread_two_chain,
)
from interlock.linkage import chains_disjoint, is_simple, link_lengths


def test_tangle_lengths_at_eps_06(tangle_scene):
    assert np.allclose(link_lengths(tangle_scene.chain("three")), [0.3, 0.1, 0.3], atol=1e-12)
    assert np.allclose(link_lengths(tangle_scene.chain("four")), [0.3, 0.1, 0.1, 0.3], atol=1e-12)


@pytest.mark.parametrize("eps", [0.6, 0.1, 0.01])
def test_tangle_stays_in_ball_and_validates(eps):
    scene = build_tangle(TangleSpec(eps))
    ok, margin = check_confinement(scene, "P")
    assert ok and margin > 0
    report = validate_construction(scene)
    assert report.all_passed, report.failed


def test_tangle_rigid_placement_keeps_shape():
    a = build_tangle(TangleSpec(0.6))
    c = math.cos(0.7)
    s = math.sin(0.7)
    R = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    b = build_tangle(TangleSpec(0.6, center=np.array([1.0, 2.0, 3.0]), orientation=R))
    assert np.allclose((a.coords @ R.T) + [1, 2, 3], b.coords)
    assert validate_construction(b).all_passed


def test_tangle_spec_rejects_reflection():
    with pytest.raises(ValueError):
        TangleSpec(0.6, orientation=np.diag([1.0, 1.0, -1.0]))


def test_ten_chain_link_count_and_jags():
    scene = build_ten_chain(equilateral_frame(1.0, 0.01))
    ten = scene.chain("ten")
    assert ten.n_links == 10
    assert np.linalg.norm(scene["H"] - scene["z"]) < scene.eps
    assert np.linalg.norm(scene["G"] - scene["F"]) < scene.eps
    c = scene.frame.corner_centers
    assert min(np.linalg.norm(c[i] - c[j]) for i, j in ((0, 1), (0, 2), (1, 2))) > 2 * scene.eps


@pytest.mark.parametrize("eps", [0.05, 0.02, 0.01, 0.005])
def test_full_scene_validates(eps):
    scene = build_full_scene(equilateral_frame(1.0, eps), 5.0)
    report = validate_construction(scene)
    assert report.all_passed, report.failed
    assert chains_disjoint(scene.chain("two"), scene.chain("ten"), clearance=eps / 100)


def test_scaled_frame_validates():
    scene = build_full_scene(equilateral_frame(2.0, 0.02), 10.0)
    assert validate_construction(scene).all_passed


def test_legs_too_short():
    ten = build_ten_chain(equilateral_frame(1.0, 0.01))
    with pytest.raises(ValueError, match="legs too short"):
        thread_two_chain(ten, 0.1)


def test_overlapping_corner_balls_are_infeasible():
    with pytest.raises((InfeasibleError, ValueError)):
        build_ten_chain(equilateral_frame(1.0, 0.6))


@pytest.mark.parametrize("kind", ["two_vs_four", "three_vs_three"])
def test_positive_controls_are_valid_scenes(kind):
    scene = build_positive_control(kind)
    a, b = scene.chains
    clearance = scene.eps / 100
    assert is_simple(a, clearance=clearance) and is_simple(b, clearance=clearance)
    assert chains_disjoint(a, b, clearance=clearance)


def test_unknown_control_kind():
    with pytest.raises(ValueError):
        build_positive_control("five_vs_five")
