import math

import numpy as np
import pytest

from interlock.checks import (
    ThreadingReport, check_confinement, check_hull_invariance, check_threading, golden_tangle_hull,
    measure_vN, sweep_csv, sweep_epsilon, tangle_hull, validate_construction, vN_bounds,
)
from interlock.construction import equilateral_frame
from interlock.linkage import random_fold
from interlock.model import Chain, FrameSpec


def test_collapsed_corner_confinement(tangle_scene):
    P = 0.5 * (tangle_scene["x"] + tangle_scene["y"])
    collapsed = tangle_scene.with_coords(np.tile(P, (len(tangle_scene.coords), 1)))
    ok, margin = check_confinement(collapsed, "P")
    assert ok and margin == pytest.approx(tangle_scene.eps)


def test_joint_at_one_and_a_half_eps_violates(tangle_scene):
    eps = tangle_scene.eps
    P = 0.5 * (tangle_scene["x"] + tangle_scene["y"])
    X = np.array(tangle_scene.coords)
    X[tangle_scene.layout.label_index["A"]] = P + np.array([1.5 * eps, 0, 0])
    ok, margin = check_confinement(tangle_scene.with_coords(X), "P")
    assert not ok
    assert margin == pytest.approx(-0.5 * eps)


def test_golden_hull_matches_construction(tangle_scene):
    assert tangle_hull(tangle_scene) == golden_tangle_hull()
    assert set(golden_tangle_hull().extreme_labels) == {"B", "C", "D", "x", "y"}


def test_constant_trajectory_keeps_hull(tangle_scene):
    assert check_hull_invariance([tangle_scene] * 5, golden_tangle_hull())


def test_hull_changes_when_B_is_pulled_inside(tangle_scene):
    X = np.array(tangle_scene.coords)
    idx = tangle_scene.layout.label_index
    X[idx["B"]] = np.mean([X[idx[k]] for k in "CDxy"], axis=0)
    moved = tangle_scene.with_coords(X)
    assert not check_hull_invariance([tangle_scene, moved], golden_tangle_hull())


def test_random_fold_keeps_tangle_hull(tangle_scene):
    traj = random_fold(tangle_scene, 1, tangle_scene.eps / 20, 1000)
    assert check_hull_invariance(traj, golden_tangle_hull())


def test_full_scene_threading(full_scene):
    th = check_threading(full_scene)
    assert isinstance(th, ThreadingReport)
    assert th.all_true
    assert all(m > 0 for _, _, m in th.items())


def test_two_chain_dropped_below_misses_DCF(full_scene):
    two = full_scene.chain("two")
    low = Chain(two.name, two.labels, two.joints + np.array([0, 0, -3.0]), two.rest_lengths)
    assert not check_threading(full_scene.replace_chain(low)).pierces_DCF


def test_v_at_centroid_of_T(full_scene):
    two = full_scene.chain("two")
    J = two.joints.copy()
    J[1] = np.mean([full_scene[k] for k in "BCDF"], axis=0)
    moved = full_scene.replace_chain(Chain.from_points("two", two.labels, J))
    assert not check_threading(moved).v_outside_T


def test_vN_bounds_equilateral():
    lo, hi = vN_bounds(equilateral_frame(1.0, 0.01), 0.01)
    assert lo == pytest.approx(0.856025, abs=5e-7)
    assert hi == pytest.approx(math.tan(math.pi / 3 + 0.02), rel=1e-12)
    assert hi == pytest.approx(1.81475, abs=2e-4)


def test_vN_bounds_approach_h():
    h = math.sqrt(3) / 2
    lo, hi = vN_bounds(equilateral_frame(1.0, 1e-9), 1e-9)
    assert lo == pytest.approx(h, abs=1e-8)
    assert hi == pytest.approx(math.tan(math.pi / 3), abs=1e-7)
    assert lo <= h <= hi


def test_vN_bounds_monotone():
    frame = equilateral_frame(1.0, 0.01)
    prev = None
    for eps in (0.001, 0.005, 0.01, 0.02, 0.05):
        lo, hi = vN_bounds(frame, eps)
        if prev:
            assert lo <= prev[0] and hi >= prev[1]
        prev = (lo, hi)


def test_right_angle_is_rejected():
    spec = FrameSpec(np.array([[0.0, 1, 0], [0, 0, 0], [1, 0, 0]]), 0.01, 0.005)
    with pytest.raises(ValueError):
        vN_bounds(spec, 0.01)


def test_vN_symmetric_and_on_base(full_scene):
    P1, P2 = full_scene.frame.P1, full_scene.frame.P2
    h = math.sqrt(3) / 2
    for target, expected in ((0.5 * (P1 + P2) + np.array([0, h, 0]), h), (0.5 * (P1 + P2), 0.0)):
        two = full_scene.chain("two")
        J = two.joints.copy()
        J[1] = target
        scene = full_scene.replace_chain(Chain.from_points("two", two.labels, J))
        assert measure_vN(scene).vN == pytest.approx(expected, abs=1e-12)


def test_full_scene_vN_within_bounds(full_scene):
    lo, hi = vN_bounds(full_scene.frame, full_scene.eps)
    assert lo <= measure_vN(full_scene).vN <= hi


def test_sweep_single_eps_no_samples():
    rows = sweep_epsilon("equilateral", [0.01], 0, 0)
    assert len(rows) == 1
    assert rows[0].feasible and math.isnan(rows[0].observed_min)


def test_sweep_rejects_non_descending():
    with pytest.raises(ValueError):
        sweep_epsilon("equilateral", [0.01, 0.02], 10, 0)
    with pytest.raises(ValueError):
        sweep_epsilon("equilateral", [], 10, 0)


def test_sweep_rows_inside_bounds_and_csv():
    rows = sweep_epsilon("equilateral", [0.05, 0.02], 300, 4)
    for r in rows:
        assert r.lo <= r.observed_min <= r.observed_max <= r.hi
    text = sweep_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "epsilon,observed_min,observed_max,lo,hi,feasible"
    first = lines[1].split(",")
    assert first[0] == "5.00000000000e-02"
    assert len(first[1].split("e")[0].replace(".", "")) == 12
    assert first[-1] == "true"


def test_report_format_and_dict(full_scene):
    report = validate_construction(full_scene)
    assert report.all_passed
    assert "v_outside_T: PASS" in report.format()
    d = report.to_dict()
    assert d["all_passed"] is True
    assert {p["name"] for p in d["predicates"]} >= set(ThreadingReport.FIELDS)
