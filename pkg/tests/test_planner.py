import math

import numpy as np
import pytest

from interlock.construction import build_positive_control
from interlock.model import Chain, Scene
from interlock.planner import (
    PlannerConfig, ReplayError, UnlockReport, attempt_unlock, campaign_csv, is_separated, replay,
    run_campaign, separation_distance,
)


def small_chain(name, labels, offset):
    pts = np.array([[0, 0, 0], [0.2, 0, 0], [0.2, 0.2, 0]], float) + offset
    return Chain.from_points(name, labels, pts)


def far_scene(offset):
    return Scene((small_chain("one", ("p", "q", "r"), (0, 0, 0)),
                  small_chain("two", ("a", "v", "b"), offset)), eps=1.0)


def test_translated_chains_distance():
    assert separation_distance(far_scene((2, 0, 0)), "one", "two") >= 1.5


def test_touching_chains_distance():
    s = Scene((Chain.from_points("one", "pq", [[0, 0, 0], [1, 0, 0]]),
               Chain.from_points("two", "ab", [[0.5, -1, 0], [0.5, 1, 0]])), eps=1.0)
    assert separation_distance(s, "one", "two") == pytest.approx(0.0, abs=1e-15)


def test_full_scene_separation_is_small(full_scene):
    d = separation_distance(full_scene, "ten", "two")
    assert 0 < d < full_scene.eps


def test_unknown_chain():
    with pytest.raises(KeyError):
        separation_distance(far_scene((2, 0, 0)), "one", "nine")


def test_far_apart_is_separated():
    assert is_separated(far_scene((50, 0, 0)))


def test_full_scene_is_not_separated(full_scene):
    assert not is_separated(full_scene)


def test_budget_zero(full_scene):
    r = attempt_unlock(full_scene, PlannerConfig(budget=0))
    assert not r.separated and r.iterations == 0
    assert r.best_separation == pytest.approx(separation_distance(full_scene, "ten", "two"))
    assert r.witness is None


def test_already_separated_stops_at_zero():
    r = attempt_unlock(far_scene((50, 0, 0)), PlannerConfig(budget=10))
    assert r.separated and r.iterations == 0
    assert len(r.witness) == 1


def test_config_validation():
    with pytest.raises(ValueError):
        PlannerConfig(budget=-1)
    with pytest.raises(ValueError):
        PlannerConfig(step_size=0)
    with pytest.raises(ValueError):
        PlannerConfig(R_sep=-1)
    with pytest.raises(ValueError):
        PlannerConfig(goal_bias=1.5)


def test_deterministic(full_scene):
    cfg = PlannerConfig(budget=300, rng_seed=7)
    a, b = attempt_unlock(full_scene, cfg), attempt_unlock(full_scene, cfg)
    assert a.to_dict() == b.to_dict()


def test_best_separation_monotone_in_budget(full_scene):
    vals = [attempt_unlock(full_scene, PlannerConfig(budget=n, rng_seed=3)).best_separation for n in (0, 100, 400)]
    assert vals == sorted(vals)


def test_full_scene_short_run_threading_holds(full_scene):
    r = attempt_unlock(full_scene, PlannerConfig(budget=500, rng_seed=1))
    assert not r.separated
    assert r.threading_checked == r.nodes
    assert r.threading_fraction == 1.0


@pytest.fixture(scope="module")
def control_success():
    scene = build_positive_control("two_vs_four")
    r = attempt_unlock(scene, PlannerConfig(budget=100_000, rng_seed=0))
    assert r.separated
    return scene, r


def test_positive_control_witness_replays(control_success):
    scene, r = control_success
    final = replay(r, scene)
    assert is_separated(final, PlannerConfig(R_sep=r.R_sep))
    assert is_separated(r.witness.final)


def test_replay_from_wrong_scene(control_success):
    scene, r = control_success
    other = build_positive_control("three_vs_three")
    with pytest.raises(ReplayError):
        replay(r, other)


def test_replay_from_shifted_scene(control_success):
    scene, r = control_success
    shifted = scene.with_coords(scene.coords + 1e-6)
    with pytest.raises(ReplayError, match="replay mismatch"):
        replay(r, shifted)


def test_replay_without_witness():
    with pytest.raises(ReplayError, match="no witness"):
        replay(UnlockReport(False, 0.0, 0, 0), far_scene((2, 0, 0)))


def test_campaign_csv_and_parallel_agree(full_scene):
    cfg = PlannerConfig(budget=50)
    serial = run_campaign(full_scene, cfg, range(3))
    parallel = run_campaign(full_scene, cfg, range(3), workers=2)
    assert campaign_csv(serial) == campaign_csv(parallel)
    lines = campaign_csv(serial).splitlines()
    assert lines[0] == "seed,separated,iterations,best_separation"
    assert len(lines) == 4
    seed, sep, it, best = lines[1].split(",")
    assert (seed, sep, it) == ("0", "false", "50")
    assert math.isclose(float(best), serial[0].best_separation, rel_tol=1e-11)


def test_empty_campaign_csv():
    assert campaign_csv([]) == "seed,separated,iterations,best_separation\n"
