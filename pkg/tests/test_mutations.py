"""Deliberate violations must be caught by the predicate they target."""

import pytest

from interlock.checks import validate_construction
from interlock.cli import main
from interlock.construction import build_full_scene, equilateral_frame, move_v_into_T, unhook_jag_z


@pytest.mark.parametrize("eps", [0.05, 0.02, 0.01, 0.005])
def test_unhooked_jag_fails_only_jag_z(eps):
    scene = build_full_scene(equilateral_frame(1.0, eps), 5.0)
    report = validate_construction(unhook_jag_z(scene))
    assert report.failed == ["jag_z"]


def test_v_inside_T_fails_tetrahedron_exclusion(full_scene):
    report = validate_construction(move_v_into_T(full_scene))
    assert "v_outside_T" in report.failed


def test_v_inside_T_also_breaks_straddles(full_scene):
    # The legs leave T, so a v inside T cannot keep the frame links between
    # them; this is why that mutation cannot flip v_outside_T alone.
    failed = validate_construction(move_v_into_T(full_scene)).failed
    assert {"straddles_BC", "straddles_AB"} & set(failed)


def test_short_legs_rejected_at_generation(tmp_path):
    out = tmp_path / "s.json"
    code = main(["generate", "--kind", "full", "--epsilon", "0.01", "--side", "1", "--leg", "0.1", "--out", str(out)])
    assert code == 3
    assert not out.exists()
