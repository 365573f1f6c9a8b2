import json

import pytest

from interlock.cli import main
from interlock.construction import move_v_into_T
from interlock.sceneio import read_scene, write_scene


@pytest.fixture(scope="module")
def full_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "scene.json"
    assert main(["generate", "--kind", "full", "--epsilon", "0.01", "--side", "1", "--leg", "5", "--out", str(path)]) == 0
    return path


def test_generate_full(full_file):
    scene = read_scene(full_file)
    assert sorted(c.n_links for c in scene.chains) == [2, 10]


def test_generate_tangle(tmp_path):
    out = tmp_path / "t.json"
    assert main(["generate", "--kind", "tangle", "--epsilon", "0.6", "--out", str(out)]) == 0
    chains = {c["name"]: c["rest_lengths"] for c in json.loads(out.read_text())["chains"]}
    assert chains["three"] == pytest.approx([0.3, 0.1, 0.3])
    assert chains["four"] == pytest.approx([0.3, 0.1, 0.1, 0.3])


@pytest.mark.parametrize("kind", ["ten-chain", "control-two-vs-four", "control-three-vs-three"])
def test_generate_other_kinds(tmp_path, kind):
    out = tmp_path / "s.json"
    assert main(["generate", "--kind", kind, "--out", str(out)]) == 0
    assert main(["check", "--scene", str(out)]) == 0


def test_generate_missing_out():
    assert main(["generate", "--kind", "full"]) == 2


def test_generate_bad_kind(tmp_path):
    assert main(["generate", "--kind", "knot", "--out", str(tmp_path / "x.json")]) == 2


def test_generate_infeasible_writes_nothing(tmp_path):
    out = tmp_path / "x.json"
    assert main(["generate", "--kind", "full", "--epsilon", "0.4", "--out", str(out)]) == 3
    assert not out.exists()


def test_check_passes_with_report(full_file, tmp_path, capsys):
    report = tmp_path / "r.json"
    assert main(["check", "--scene", str(full_file), "--report", str(report)]) == 0
    out = capsys.readouterr().out
    assert "v_outside_T: PASS" in out and "FAIL" not in out
    assert json.loads(report.read_text())["all_passed"] is True


def test_check_mutated_scene(full_file, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    write_scene(move_v_into_T(read_scene(full_file)), bad)
    assert main(["check", "--scene", str(bad)]) == 1
    assert "v_outside_T: FAIL" in capsys.readouterr().out


def test_check_corrupt_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("][")
    assert main(["check", "--scene", str(bad)]) == 2


def test_unlock_zero_seeds(full_file, capsys):
    assert main(["unlock", "--scene", str(full_file), "--seeds", "0", "--budget", "10", "--step", "0.001"]) == 0
    assert capsys.readouterr().out == "seed,separated,iterations,best_separation\n"


def test_unlock_writes_csv_and_plot(full_file, tmp_path):
    out, png = tmp_path / "c.csv", tmp_path / "c.png"
    assert main(["unlock", "--scene", str(full_file), "--seeds", "2", "--budget", "100",
                 "--step", "0.001", "--out", str(out), "--plot", str(png)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 3 and all(r.split(",")[1] == "false" for r in rows[1:])
    assert png.stat().st_size > 0


def test_unlock_control_writes_witness(tmp_path):
    scene, witness = tmp_path / "c.json", tmp_path / "w.json"
    assert main(["generate", "--kind", "control-two-vs-four", "--out", str(scene)]) == 0
    assert main(["unlock", "--scene", str(scene), "--seeds", "1", "--budget", "100000",
                 "--witness-out", str(witness), "--out", str(tmp_path / "u.csv")]) == 0
    data = json.loads(witness.read_text())
    assert data["separated"] is True and data["witness"]


def test_unlock_bad_scene(tmp_path):
    assert main(["unlock", "--scene", str(tmp_path / "none.json"), "--seeds", "1"]) == 2


def test_sweep(tmp_path):
    out, png = tmp_path / "s.csv", tmp_path / "s.png"
    assert main(["sweep", "--epsilons", "0.05,0.02", "--samples", "200", "--seed", "1",
                 "--out", str(out), "--plot", str(png)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "epsilon,observed_min,observed_max,lo,hi,feasible"
    assert len(lines) == 3
    assert png.stat().st_size > 0


def test_sweep_single(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--epsilons", "0.01", "--samples", "50", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 2


@pytest.mark.parametrize("eps", ["", "0.01,0.02", "0.01,abc"])
def test_sweep_bad_lists(eps):
    assert main(["sweep", "--epsilons", eps, "--samples", "10"]) == 2


def test_export_obj(full_file, tmp_path):
    out = tmp_path / "s.obj"
    assert main(["export", "--scene", str(full_file), "--format", "obj", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert sum(x.startswith("v ") for x in lines) == 14
    assert sum(x.startswith("l ") for x in lines) == 12


def test_export_unsupported_format(full_file, tmp_path):
    assert main(["export", "--scene", str(full_file), "--format", "stl", "--out", str(tmp_path / "s.stl")]) == 2


def test_generate_plot(tmp_path):
    png = tmp_path / "g.png"
    assert main(["generate", "--kind", "tangle", "--out", str(tmp_path / "t.json"), "--plot", str(png)]) == 0
    assert png.stat().st_size > 0
