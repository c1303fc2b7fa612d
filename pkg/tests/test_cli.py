import csv
import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from gullivr.cli import main

from conftest import scenario_doc

QUEST = Path(__file__).resolve().parents[1] / "src" / "gullivr" / "scenarios" / "quest_map.json"


def write(tmp_path, doc, name="scenario.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def rows(path):
    return list(csv.reader(path.read_text().splitlines()))


@pytest.fixture
def small(tmp_path):
    return write(tmp_path, scenario_doc([(200.0, 0.0), (0.0, 150.0)], half=(2.0, 1.5),
                                        targeting={"gm_scale": 30, "targets": [
                                            {"id": "a", "center": [0, 5]}, {"id": "b", "center": [5, 0]},
                                            {"id": "c", "center": [0, -5]}, {"id": "d", "center": [-5, 0]}]}))


def test_simulate_writes_two_files(small, tmp_path):
    out = tmp_path / "out"
    assert main(["simulate", str(small), "--seed", "1", "--policy", "gullivr", "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["summary.json", "telemetry.csv"]
    doc = json.loads((out / "summary.json").read_text())
    assert doc["schema_version"] == 1 and doc["meta"]["policy"] == "gullivr"
    assert doc["summary"]["event_counts"]["waypoint_reached"] == 2


def test_simulate_is_byte_identical(small, tmp_path):
    for d in ("a", "b"):
        assert main(["simulate", str(small), "--seed", "3", "--out", str(tmp_path / d)]) == 0
    for name in ("telemetry.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_poi_outside_terrain_is_named(tmp_path, capsys):
    doc = scenario_doc([(10.0, 0.0)], pois=[
        {"id": "lighthouse", "aabb_min": [900, 0, 0], "aabb_max": [950, 10, 50], "anchor": [920, 0, 20]}])
    code = main(["simulate", str(write(tmp_path, doc)), "--out", str(tmp_path / "o")])
    assert code != 0
    assert "lighthouse" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_every_violation_is_reported(tmp_path, capsys):
    doc = scenario_doc([{"point": [5000, 0]}, {"point": [1, 1], "action": "juggle", "game_state": "Q9"}],
                       dt=-1, smoothing_kind="median")
    doc["chaperone"]["half_x"] = 0
    assert main(["simulate", str(write(tmp_path, doc))]) == 2
    err = capsys.readouterr().err
    for needle in ("waypoint[0]", "juggle", "'Q9'", "chaperone", "dt", "median"):
        assert needle in err


def test_bad_json_and_missing_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["simulate", str(bad)]) == 2
    assert main(["simulate", str(tmp_path / "missing.json")]) == 2


def test_step_cap_is_a_scenario_error(small, tmp_path, capsys):
    assert main(["simulate", str(small), "--ticks-cap", "3", "--out", str(tmp_path / "o")]) == 3
    assert "step cap" in capsys.readouterr().err


def test_targeting_rows_and_summary(small, tmp_path):
    out = tmp_path / "t"
    assert main(["targeting", str(small), "--sigma", "0", "--out", str(out)]) == 0
    table = rows(out / "targeting.csv")
    assert table[0] == ["target_id", "attempt", "landing_x", "landing_z", "miss", "zone"]
    assert len(table) == 9
    summary = json.loads((out / "targeting_summary.json").read_text())
    assert summary["attempts"] == 8 and summary["mean_miss"] == pytest.approx(0.0, abs=1e-9)


def test_targeting_without_targets(tmp_path):
    assert main(["targeting", str(write(tmp_path, scenario_doc()))]) == 2


def test_compare_single_seed(small, tmp_path):
    out = tmp_path / "c"
    assert main(["compare", str(small), "--seeds", "4", "--out", str(out)]) == 0
    table = rows(out / "compare.csv")
    assert [r[0] for r in table[1:]] == ["gullivr", "teleport"]
    per_run = rows(out / "compare_runs.csv")
    assert len(per_run) == 3
    mpm = {r[0]: float(r[2]) for r in per_run[1:]}
    assert mpm["gullivr"] > mpm["teleport"]


def test_compare_needs_seeds(small):
    assert main(["compare", str(small), "--seeds"]) == 2


@pytest.mark.skipif(shutil.which("gullivr") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["gullivr", "simulate", str(QUEST), "--seed", "0", "--out", str(tmp_path)],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0, res.stderr
    assert "m/min" in res.stdout


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "gullivr.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "simulate" in res.stdout
