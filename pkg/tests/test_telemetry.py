import math

import pytest
from hypothesis import given, strategies as st

from gullivr.errors import DomainError
from gullivr.telemetry import (FRAME_HEADER, Frame, TelemetryLog, classify_hit, export, frames_csv,
                               meters_per_minute, path_length, read_csv, read_document, summarize)

ZONES = {"inner": 0, "outer": 1, "miss": 2}


def frame(t, px, pz, scale=1.0, anchor=(0.0, 0.0), mode="NM"):
    return Frame(t, (px, 1.7, pz), (anchor[0] + scale * px, 1.7 * scale, anchor[1] + scale * pz), scale, mode)


def log_of(frames, **meta):
    log = TelemetryLog(meta=meta)
    for f in frames:
        log.add_frame(f)
    return log


def test_single_frame_has_no_length():
    assert path_length([frame(0.0, 0.3, 0.1)]) == 0.0


def test_straight_walk():
    assert path_length([frame(0, 0, 0), frame(1, 0.5, 0), frame(2, 1.0, 0)]) == pytest.approx(1.0)


def test_square_loop_at_scale_30():
    pts = [(0, 0), (2, 0), (2, 2), (0, 2), (0, 0)]
    fr = [frame(i, x - 1.0, z - 1.0, scale=30.0, mode="GM") for i, (x, z) in enumerate(pts)]
    assert path_length(fr, "physical") == pytest.approx(8.0)
    assert path_length(fr, "virtual") == pytest.approx(240.0)


def test_empty_and_bad_space():
    with pytest.raises(DomainError):
        path_length([])
    with pytest.raises(DomainError):
        path_length([frame(0, 0, 0)], "astral")


def test_vertical_motion_is_ignored():
    a = Frame(0.0, (0.0, 1.7, 0.0), (0.0, 1.7, 0.0), 1.0, "NM")
    b = Frame(1.0, (0.0, 0.2, 0.0), (0.0, 0.2, 0.0), 1.0, "NM")
    assert path_length([a, b]) == 0.0


def test_meters_per_minute_examples():
    assert meters_per_minute(log_of([frame(0, 0, 0), frame(120, 30, 0)])) == pytest.approx(15.0)
    walk = log_of([frame(k * 0.5, k * 0.5, 0.0) for k in range(121)])
    assert meters_per_minute(walk) == pytest.approx(60.0, rel=1e-12)
    with pytest.raises(DomainError):
        meters_per_minute(log_of([frame(0, 0, 0)]))


def test_paper_walking_rate_round_trips():
    # 14.75 m/min over 6.82 min is 100.595 m
    minutes = 6.82
    dist = 14.75 * minutes
    assert dist == pytest.approx(100.595, abs=1e-12)
    n = 400
    fr = [frame(60.0 * minutes * k / n, dist * k / n - 50.0, 0.0) for k in range(n + 1)]
    assert meters_per_minute(log_of(fr)) == pytest.approx(14.75, abs=1e-9)


@pytest.mark.parametrize("miss,radius,zone", [(0.10, 0.25, "inner"), (0.25, 0.25, "outer"),
                                              (0.30, 0.25, "miss"), (0.125, 0.25, "inner"), (0.0, 1.0, "inner")])
def test_hit_zones(miss, radius, zone):
    assert classify_hit(miss, radius) == zone


def test_hit_zone_domain():
    with pytest.raises(DomainError):
        classify_hit(-0.1, 0.25)
    with pytest.raises(DomainError):
        classify_hit(0.1, 0.0)


@given(a=st.floats(0, 10), b=st.floats(0, 10), r=st.floats(0.01, 5))
def test_hit_zone_monotone(a, b, r):
    lo, hi = sorted((a, b))
    assert ZONES[classify_hit(lo, r)] <= ZONES[classify_hit(hi, r)]


walks = st.lists(st.tuples(st.floats(-2, 2), st.floats(-1.5, 1.5)), min_size=1, max_size=30)


@given(pts=walks, shift=st.floats(-1e3, 1e3))
def test_path_length_ignores_time_shift(pts, shift):
    a = [frame(i, x, z) for i, (x, z) in enumerate(pts)]
    b = [frame(i + shift, x, z) for i, (x, z) in enumerate(pts)]
    assert path_length(a) == path_length(b)


@given(p=walks, q=walks)
def test_path_length_additive(p, q):
    a = [frame(i, x, z) for i, (x, z) in enumerate(p)]
    b = [frame(len(p) + i, x, z) for i, (x, z) in enumerate(q)]
    joint = path_length(a + b)
    bridge = math.hypot(q[0][0] - p[-1][0], q[0][1] - p[-1][1])
    assert joint == pytest.approx(path_length(a) + bridge + path_length(b), rel=1e-12, abs=1e-12)


@given(pts=walks, scale=st.floats(1, 200), ax=st.floats(-500, 500))
def test_virtual_length_scales(pts, scale, ax):
    fr = [frame(i, x, z, scale=scale, anchor=(ax, -ax)) for i, (x, z) in enumerate(pts)]
    assert path_length(fr, "virtual") == pytest.approx(scale * path_length(fr), rel=1e-9, abs=1e-9)


def test_frame_times_must_increase():
    log = log_of([frame(1.0, 0, 0)])
    with pytest.raises(DomainError):
        log.add_frame(frame(1.0, 0.1, 0))


def test_unknown_event_kind():
    with pytest.raises(DomainError):
        TelemetryLog().add_event(0.0, "levitate")


# --- export --------------------------------------------------------------------------------

def sample_log():
    log = log_of([frame(0.0, 0.1, 0.2), frame(1 / 90, 0.11, 0.2, scale=1.0)], scenario="s", seed=3,
                 policy="gullivr")
    log.add_event(0.0, "transition_begin", scale_from=1.0, scale_to=100.0)
    log.add_event(0.5, "transition_end", scale=100.0)
    log.add_event(0.6, "target_landed", target="t0", miss=0.0123456789012)
    return log


def test_empty_log_exports_header_only(tmp_path):
    export(TelemetryLog(), "csv", tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0].startswith("# ") and "schema_version=1" in lines[0]
    assert lines[1:] == [",".join(FRAME_HEADER)]


def test_two_frames_two_rows_deterministic(tmp_path):
    a = frames_csv(sample_log())
    assert a == frames_csv(sample_log())
    assert len(a.splitlines()) == 4
    paths = export(sample_log(), "csv", tmp_path / "run.csv")
    assert [p.name for p in paths] == ["run.csv", "run_events.csv"]
    b = export(sample_log(), "json", tmp_path / "run.json")[0].read_bytes()
    assert b == export(sample_log(), "json", tmp_path / "again.json")[0].read_bytes()


@pytest.mark.parametrize("fmt,name", [("csv", "r.csv"), ("json", "r.json")])
def test_round_trip_keeps_summaries(tmp_path, fmt, name):
    log = sample_log()
    export(log, fmt, tmp_path / name)
    back = read_csv(tmp_path / name) if fmt == "csv" else read_document(tmp_path / name)
    s0, s1 = summarize(log), summarize(back)
    for key in ("physical_distance", "virtual_distance", "duration"):
        assert s1[key] == pytest.approx(s0[key], rel=1e-8)
    assert s1["event_counts"] == s0["event_counts"]
    assert s1["target_misses"] == pytest.approx(s0["target_misses"], rel=1e-8)
    assert len(back.frames) == 2 and back.frames[1].mode == "NM"


def test_unknown_format(tmp_path):
    with pytest.raises(DomainError):
        export(sample_log(), "xml", tmp_path / "x")


def test_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        export(sample_log(), "json", blocker / "sub" / "t.json")
