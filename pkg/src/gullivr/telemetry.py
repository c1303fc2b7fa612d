"""Per-tick telemetry, walked-distance measures and machine-readable export."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from gullivr.errors import DomainError

SCHEMA_VERSION = 1
FRAME_HEADER = ["t", "px", "py", "pz", "vx", "vy", "vz", "scale", "mode"]
EVENT_HEADER = ["t", "kind", "payload"]
EVENT_KINDS = frozenset({
    "transition_begin", "transition_end", "teleport", "reset", "grab", "drop",
    "waypoint_reached", "target_landed",
})


@dataclass(frozen=True)
class Frame:
    t: float
    physical: tuple[float, float, float]
    virtual: tuple[float, float, float]
    scale: float
    mode: str


@dataclass(frozen=True)
class Event:
    t: float
    kind: str
    payload: dict = field(default_factory=dict)


@dataclass
class TelemetryLog:
    frames: list[Frame] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add_frame(self, frame: Frame) -> None:
        if self.frames and frame.t <= self.frames[-1].t:
            raise DomainError(f"frame time {frame.t} does not increase past {self.frames[-1].t}")
        self.frames.append(frame)

    def add_event(self, t: float, kind: str, **payload) -> None:
        if kind not in EVENT_KINDS:
            raise DomainError(f"unknown event kind {kind!r}")
        self.events.append(Event(t, kind, payload))

    @property
    def duration(self) -> float:
        if not self.frames:
            return 0.0
        return self.frames[-1].t - self.frames[0].t

    def event_counts(self) -> dict[str, int]:
        counts = {k: 0 for k in sorted(EVENT_KINDS)}
        for e in self.events:
            counts[e.kind] += 1
        return counts


def path_length(frames, space: str = "physical") -> float:
    """Sum of horizontal step lengths in tracked (``physical``) or ``virtual`` space."""
    if space not in ("physical", "virtual"):
        raise DomainError(f"space must be 'physical' or 'virtual', got {space!r}")
    if not frames:
        raise DomainError("path length needs at least one frame")
    total = 0.0
    prev = None
    for fr in frames:
        p = fr.physical if space == "physical" else fr.virtual
        if prev is not None:
            total += math.hypot(p[0] - prev[0], p[2] - prev[2])
        prev = p
    return total


def meters_per_minute(log: TelemetryLog) -> float:
    duration = log.duration
    if not duration > 0:
        raise DomainError("meters per minute is undefined for a log of zero duration")
    return path_length(log.frames, "physical") / (duration / 60.0)


def classify_hit(miss: float, radius: float) -> str:
    """Hit zone of a landing: inner half radius, outer ring, or miss."""
    if miss < 0 or not radius > 0:
        raise DomainError(f"need miss >= 0 and radius > 0, got miss={miss}, radius={radius}")
    if miss <= radius / 2.0:
        return "inner"
    if miss <= radius:
        return "outer"
    return "miss"


def summarize(log: TelemetryLog) -> dict:
    phys = path_length(log.frames, "physical") if log.frames else 0.0
    virt = path_length(log.frames, "virtual") if log.frames else 0.0
    duration = log.duration
    mpm = phys / (duration / 60.0) if duration > 0 else None
    misses = [e.payload.get("miss") for e in log.events if e.kind == "target_landed"]
    return {
        "physical_distance": phys,
        "virtual_distance": virt,
        "duration": duration,
        "meters_per_minute": mpm,
        "event_counts": log.event_counts(),
        "target_misses": misses,
    }


# --- serialization ------------------------------------------------------------------

def fmt(x: float) -> str:
    return f"{x:.9g}"


def _round(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return float(fmt(x))
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def frames_csv(log: TelemetryLog) -> str:
    buf = io.StringIO()
    buf.write(f"# gullivr-telemetry frames schema_version={SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FRAME_HEADER)
    for fr in log.frames:
        w.writerow([fmt(fr.t), *map(fmt, fr.physical), *map(fmt, fr.virtual), fmt(fr.scale), fr.mode])
    return buf.getvalue()


def events_csv(log: TelemetryLog) -> str:
    buf = io.StringIO()
    buf.write(f"# gullivr-telemetry events schema_version={SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EVENT_HEADER)
    for e in log.events:
        w.writerow([fmt(e.t), e.kind, json.dumps(_round(e.payload), sort_keys=True)])
    return buf.getvalue()


def to_document(log: TelemetryLog) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "meta": _round(log.meta),
        "summary": _round(summarize(log)),
        "frames": [[_round(f.t), *_round(f.physical), *_round(f.virtual), _round(f.scale), f.mode]
                   for f in log.frames],
        "events": [{"t": _round(e.t), "kind": e.kind, "payload": _round(e.payload)} for e in log.events],
    }


def document_text(log: TelemetryLog) -> str:
    return json.dumps(to_document(log), indent=1, sort_keys=True) + "\n"


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write telemetry to {path}: {exc}") from exc


def export(log: TelemetryLog, fmt_name: str, path) -> list[Path]:
    """Write ``log`` as ``csv`` (frames file plus ``<stem>_events.csv``) or ``json``.

    Returns the paths written.
    """
    path = Path(path)
    if fmt_name == "csv":
        ev_path = path.with_name(path.stem + "_events.csv")
        _write(path, frames_csv(log))
        _write(ev_path, events_csv(log))
        return [path, ev_path]
    if fmt_name == "json":
        _write(path, document_text(log))
        return [path]
    raise DomainError(f"unknown export format {fmt_name!r} (expected 'csv' or 'json')")


def _data_lines(text: str):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def _check_version(text: str, path) -> None:
    first = text.split("\n", 1)[0]
    if first.startswith("#") and f"schema_version={SCHEMA_VERSION}" not in first:
        raise DomainError(f"{path}: unsupported telemetry schema ({first})")


def read_csv(path, events_path=None) -> TelemetryLog:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    _check_version(text, path)
    rows = list(csv.reader(_data_lines(text)))
    if not rows or rows[0] != FRAME_HEADER:
        raise DomainError(f"{path}: missing frame header")
    log = TelemetryLog()
    for r in rows[1:]:
        v = [float(x) for x in r[:8]]
        log.add_frame(Frame(v[0], tuple(v[1:4]), tuple(v[4:7]), v[7], r[8]))
    events_path = Path(events_path) if events_path else path.with_name(path.stem + "_events.csv")
    if events_path.exists():
        etext = events_path.read_text(encoding="utf-8")
        _check_version(etext, events_path)
        erows = list(csv.reader(_data_lines(etext)))
        for r in erows[1:]:
            log.events.append(Event(float(r[0]), r[1], json.loads(r[2])))
    return log


def read_document(path) -> TelemetryLog:
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DomainError(f"{path}: unsupported schema_version {doc.get('schema_version')!r}")
    log = TelemetryLog(meta=doc.get("meta", {}))
    for r in doc["frames"]:
        log.add_frame(Frame(float(r[0]), tuple(map(float, r[1:4])), tuple(map(float, r[4:7])),
                            float(r[7]), r[8]))
    for e in doc["events"]:
        log.events.append(Event(float(e["t"]), e["kind"], e["payload"]))
    return log
