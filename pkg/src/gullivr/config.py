"""Scenario configuration document: parsing and total validation.

A scenario is a single JSON document carrying every tunable of the
technique (giant sizes per game state, transition timing, acquisition
mode, teleport parameters, agent script, targets). Validation never stops
at the first problem: :func:`parse_config` raises one :class:`ConfigError`
listing every violation.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from gullivr import heightfield as hf
from gullivr.errors import ConfigError, GulliVRError
from gullivr.locomotion import Chaperone, PointOfInterest, DEFAULT_DURATION, MAX_DURATION
from gullivr.rig import DEFAULT_FOOT_SMOOTH, DEFAULT_IPD
from gullivr.tracking_sim import AgentScript, TargetSpec, Waypoint

SCHEMA_VERSION = 1
POLICIES = ("gullivr", "teleport")
ACTIONS = ("visit", "grab", "drop", "trigger_nav")


@dataclass(frozen=True)
class TransitionSettings:
    duration: float = DEFAULT_DURATION
    instant: bool = False
    acquisition: str = "pulling"  # or "aiming"
    max_pitch: float = math.radians(20.0)


@dataclass(frozen=True)
class TeleportSettings:
    launch_speed: float = 10.0
    gravity: float = 9.81
    aim_time: float = 1.0


@dataclass(frozen=True)
class ScenarioConfig:
    id: str
    field: hf.HeightField
    chaperone: Chaperone
    agent: AgentScript
    pois: tuple[PointOfInterest, ...] = ()
    gm_scales: dict = field(default_factory=dict)
    transition: TransitionSettings = TransitionSettings()
    teleport: TeleportSettings = TeleportSettings()
    targets: tuple[TargetSpec, ...] = ()
    targeting_gm_scale: float = 100.0
    dt: float = 1.0 / 90.0
    physical_ipd: float = DEFAULT_IPD
    foot_smooth_coeff: float = DEFAULT_FOOT_SMOOTH
    smoothing_kind: str = "gaussian"
    ticks_cap: int = 200_000
    gm_object_interaction: bool = False

    def with_policy(self, policy: str) -> "ScenarioConfig":
        return replace(self, agent=replace(self.agent, decision_policy=policy))


class _Checker:
    def __init__(self):
        self.violations: list[str] = []

    def fail(self, msg: str) -> None:
        self.violations.append(msg)

    def number(self, doc: dict, key: str, default, where: str, *, positive=False, nonneg=False,
               upper=None, integer=False):
        raw = doc.get(key, default)
        try:
            if isinstance(raw, bool):
                raise TypeError
            val = int(raw) if integer else float(raw)
        except (TypeError, ValueError):
            self.fail(f"{where}.{key}: expected a number, got {raw!r}")
            return default
        if not math.isfinite(val):
            self.fail(f"{where}.{key}: must be finite")
        elif positive and not val > 0:
            self.fail(f"{where}.{key}: must be > 0, got {val}")
        elif nonneg and val < 0:
            self.fail(f"{where}.{key}: must be >= 0, got {val}")
        elif upper is not None and val > upper:
            self.fail(f"{where}.{key}: must be <= {upper}, got {val}")
        return val

    def point(self, raw, n: int, where: str):
        try:
            pt = tuple(float(v) for v in raw)
            if len(pt) != n:
                raise ValueError
            return pt
        except (TypeError, ValueError):
            self.fail(f"{where}: expected {n} numbers, got {raw!r}")
            return None


def _load_field(doc: dict, base: Path, chk: _Checker):
    src = doc.get("heightfield")
    if not isinstance(src, dict):
        chk.fail("heightfield: missing (give 'file' or 'procedural')")
        return None
    try:
        if "file" in src:
            path = Path(src["file"])
            if not path.is_absolute():
                path = base / path
            return hf.load(path)
        if "procedural" in src:
            p = src["procedural"]
            return hf.value_noise(
                seed=int(p.get("seed", 0)), nx=int(p["nx"]), nz=int(p["nz"]),
                cell_size=float(p["cell_size"]), amplitude=float(p.get("amplitude", 0.0)),
                wavelength=float(p.get("wavelength", 10.0)), origin=tuple(p.get("origin", (0.0, 0.0))),
                octaves=int(p.get("octaves", 1)))
        if "flat" in src:
            p = src["flat"]
            return hf.HeightField(tuple(p.get("origin", (0.0, 0.0))), float(p["cell_size"]),
                                  np.full((int(p["nx"]), int(p["nz"])), float(p.get("height", 0.0))))
        chk.fail("heightfield: expected one of 'file', 'procedural', 'flat'")
    except (OSError, KeyError, TypeError, ValueError, GulliVRError) as exc:
        chk.fail(f"heightfield: cannot build terrain ({exc})")
    return None


def parse_config(doc: dict, base_dir=".") -> ScenarioConfig:
    """Validate a scenario document and build the typed configuration."""
    chk = _Checker()
    if not isinstance(doc, dict):
        raise ConfigError("scenario document must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        chk.fail(f"schema_version: expected {SCHEMA_VERSION}, got {doc.get('schema_version')!r}")
    field_ = _load_field(doc, Path(base_dir), chk)

    def inside(pt, where):
        if field_ is not None and pt is not None and not field_.contains(*pt):
            chk.fail(f"{where} at ({pt[0]:g}, {pt[1]:g}) lies outside the heightfield")

    ch = doc.get("chaperone", {})
    hx = chk.number(ch, "half_x", 2.0, "chaperone", positive=True)
    hz = chk.number(ch, "half_z", 2.0, "chaperone", positive=True)

    scales = doc.get("gm_scales", {})
    gm_scales = {}
    if not isinstance(scales, dict):
        chk.fail("gm_scales: expected a mapping of game state to scale")
        scales = {}
    for name, val in scales.items():
        s = chk.number(scales, name, 1.0, "gm_scales", positive=True)
        if s == 1.0:
            chk.fail(f"gm_scales.{name}: a giant-mode scale of 1 is normal mode")
        gm_scales[str(name)] = s

    pois = []
    for i, p in enumerate(doc.get("pois", [])):
        pid = str(p.get("id", f"#{i}"))
        lo = chk.point(p.get("aabb_min"), 3, f"poi {pid!r} aabb_min")
        hi = chk.point(p.get("aabb_max"), 3, f"poi {pid!r} aabb_max")
        anchor = chk.point(p.get("anchor"), 3, f"poi {pid!r} anchor")
        if None in (lo, hi, anchor):
            continue
        for label, pt in (("anchor", (anchor[0], anchor[2])), ("aabb_min", (lo[0], lo[2])),
                          ("aabb_max", (hi[0], hi[2]))):
            inside(pt, f"poi {pid!r} {label}")
        try:
            pois.append(PointOfInterest(pid, lo, hi, anchor, float(p.get("facing", 0.0))))
        except GulliVRError as exc:
            chk.fail(str(exc))
    ids = [p.id for p in pois]
    if len(set(ids)) != len(ids):
        chk.fail("pois: ids must be unique")

    tr = doc.get("transition", {})
    duration = chk.number(tr, "duration", DEFAULT_DURATION, "transition", nonneg=True, upper=MAX_DURATION)
    instant = bool(tr.get("instant", False))
    if duration == 0 and not instant:
        chk.fail("transition.duration: 0 requires instant=true")
    acquisition = tr.get("acquisition", "pulling")
    if acquisition not in ("pulling", "aiming"):
        chk.fail(f"transition.acquisition: expected 'pulling' or 'aiming', got {acquisition!r}")
    max_pitch_deg = chk.number(tr, "max_pitch_deg", 20.0, "transition", nonneg=True, upper=89.0)
    transition = TransitionSettings(duration, instant, acquisition, math.radians(max_pitch_deg))

    tp = doc.get("teleport", {})
    teleport = TeleportSettings(
        chk.number(tp, "launch_speed", 10.0, "teleport", positive=True),
        chk.number(tp, "gravity", 9.81, "teleport", positive=True),
        chk.number(tp, "aim_time", 1.0, "teleport", nonneg=True),
    )

    ag = doc.get("agent", {})
    policy = ag.get("policy", "gullivr")
    if policy not in POLICIES:
        chk.fail(f"agent.policy: expected one of {POLICIES}, got {policy!r}")
    start = chk.point(ag.get("start"), 2, "agent.start")
    inside(start, "agent.start")
    waypoints = []
    for i, w in enumerate(ag.get("waypoints", [])):
        pt = chk.point(w.get("point"), 2, f"waypoint[{i}].point")
        inside(pt, f"waypoint[{i}]")
        action = w.get("action", "visit")
        if action not in ACTIONS:
            chk.fail(f"waypoint[{i}].action: expected one of {ACTIONS}, got {action!r}")
        state = str(w.get("game_state", "default"))
        if state not in gm_scales:
            chk.fail(f"waypoint[{i}].game_state: {state!r} has no gm_scales entry")
        if pt is not None:
            waypoints.append(Waypoint(pt, action, state))
    margin = chk.number(ag, "wall_margin", 0.25, "agent", nonneg=True)
    if margin >= min(hx, hz):
        chk.fail(f"agent.wall_margin: {margin} leaves no walkable room in the chaperone")
    agent = AgentScript(
        waypoints=tuple(waypoints),
        start=start or (0.0, 0.0),
        walk_speed=chk.number(ag, "walk_speed", 1.0, "agent", positive=True),
        decision_policy=policy,
        aim_noise_sigma=chk.number(ag, "aim_noise_sigma", 0.0, "agent", nonneg=True),
        rng_seed=chk.number(ag, "rng_seed", 0, "agent", integer=True),
        eye_height=chk.number(ag, "eye_height", 1.7, "agent", positive=True),
        step_length=chk.number(ag, "step_length", 0.7, "agent", positive=True),
        wall_margin=margin,
        gm_trigger_ratio=chk.number(ag, "gm_trigger_ratio", 0.8, "agent", positive=True),
    )

    tg = doc.get("targeting", {})
    targeting_scale = chk.number(tg, "gm_scale", 100.0, "targeting", positive=True)
    if targeting_scale <= 1:
        chk.fail(f"targeting.gm_scale: must exceed 1, got {targeting_scale}")
    targets = []
    for i, t in enumerate(tg.get("targets", [])):
        tid = str(t.get("id", f"t{i}"))
        c = chk.point(t.get("center"), 2, f"target {tid!r} center")
        inside(c, f"target {tid!r}")
        r = chk.number(t, "radius", 0.25, f"target {tid!r}", positive=True)
        n = chk.number(t, "max_attempts", 2, f"target {tid!r}", positive=True, integer=True)
        if c is not None:
            targets.append(TargetSpec(c, r, n, tid))

    dt = chk.number(doc, "dt", 1.0 / 90.0, "scenario", positive=True)
    ipd = chk.number(doc, "physical_ipd", DEFAULT_IPD, "scenario", positive=True)
    coeff = chk.number(doc, "foot_smooth_coeff", DEFAULT_FOOT_SMOOTH, "scenario", nonneg=True)
    kind = doc.get("smoothing_kind", "gaussian")
    if kind not in ("gaussian", "box"):
        chk.fail(f"smoothing_kind: expected 'gaussian' or 'box', got {kind!r}")
    cap = chk.number(doc, "ticks_cap", 200_000, "scenario", positive=True, integer=True)

    if chk.violations:
        raise ConfigError(f"{len(chk.violations)} configuration problem(s)", chk.violations)
    return ScenarioConfig(
        id=str(doc.get("id", "scenario")), field=field_, chaperone=Chaperone(hx, hz), agent=agent,
        pois=tuple(pois), gm_scales=gm_scales, transition=transition, teleport=teleport,
        targets=tuple(targets), targeting_gm_scale=targeting_scale, dt=dt, physical_ipd=ipd,
        foot_smooth_coeff=coeff, smoothing_kind=kind, ticks_cap=cap,
        gm_object_interaction=bool(doc.get("gm_object_interaction", False)),
    )


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return parse_config(doc, base_dir=path.parent)
