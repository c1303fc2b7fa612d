"""Deterministic scripted player: walks in the tracked space, resizes or teleports.

The agent decides *what* to do (walk, grow, shrink, teleport, reset) and
returns a :class:`NavEvent`; :func:`run_scenario` applies that decision
through the locomotion kernel and records telemetry. All randomness comes
from one ``numpy.random.Generator`` seeded per run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

from gullivr.errors import DomainError, GulliVRError, ScenarioError
from gullivr.heightfield import HeightField
from gullivr.locomotion import (GM, NM, Chaperone, ModeState, advance, aim_arc, apply_teleport,
                                begin_transition, compute_reset_rotation, object_event,
                                resolve_aim, resolve_pull, scale_for_state, step_transition,
                                teleport_arc, DEFAULT_DURATION)
from gullivr.rig import (PhysicalPose, RigMapping, WalkingGround, heading_of, map_pose, rotate,
                         to_physical_xz, to_virtual_xz)
from gullivr.telemetry import Frame, TelemetryLog, classify_hit

if TYPE_CHECKING:
    from gullivr.config import ScenarioConfig

ARRIVE_TOL = 1e-6
LOOK_DOWN = -math.pi / 2


@dataclass(frozen=True)
class Waypoint:
    point: tuple[float, float]
    action: str = "visit"
    game_state: str = "default"


@dataclass(frozen=True)
class AgentScript:
    waypoints: tuple[Waypoint, ...] = ()
    start: tuple[float, float] = (0.0, 0.0)
    walk_speed: float = 1.0
    decision_policy: str = "gullivr"
    aim_noise_sigma: float = 0.0
    rng_seed: int = 0
    eye_height: float = 1.7
    step_length: float = 0.7
    wall_margin: float = 0.25
    gm_trigger_ratio: float = 0.8

    def __post_init__(self):
        if not self.walk_speed > 0:
            raise DomainError(f"walk_speed must be positive, got {self.walk_speed}")
        if self.aim_noise_sigma < 0:
            raise DomainError(f"aim_noise_sigma must be >= 0, got {self.aim_noise_sigma}")


@dataclass(frozen=True)
class TargetSpec:
    center: tuple[float, float]
    radius: float = 0.25
    max_attempts_per_target: int = 2
    id: str = "target"

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"target radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class NavEvent:
    kind: str  # arrive | grow | shrink | teleport | reset
    payload: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TargetRecord:
    target_id: str
    attempt: int
    landing: tuple[float, float]
    miss: float
    zone: str


class Agent:
    """Scripted player pursuing a list of virtual waypoints.

    ``pois``, ``gm_scales``, ``acquisition`` and the teleport settings are the
    scenario knobs the policy needs; ``rng`` supplies aiming noise.
    """

    def __init__(self, script: AgentScript, rng: np.random.Generator, *, pois=(), gm_scales=None,
                 acquisition="pulling", max_pitch=math.radians(20.0), launch_speed=10.0,
                 gravity=9.81, aim_time=1.0, ground: WalkingGround | None = None):
        self.script = script
        self.rng = rng
        self.pois = tuple(pois)
        self.gm_scales = dict(gm_scales or {})
        self.acquisition = acquisition
        self.max_pitch = max_pitch
        self.launch_speed = launch_speed
        self.gravity = gravity
        self.aim_time = aim_time
        self.ground = ground
        self.index = 0
        self.force_gm = False
        self._aim_ticks = 0
        self._pulled_for = -1

    @property
    def done(self) -> bool:
        return self.index >= len(self.script.waypoints)

    # -- movement helpers --

    def _stand(self, pose: PhysicalPose, t: float, pitch: float = 0.0) -> PhysicalPose:
        return replace(pose, t=t, head_pitch=pitch)

    def _walk(self, pose, target_xz, t, dt, chaperone):
        """One walking tick toward ``target_xz``; None when a wall blocks the way."""
        px, pz = pose.xz
        dx, dz = target_xz[0] - px, target_xz[1] - pz
        d = math.hypot(dx, dz)
        if d == 0.0:
            return self._stand(pose, t)
        step = self.script.walk_speed * dt
        if step >= d:
            nx, nz = target_xz
        else:
            nx, nz = px + dx / d * step, pz + dz / d * step
        clearance = chaperone.wall_clearance(px, pz)
        if (not chaperone.contains(nx, nz, self.script.wall_margin)
                and chaperone.wall_clearance(nx, nz) < clearance):
            return None
        return PhysicalPose(t, (nx, pose.head_pos[1], nz), heading_of(dx, dz), 0.0)

    def plan_step(self, pose: PhysicalPose, mode_state: ModeState, mapping: RigMapping,
                  chaperone: Chaperone, field: HeightField, dt: float):
        """Next physical pose and at most one navigation decision."""
        if not dt > 0:
            raise DomainError(f"dt must be positive, got {dt}")
        t = pose.t + dt
        if self.done:
            return self._stand(pose, t), None
        wp = self.script.waypoints[self.index]
        if not field.contains(*wp.point):
            raise ScenarioError(f"waypoint {self.index} at {wp.point} lies outside the heightfield")
        vx, vz = to_virtual_xz(mapping, *pose.xz)
        dist = math.hypot(wp.point[0] - vx, wp.point[1] - vz)
        if self.script.decision_policy == "teleport":
            return self._plan_teleport(pose, mapping, chaperone, field, dt, t, wp, dist)
        return self._plan_gullivr(pose, mode_state, mapping, chaperone, field, dt, t, wp, (vx, vz), dist)

    def _arrive(self, pose, t, wp):
        i = self.index
        self.index += 1
        if wp.action == "trigger_nav" and self.script.decision_policy == "gullivr" and not self.done:
            self.force_gm = True
        return self._stand(pose, t), NavEvent("arrive", {"index": i, "action": wp.action,
                                                         "point": list(wp.point)})

    def _grow(self, pose, mapping, chaperone, t, wp, v, reset=False):
        scale = scale_for_state(wp.game_state, self.gm_scales)
        desired = heading_of(wp.point[0] - v[0], wp.point[1] - v[1])
        yaw_delta = compute_reset_rotation(pose.xz, chaperone, desired, mapping)
        return self._stand(pose, t), NavEvent("grow", {"scale": scale, "yaw_delta": yaw_delta,
                                                       "reset": reset})

    def _plan_gullivr(self, pose, mode_state, mapping, chaperone, field, dt, t, wp, v, dist):
        target = to_physical_xz(mapping, *wp.point)
        if mode_state.mode == NM:
            if dist <= ARRIVE_TOL:
                return self._arrive(pose, t, wp)
            px, pz = pose.xz
            d_phys = math.hypot(target[0] - px, target[1] - pz)
            room = chaperone.distance_along(px, pz, heading_of(target[0] - px, target[1] - pz))
            room -= self.script.wall_margin
            if self.force_gm or d_phys > self.script.gm_trigger_ratio * room:
                self.force_gm = False
                return self._grow(pose, mapping, chaperone, t, wp, v)
            nxt = self._walk(pose, target, t, dt, chaperone)
            if nxt is None:
                return self._grow(pose, mapping, chaperone, t, wp, v, reset=True)
            return nxt, None

        if dist <= ARRIVE_TOL:
            return self._shrink(pose, mapping, field, t, v, wp)
        nxt = self._walk(pose, target, t, dt, chaperone)
        if nxt is None:
            # built-in reset: back to normal size here, regrow facing open room
            return self._stand(pose, t), NavEvent("shrink", {"pull": None, "reset": True})
        return nxt, None

    def _shrink(self, pose, mapping, field, t, v, wp):
        if self.acquisition == "pulling":
            # one pull per waypoint: a box whose anchor is not the waypoint must not trap us
            hit = resolve_pull(self.pois, v) if self._pulled_for != self.index else None
            pull = None
            if hit is not None:
                pull = hit[1]
                self._pulled_for = self.index
            return self._stand(pose, t), NavEvent("shrink", {"pull": pull, "reset": False})
        looking = self._stand(pose, t, LOOK_DOWN)
        cross = resolve_aim(looking, mapping, field, self.max_pitch, self.ground)
        if cross is None:
            return looking, NavEvent("shrink", {"pull": None, "reset": False})
        cx, cz = cross
        if self.script.aim_noise_sigma > 0:
            nx, nz = self.rng.normal(0.0, self.script.aim_noise_sigma, 2)
            cx, cz = cx + nx, cz + nz
        return looking, NavEvent("shrink", {"pull": (cx - v[0], cz - v[1]), "reset": False,
                                            "crosshair": [cx, cz]})

    def _plan_teleport(self, pose, mapping, chaperone, field, dt, t, wp, dist):
        if dist <= ARRIVE_TOL:
            return self._arrive(pose, t, wp)
        target = to_physical_xz(mapping, *wp.point)
        if dist > self.script.step_length:
            self._aim_ticks += 1
            if self._aim_ticks * dt < self.aim_time - 1e-12:
                return self._stand(pose, t), None
            self._aim_ticks = 0
            head = map_pose(mapping, field, pose, self.ground)
            gx, gz = wp.point
            if self.script.aim_noise_sigma > 0:
                nx, nz = self.rng.normal(0.0, self.script.aim_noise_sigma, 2)
                if field.contains(gx + nx, gz + nz):
                    gx, gz = gx + nx, gz + nz
            gy = self.ground.height(gx, gz, mapping.smoothing_radius) if self.ground else 0.0
            direction, _ = aim_arc(head.position, (gx, gy, gz), self.launch_speed, self.gravity)
            landing = teleport_arc(head.position, direction, self.launch_speed, self.gravity, field)
            if landing is not None:
                return self._stand(pose, t), NavEvent("teleport", {"landing": landing})
        nxt = self._walk(pose, target, t, dt, chaperone)
        if nxt is None:
            vx, vz = to_virtual_xz(mapping, *pose.xz)
            desired = heading_of(wp.point[0] - vx, wp.point[1] - vz)
            yaw_delta = compute_reset_rotation(pose.xz, chaperone, desired, mapping)
            return self._stand(pose, t), NavEvent("reset", {"yaw_delta": yaw_delta})
        return nxt, None


def plan_step(agent: Agent, pose, mode_state, mapping, chaperone, field, dt):
    return agent.plan_step(pose, mode_state, mapping, chaperone, field, dt)


# --- scenario runner -----------------------------------------------------------------

class _Run:
    def __init__(self, config: "ScenarioConfig", seed: int, policy: str | None, ticks_cap: int | None):
        self.config = config
        self.policy = policy or config.agent.decision_policy
        self.cap = ticks_cap or config.ticks_cap
        self.rng = np.random.default_rng(seed)
        self.field = config.field
        self.chaperone = config.chaperone
        self.ground = WalkingGround(self.field, config.smoothing_kind)
        for s in {1.0, *config.gm_scales.values()}:
            self.ground.precompute(config.foot_smooth_coeff * s)
        script = replace(config.agent, decision_policy=self.policy)
        self.agent = Agent(script, self.rng, pois=config.pois, gm_scales=config.gm_scales,
                           acquisition=config.transition.acquisition,
                           max_pitch=config.transition.max_pitch,
                           launch_speed=config.teleport.launch_speed, gravity=config.teleport.gravity,
                           aim_time=config.teleport.aim_time, ground=self.ground)
        self.log = TelemetryLog(meta={"scenario": config.id, "seed": int(seed), "policy": self.policy,
                                      "dt": config.dt})
        ch = self.chaperone
        ux, uz = self.rng.uniform(-0.5, 0.5, 2)
        px, pz = float(ux * ch.half_x), float(uz * ch.half_z)
        yaw = float(self.rng.uniform(-math.pi, math.pi))
        self.pose = PhysicalPose(0.0, (px, script.eye_height, pz), yaw, 0.0)
        self.mapping = RigMapping(anchor=(script.start[0] - px, script.start[1] - pz),
                                  foot_smooth_coeff=config.foot_smooth_coeff,
                                  ground_kind=config.smoothing_kind)
        self.state = ModeState()

    def record(self):
        p = self.pose
        if not self.chaperone.contains(*p.xz):
            raise ScenarioError(f"agent left the chaperone at t={p.t:.4f}: {p.xz}", self.log)
        try:
            head = map_pose(self.mapping, self.field, p, self.ground)
        except DomainError as exc:
            raise ScenarioError(f"player left the terrain at t={p.t:.4f}: {exc}", self.log) from exc
        self.log.add_frame(Frame(p.t, p.head_pos, head.position, self.mapping.scale, self.state.mode))

    def _transition_done(self, t):
        spec = self.state.last_transition
        self.log.add_event(t, "transition_end", scale=spec.scale_to)
        self.state = object_event(self.state, "transition_complete")

    def begin(self, t, target, pull, yaw_delta, reset):
        tr = self.config.transition
        if reset:
            self.log.add_event(t, "reset", yaw_delta=yaw_delta)
        self.state = begin_transition(self.state, target, t, mapping=self.mapping, pose=self.pose,
                                      pull=pull, instant=tr.instant, duration=tr.duration,
                                      yaw_delta=yaw_delta)
        spec = self.state.last_transition
        self.log.add_event(t, "transition_begin", scale_from=spec.scale_from, scale_to=spec.scale_to,
                           duration=spec.duration, yaw_delta=yaw_delta,
                           pull=list(spec.pull_offset))
        if self.state.transition is None:
            _, self.mapping = step_transition(spec, self.mapping, t)
            self._transition_done(t)
        else:
            self.state, self.mapping = advance(self.state, self.mapping, t)

    def apply(self, ev: NavEvent, t):
        k, pl = ev.kind, ev.payload
        if k == "arrive":
            self.log.add_event(t, "waypoint_reached", index=pl["index"], action=pl["action"],
                               point=pl["point"])
            if pl["action"] in ("grab", "drop"):
                try:
                    self.state = object_event(self.state, pl["action"])
                except GulliVRError as exc:
                    raise ScenarioError(f"waypoint {pl['index']}: {exc}", self.log) from exc
                self.log.add_event(t, pl["action"], object_scale=self.state.held_object_scale)
        elif k == "grow":
            self.begin(t, pl["scale"], None, pl["yaw_delta"], pl["reset"])
        elif k == "shrink":
            self.begin(t, 1.0, pl["pull"], 0.0, pl["reset"])
        elif k == "teleport":
            before = to_virtual_xz(self.mapping, *self.pose.xz)
            self.mapping = apply_teleport(self.mapping, self.pose, pl["landing"])
            self.log.add_event(t, "teleport", origin=list(before), landing=list(pl["landing"]))
        elif k == "reset":
            vx, vz = to_virtual_xz(self.mapping, *self.pose.xz)
            yaw = self.mapping.yaw_offset + pl["yaw_delta"]
            rx, rz = rotate(yaw, *self.pose.xz)
            s = self.mapping.scale
            self.mapping = replace(self.mapping, yaw_offset=yaw, anchor=(vx - s * rx, vz - s * rz))
            self.log.add_event(t, "reset", yaw_delta=pl["yaw_delta"])
        else:
            raise ScenarioError(f"unknown navigation decision {k!r}", self.log)

    def run(self) -> TelemetryLog:
        dt = self.config.dt
        self.record()
        k = 0
        while not (self.agent.done and self.state.transition is None):
            k += 1
            if k > self.cap:
                raise ScenarioError(f"step cap of {self.cap} ticks exceeded at waypoint "
                                    f"{self.agent.index}", self.log)
            t = k * dt
            if self.state.transition is not None:
                self.pose = replace(self.pose, t=t)
                self.state, self.mapping = advance(self.state, self.mapping, t)
                if self.state.transition is None:
                    self._transition_done(t)
            else:
                self.pose, ev = self.agent.plan_step(self.pose, self.state, self.mapping,
                                                     self.chaperone, self.field, dt)
                self.pose = replace(self.pose, t=t)
                if ev is not None:
                    self.apply(ev, t)
            self.record()
        return self.log


def run_scenario(config: "ScenarioConfig", seed: int, policy: str | None = None,
                 ticks_cap: int | None = None) -> TelemetryLog:
    """Run the scripted agent through every waypoint at fixed tick ``config.dt``.

    Identical ``(config, seed, policy)`` give identical logs.
    """
    return _Run(config, seed, policy, ticks_cap).run()


def targeting_trial(targets, gm_scale: float, aim_noise_sigma: float, seed: int, *,
                    field: HeightField, dt: float = 1.0 / 90.0, eye_height: float = 1.7,
                    duration: float = DEFAULT_DURATION, max_pitch: float = math.radians(20.0),
                    foot_smooth_coeff: float = 0.0) -> list[TargetRecord]:
    """Giant-mode landing task: stand over each target, aim down, shrink, measure the miss.

    Aim error is isotropic gaussian with ``aim_noise_sigma`` per axis, in
    normal-mode meters. Every target is attempted ``max_attempts_per_target``
    times.
    """
    if not gm_scale > 1:
        raise DomainError(f"targeting needs a giant-mode scale above 1, got {gm_scale}")
    rng = np.random.default_rng(seed)
    ground = WalkingGround(field)
    records = []
    for tgt in targets:
        for attempt in range(1, tgt.max_attempts_per_target + 1):
            # stand at the tracked origin looking down, mapped right above the target
            pose = PhysicalPose(0.0, (0.0, eye_height, 0.0), 0.0, LOOK_DOWN)
            mapping = RigMapping(anchor=tgt.center, scale=gm_scale, foot_smooth_coeff=foot_smooth_coeff)
            state = ModeState(mode=GM, current_scale=gm_scale)
            cross = resolve_aim(pose, mapping, field, max_pitch, ground)
            if cross is None:
                raise ScenarioError(f"target {tgt.id!r}: gaze does not reach the ground")
            if aim_noise_sigma > 0:
                nx, nz = rng.normal(0.0, aim_noise_sigma, 2)
                cross = (cross[0] + nx, cross[1] + nz)
            v = to_virtual_xz(mapping, *pose.xz)
            state = begin_transition(state, 1.0, 0.0, mapping=mapping, pose=pose,
                                     pull=(cross[0] - v[0], cross[1] - v[1]), duration=duration)
            k = 0
            while state.transition is not None:
                k += 1
                state, mapping = advance(state, mapping, k * dt)
            if state.last_transition.duration == 0.0:
                _, mapping = step_transition(state.last_transition, mapping, 0.0)
            lx, lz = to_virtual_xz(mapping, *pose.xz)
            miss = math.hypot(lx - tgt.center[0], lz - tgt.center[1])
            records.append(TargetRecord(tgt.id, attempt, (lx, lz), miss, classify_hit(miss, tgt.radius)))
    return records
