"""Normal/giant mode state machine, target acquisition, resets and the teleport baseline.

All functions are deterministic in their arguments; time is always passed in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from gullivr import kernels
from gullivr.errors import ConfigError, DomainError, StateError
from gullivr.heightfield import HeightField, raycast
from gullivr.rig import (PhysicalPose, RigMapping, WalkingGround, gaze_direction, map_pose,
                         rotate, to_virtual_xz, wrap_angle)

NM, GM, IN_TRANSITION = "NM", "GM", "InTransition"

DEFAULT_DURATION = 0.5
MAX_DURATION = 1.0
SECONDS_PER_SCALE = 0.005
ARC_DT = 0.01
ARC_TOL = 1e-11


def max_transition_duration(scale_from: float, scale_to: float) -> float:
    """Upper bound on a resize: 5 ms per unit of the larger scale, never above 1 s."""
    return min(SECONDS_PER_SCALE * max(scale_from, scale_to), MAX_DURATION)


@dataclass(frozen=True)
class TransitionSpec:
    scale_from: float
    scale_to: float
    start_time: float
    duration: float
    pull_offset: tuple[float, float]
    anchor_fixpoint: tuple[float, float]
    # tracked-space point whose image is held at anchor_fixpoint (+ pull)
    physical_fixpoint: tuple[float, float]
    yaw_offset: float

    def progress(self, now: float) -> float:
        if self.duration <= 0.0 or now >= self.end_time:
            return 1.0
        return min(max((now - self.start_time) / self.duration, 0.0), 1.0)

    def scale_at(self, u: float) -> float:
        if u >= 1.0:
            return self.scale_to
        if u <= 0.0:
            return self.scale_from
        return self.scale_from + u * (self.scale_to - self.scale_from)

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration


@dataclass(frozen=True)
class ModeState:
    mode: str = NM
    current_scale: float = 1.0
    transition: TransitionSpec | None = None
    last_transition: TransitionSpec | None = None
    holding: bool = False
    held_object_scale: float = 1.0
    # object scale / player scale, fixed at grab time
    held_ratio: float = 1.0

    def __post_init__(self):
        if (self.transition is not None) != (self.mode == IN_TRANSITION):
            raise StateError("a transition must be present exactly when mode is InTransition")
        if self.mode == NM and self.current_scale != 1.0:
            raise StateError(f"NM requires scale 1, got {self.current_scale}")


@dataclass(frozen=True)
class PointOfInterest:
    id: str
    aabb_min: tuple[float, float, float]
    aabb_max: tuple[float, float, float]
    anchor: tuple[float, float, float]
    facing: float = 0.0

    def __post_init__(self):
        if not all(lo < hi for lo, hi in zip(self.aabb_min, self.aabb_max)):
            raise DomainError(f"POI {self.id!r}: bounding box is degenerate")
        if not self.contains_xz(self.anchor[0], self.anchor[2]):
            raise DomainError(f"POI {self.id!r}: anchor lies outside its bounding box")

    def contains_xz(self, x: float, z: float) -> bool:
        return (self.aabb_min[0] <= x <= self.aabb_max[0]
                and self.aabb_min[2] <= z <= self.aabb_max[2])


@dataclass(frozen=True)
class Chaperone:
    """Rectangular play area centred on the tracked-space origin."""

    half_x: float
    half_z: float

    def __post_init__(self):
        if not (self.half_x > 0 and self.half_z > 0):
            raise DomainError("chaperone half-extents must be positive")

    def contains(self, x: float, z: float, margin: float = 0.0) -> bool:
        return abs(x) <= self.half_x - margin and abs(z) <= self.half_z - margin

    def wall_clearance(self, x: float, z: float) -> float:
        return min(self.half_x - abs(x), self.half_z - abs(z))

    def distance_along(self, x: float, z: float, heading: float) -> float:
        """Distance from ``(x, z)`` to the boundary walking along ``heading``."""
        dx, dz = math.sin(heading), math.cos(heading)
        best = math.inf
        if dx > 0:
            best = min(best, (self.half_x - x) / dx)
        elif dx < 0:
            best = min(best, (-self.half_x - x) / dx)
        if dz > 0:
            best = min(best, (self.half_z - z) / dz)
        elif dz < 0:
            best = min(best, (-self.half_z - z) / dz)
        return max(best, 0.0)


# --- transitions -------------------------------------------------------------

def begin_transition(state: ModeState, target_scale: float, now: float, *, mapping: RigMapping,
                     pose: PhysicalPose, pull=None, instant: bool = False,
                     duration: float = DEFAULT_DURATION, yaw_delta: float = 0.0) -> ModeState:
    """Start resizing toward ``target_scale``.

    The player's current ground point is the fixpoint; ``pull`` adds a
    horizontal offset blended in over the transition. ``yaw_delta`` rotates
    the world about the player for the duration (reset rotation).
    """
    if state.mode == IN_TRANSITION:
        raise StateError("a transition is already in flight")
    if not (target_scale > 0 and math.isfinite(target_scale)):
        raise DomainError(f"target scale must be positive, got {target_scale}")
    if target_scale == state.current_scale:
        raise DomainError(f"target scale equals the current scale {target_scale}")
    if duration < 0:
        raise DomainError(f"duration must be >= 0, got {duration}")

    dur = 0.0 if instant else min(duration, max_transition_duration(state.current_scale, target_scale))
    px, pz = pose.xz
    pull = (0.0, 0.0) if pull is None else (float(pull[0]), float(pull[1]))
    spec = TransitionSpec(
        scale_from=state.current_scale,
        scale_to=float(target_scale),
        start_time=now,
        duration=dur,
        pull_offset=pull,
        anchor_fixpoint=to_virtual_xz(mapping, px, pz),
        physical_fixpoint=(px, pz),
        yaw_offset=mapping.yaw_offset + yaw_delta,
    )
    if dur == 0.0:
        return _finish(state, spec)
    return replace(state, mode=IN_TRANSITION, transition=spec, last_transition=spec)


def step_transition(spec: TransitionSpec, mapping: RigMapping, now: float) -> tuple[float, RigMapping]:
    """Scale and re-anchored mapping at time ``now``.

    Scale is linear in time. The anchor is chosen so the fixpoint's image
    sits at ``anchor_fixpoint + u * pull_offset``; the result depends only
    on ``now``, never on how the interval was stepped.
    """
    u = spec.progress(now)
    s = spec.scale_at(u)
    tx = spec.anchor_fixpoint[0] + u * spec.pull_offset[0]
    tz = spec.anchor_fixpoint[1] + u * spec.pull_offset[1]
    rx, rz = rotate(spec.yaw_offset, *spec.physical_fixpoint)
    anchor = (tx - s * rx, tz - s * rz)
    return s, replace(mapping, anchor=anchor, scale=s, yaw_offset=spec.yaw_offset)


def _finish(state: ModeState, spec: TransitionSpec) -> ModeState:
    s = spec.scale_to
    mode = NM if s == 1.0 else GM
    held = state.held_ratio * s if state.holding else state.held_object_scale
    return replace(state, mode=mode, current_scale=s, transition=None, last_transition=spec,
                   held_object_scale=held)


def advance(state: ModeState, mapping: RigMapping, now: float) -> tuple[ModeState, RigMapping]:
    """Advance an in-flight transition to ``now``; completes it once ``u`` reaches 1."""
    spec = state.transition
    if spec is None:
        return state, mapping
    s, mapping = step_transition(spec, mapping, now)
    if spec.progress(now) >= 1.0:
        return _finish(state, spec), mapping
    held = state.held_ratio * s if state.holding else state.held_object_scale
    return replace(state, current_scale=s, held_object_scale=held), mapping


# --- target acquisition ----------------------------------------------------------

def resolve_pull(pois, player_xz) -> tuple[tuple[float, float], tuple[float, float]] | None:
    """Anchor and pull offset of the POI box the player stands in, if any.

    With several boxes, the nearest anchor wins; equal distances go to the
    smaller id.
    """
    px, pz = player_xz
    hits = [p for p in pois if p.contains_xz(px, pz)]
    if not hits:
        return None
    best = min(hits, key=lambda p: (math.hypot(p.anchor[0] - px, p.anchor[2] - pz), p.id))
    ax, az = best.anchor[0], best.anchor[2]
    return (ax, az), (ax - px, az - pz)


def resolve_aim(pose: PhysicalPose, mapping: RigMapping, field: HeightField, max_pitch: float,
                ground: WalkingGround | None = None) -> tuple[float, float] | None:
    """Ground crosshair under the gaze once the head pitches below ``-max_pitch``."""
    if not pose.head_pitch < -max_pitch:
        return None
    head = map_pose(mapping, field, pose, ground)
    hit = raycast(field, head.position, gaze_direction(head.yaw, head.pitch))
    if hit is None:
        return None
    return hit[0], hit[2]


# --- resetting ------------------------------------------------------------------

def best_physical_heading(physical_xz, chaperone: Chaperone, samples: int = 360) -> tuple[float, float]:
    """Heading with the most walking room, scanned at ``360/samples`` degree steps."""
    px, pz = physical_xz
    best_h, best_d = 0.0, -1.0
    for k in range(samples):
        h = 2.0 * math.pi * k / samples
        d = chaperone.distance_along(px, pz, h)
        if d > best_d * (1.0 + 1e-12) + 1e-15:
            best_h, best_d = h, d
    return best_h, best_d


def compute_reset_rotation(physical_xz, chaperone: Chaperone, desired_virtual_heading: float,
                           mapping: RigMapping) -> float:
    """Yaw change that sends ``desired_virtual_heading`` toward the furthest wall."""
    if not chaperone.contains(*physical_xz):
        raise DomainError(f"physical point {tuple(physical_xz)} lies outside the chaperone")
    heading, _ = best_physical_heading(physical_xz, chaperone)
    return wrap_angle(desired_virtual_heading - heading - mapping.yaw_offset)


# --- teleport baseline ---------------------------------------------------------

def teleport_arc(origin, direction, launch_speed: float, gravity: float,
                 field: HeightField) -> tuple[float, float, float] | None:
    """Landing point of the ballistic pointer, or None if it leaves the terrain."""
    if not launch_speed > 0:
        raise DomainError(f"launch speed must be positive, got {launch_speed}")
    if not gravity > 0:
        raise DomainError(f"gravity must be positive, got {gravity}")
    ox, oy, oz = (float(v) for v in origin)
    if not field.contains(ox, oz):
        return None
    dx, dy, dz = (float(v) for v in direction)
    n = math.sqrt(dx * dx + dy * dy + dz * dz)
    if n == 0.0:
        raise DomainError("arc direction must be non-zero")
    vx, vy, vz = launch_speed * dx / n, launch_speed * dy / n, launch_speed * dz / n

    t1 = math.inf
    for o, v, lo, hi in ((ox, vx, field.origin[0], field.x_max), (oz, vz, field.origin[1], field.z_max)):
        if v > 0:
            t1 = min(t1, (hi - o) / v)
        elif v < 0:
            t1 = min(t1, (lo - o) / v)
    floor_y = float(field.heights.min()) - 1.0
    drop = oy - floor_y
    t_floor = (vy + math.sqrt(max(vy * vy + 2.0 * gravity * drop, 0.0))) / gravity
    t1 = max(min(t1, t_floor), 0.0)

    t = kernels.march_arc(field.heights, field.origin[0], field.origin[1], field.cell_size,
                          ox, oy, oz, vx, vy, vz, gravity, t1, ARC_DT, ARC_TOL)
    if math.isnan(t):
        return None
    return ox + vx * t, oy + vy * t - 0.5 * gravity * t * t, oz + vz * t


def aim_arc(origin, target, launch_speed: float, gravity: float) -> tuple[tuple[float, float, float], bool]:
    """Launch direction of the flatter arc through ``target``.

    Returns ``(direction, reachable)``; out of range targets get the
    45 degree maximum-range direction.
    """
    dx, dz = target[0] - origin[0], target[2] - origin[2]
    r = math.hypot(dx, dz)
    dy = target[1] - origin[1]
    if r == 0.0:
        return (0.0, -1.0 if dy <= 0 else 1.0, 0.0), True
    ux, uz = dx / r, dz / r
    v2 = launch_speed * launch_speed
    disc = v2 * v2 - gravity * (gravity * r * r + 2.0 * dy * v2)
    if disc < 0:
        c = math.sqrt(0.5)
        return (ux * c, c, uz * c), False
    theta = math.atan2(v2 - math.sqrt(disc), gravity * r)
    c, s = math.cos(theta), math.sin(theta)
    return (ux * c, s, uz * c), True


def apply_teleport(mapping: RigMapping, pose: PhysicalPose, landing) -> RigMapping:
    """Re-anchor so the current tracked position maps onto ``landing``."""
    if mapping.scale != 1.0:
        raise StateError(f"teleporting is a normal-mode action, current scale is {mapping.scale}")
    rx, rz = rotate(mapping.yaw_offset, *pose.xz)
    return replace(mapping, anchor=(landing[0] - rx, landing[2] - rz))


# --- giant size and carried objects -------------------------------------------------

def scale_for_state(game_state: str, table) -> float:
    try:
        return float(table[game_state])
    except KeyError:
        raise ConfigError(f"no giant-mode scale configured for game state {game_state!r}") from None


def held_object_scale(state: ModeState, event: str, object_scale: float = 1.0) -> float:
    """Scale a carried object has after ``event`` (grab, drop, transition_complete)."""
    return object_event(state, event, object_scale).held_object_scale


def object_event(state: ModeState, event: str, object_scale: float = 1.0) -> ModeState:
    """Apply a grab/drop/transition_complete event to the carried-object bookkeeping.

    While held, the object keeps its size relative to the player, so it grows
    and shrinks with every transition; a drop freezes its current size.
    ``object_scale`` is the size of the object being grabbed.
    """
    if event == "grab":
        if not object_scale > 0:
            raise DomainError(f"object scale must be positive, got {object_scale}")
        return replace(state, holding=True, held_ratio=object_scale / state.current_scale,
                       held_object_scale=object_scale)
    if event == "drop":
        if not state.holding:
            raise StateError("drop without a held object")
        return replace(state, holding=False, held_object_scale=state.held_ratio * state.current_scale)
    if event == "transition_complete":
        if state.holding:
            return replace(state, held_object_scale=state.held_ratio * state.current_scale)
        return state
    raise DomainError(f"unknown object event {event!r}")
