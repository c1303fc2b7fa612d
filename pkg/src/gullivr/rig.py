"""Physical-to-virtual mapping of the tracked head, stereo eyes and walking ground.

Angles follow a y-up frame seen from above: yaw 0 faces +z, yaw pi/2 faces
+x, and the head's right axis at yaw 0 is +x. Negative pitch looks down.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from gullivr.errors import DomainError
from gullivr.heightfield import HeightField, check_inside, smooth, smoothed_height, smoothing_kernel
from gullivr import kernels

DEFAULT_IPD = 0.064
DEFAULT_FOOT_SMOOTH = 0.003


def forward(yaw: float) -> tuple[float, float]:
    return math.sin(yaw), math.cos(yaw)


def right(yaw: float) -> tuple[float, float]:
    return math.cos(yaw), -math.sin(yaw)


def rotate(yaw: float, x: float, z: float) -> tuple[float, float]:
    """Rotate a horizontal vector so that heading ``a`` becomes heading ``a + yaw``."""
    c, s = math.cos(yaw), math.sin(yaw)
    return c * x + s * z, -s * x + c * z


def heading_of(x: float, z: float) -> float:
    return math.atan2(x, z)


def gaze_direction(yaw: float, pitch: float) -> tuple[float, float, float]:
    cp = math.cos(pitch)
    return cp * math.sin(yaw), math.sin(pitch), cp * math.cos(yaw)


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


@dataclass(frozen=True)
class PhysicalPose:
    t: float
    head_pos: tuple[float, float, float]
    head_yaw: float = 0.0
    head_pitch: float = 0.0

    def __post_init__(self):
        if self.head_pos[1] < 0:
            raise DomainError(f"head height must be >= 0 above the physical floor, got {self.head_pos[1]}")

    @property
    def xz(self) -> tuple[float, float]:
        return self.head_pos[0], self.head_pos[2]


@dataclass(frozen=True)
class RigMapping:
    """Similarity map from tracked space to the virtual world.

    ``virtual_xz = anchor + scale * R(yaw_offset) * physical_xz``; the
    height is ``scale * physical_y`` above the walking ground smoothed with
    radius ``foot_smooth_coeff * scale``.
    """

    anchor: tuple[float, float] = (0.0, 0.0)
    yaw_offset: float = 0.0
    scale: float = 1.0
    foot_smooth_coeff: float = DEFAULT_FOOT_SMOOTH
    ground_kind: str = "gaussian"

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DomainError(f"scale must be positive, got {self.scale}")
        if self.foot_smooth_coeff < 0:
            raise DomainError(f"foot_smooth_coeff must be >= 0, got {self.foot_smooth_coeff}")

    @property
    def smoothing_radius(self) -> float:
        return self.foot_smooth_coeff * self.scale


@dataclass(frozen=True)
class VirtualPose:
    position: tuple[float, float, float]
    yaw: float
    pitch: float

    @property
    def xz(self) -> tuple[float, float]:
        return self.position[0], self.position[2]


@dataclass(frozen=True)
class EyePoses:
    left_eye: tuple[float, float, float]
    right_eye: tuple[float, float, float]
    modeled_eye_sep: float


def to_virtual_xz(mapping: RigMapping, px: float, pz: float) -> tuple[float, float]:
    rx, rz = rotate(mapping.yaw_offset, px, pz)
    return mapping.anchor[0] + mapping.scale * rx, mapping.anchor[1] + mapping.scale * rz


def to_physical_xz(mapping: RigMapping, vx: float, vz: float) -> tuple[float, float]:
    dx = (vx - mapping.anchor[0]) / mapping.scale
    dz = (vz - mapping.anchor[1]) / mapping.scale
    return rotate(-mapping.yaw_offset, dx, dz)


class WalkingGround:
    """Smoothed walking ground, with full smoothed fields cached per radius.

    Radii registered through :meth:`precompute` (the NM and GM levels of a
    scenario) are served from a cached field; any other radius, e.g. mid
    transition, is evaluated locally with identical arithmetic.
    """

    def __init__(self, field: HeightField, kind: str = "gaussian"):
        self.field = field
        self.kind = kind
        self._fields: dict[float, HeightField] = {}
        self._weights: dict[float, object] = {}

    def precompute(self, radius: float) -> HeightField:
        if radius not in self._fields:
            self._fields[radius] = smooth(self.field, radius, self.kind)
        return self._fields[radius]

    def height(self, x: float, z: float, radius: float) -> float:
        check_inside(self.field, x, z)
        f = self._fields.get(radius)
        if f is not None:
            return kernels.bilinear(f.heights, f.origin[0], f.origin[1], f.cell_size, x, z)
        w = self._weights.get(radius)
        if w is None:
            if len(self._weights) > 256:
                self._weights.clear()
            w = self._weights[radius] = smoothing_kernel(radius, self.field.cell_size, self.kind)
        fld = self.field
        return kernels.smoothed_at(fld.heights, fld.origin[0], fld.origin[1], fld.cell_size, x, z, w)


def _ground(mapping: RigMapping, field: HeightField, x: float, z: float,
            ground: WalkingGround | None) -> float:
    if ground is not None:
        return ground.height(x, z, mapping.smoothing_radius)
    return smoothed_height(field, x, z, mapping.smoothing_radius, mapping.ground_kind)


def ground_height_under(mapping: RigMapping, field: HeightField, pose: PhysicalPose,
                        ground: WalkingGround | None = None) -> float:
    """Smoothed ground height below the mapped head (the "giant foot")."""
    vx, vz = to_virtual_xz(mapping, *pose.xz)
    return _ground(mapping, field, vx, vz, ground)


def map_pose(mapping: RigMapping, field: HeightField, pose: PhysicalPose,
             ground: WalkingGround | None = None) -> VirtualPose:
    vx, vz = to_virtual_xz(mapping, *pose.xz)
    g = _ground(mapping, field, vx, vz, ground)
    vy = mapping.scale * pose.head_pos[1] + g
    return VirtualPose((vx, vy, vz), pose.head_yaw + mapping.yaw_offset, pose.head_pitch)


def eye_poses(mapping: RigMapping, pose: PhysicalPose, physical_ipd: float = DEFAULT_IPD,
              head: VirtualPose | None = None, field: HeightField | None = None) -> EyePoses:
    """Left/right eye points with separation ``scale * physical_ipd``.

    The eye midpoint is the mapped head point. Without ``head`` or ``field``
    the vertical ground offset is taken as zero.
    """
    if not physical_ipd > 0:
        raise DomainError(f"physical_ipd must be positive, got {physical_ipd}")
    if head is None:
        if field is not None:
            head = map_pose(mapping, field, pose)
        else:
            vx, vz = to_virtual_xz(mapping, *pose.xz)
            head = VirtualPose((vx, mapping.scale * pose.head_pos[1], vz),
                               pose.head_yaw + mapping.yaw_offset, pose.head_pitch)
    sep = mapping.scale * physical_ipd
    rx, rz = right(head.yaw)
    hx, hy, hz = head.position
    half = sep / 2.0
    return EyePoses((hx - rx * half, hy, hz - rz * half), (hx + rx * half, hy, hz + rz * half), sep)
