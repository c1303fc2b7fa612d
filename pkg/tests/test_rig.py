import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gullivr.errors import DomainError
from gullivr.heightfield import HeightField, sample_height, value_noise
from gullivr.rig import (PhysicalPose, RigMapping, WalkingGround, eye_poses, ground_height_under,
                         map_pose, rotate, to_physical_xz, to_virtual_xz, wrap_angle)

from conftest import flat

BIG = flat(0.0, n=201, cell=5.0, origin=(-500.0, -500.0))


def test_identity_mapping_on_flat_ground():
    v = map_pose(RigMapping(), flat(), PhysicalPose(0.0, (1.0, 1.7, 2.0)))
    assert v.position == pytest.approx((1.0, 1.7, 2.0), abs=1e-15)


def test_step_at_scale_30_covers_15_m():
    m = RigMapping(scale=30.0)
    a = map_pose(m, BIG, PhysicalPose(0.0, (0.0, 1.7, 0.0)))
    b = map_pose(m, BIG, PhysicalPose(0.1, (0.5, 1.7, 0.0)))
    assert b.position[0] - a.position[0] == pytest.approx(15.0, rel=1e-12)
    assert b.position[2] == a.position[2]


def test_head_at_scale_100_over_12_m_ground():
    v = map_pose(RigMapping(scale=100.0), flat(12.0, n=201, cell=5.0, origin=(-500.0, -500.0)),
                 PhysicalPose(0.0, (0.3, 1.7, -0.2)))
    assert v.position[1] == pytest.approx(182.0, rel=1e-12)


def test_negative_head_height_rejected():
    with pytest.raises(DomainError):
        PhysicalPose(0.0, (0.0, -0.1, 0.0))


def test_mapping_outside_terrain_is_an_error():
    with pytest.raises(DomainError):
        map_pose(RigMapping(scale=100.0), flat(), PhysicalPose(0.0, (1.0, 1.7, 0.0)))


# --- eyes -------------------------------------------------------------------------------

@pytest.mark.parametrize("scale,expect", [(1.0, 0.064), (100.0, 6.4)])
def test_eye_separation(scale, expect):
    e = eye_poses(RigMapping(scale=scale), PhysicalPose(0.0, (0.0, 1.7, 0.0)), 0.064)
    assert e.modeled_eye_sep == pytest.approx(expect, rel=1e-15)
    assert math.dist(e.left_eye, e.right_eye) == pytest.approx(expect, rel=1e-12)


def test_eyes_follow_rotated_right_axis():
    e = eye_poses(RigMapping(scale=30.0), PhysicalPose(0.0, (0.0, 1.7, 0.0), head_yaw=math.pi / 2), 0.06)
    # facing +x, the right hand points to -z
    assert e.right_eye == pytest.approx((0.0, 51.0, -0.9), abs=1e-12)
    assert e.left_eye == pytest.approx((0.0, 51.0, 0.9), abs=1e-12)


@given(scale=st.floats(0.01, 500), ipd=st.floats(0.04, 0.08), yaw=st.floats(-7, 7))
def test_eye_separation_law(scale, ipd, yaw):
    m = RigMapping(scale=scale, yaw_offset=0.3)
    pose = PhysicalPose(0.0, (0.2, 1.6, -0.4), head_yaw=yaw)
    e = eye_poses(m, pose, ipd)
    assert e.modeled_eye_sep == scale * ipd
    mid = [(a + b) / 2 for a, b in zip(e.left_eye, e.right_eye)]
    vx, vz = to_virtual_xz(m, 0.2, -0.4)
    assert mid == pytest.approx([vx, scale * 1.6, vz], rel=1e-12, abs=1e-12)


# --- walking ground -------------------------------------------------------------------------

def checkerboard(n=41, cell=1.0):
    i, j = np.indices((n, n))
    return HeightField((-20.0, -20.0), cell, np.where((i + j) % 2 == 0, 1.0, -1.0))


def test_flat_ground_under_any_scale():
    f = flat(3.0, n=201, cell=5.0, origin=(-500.0, -500.0))
    for s in (1.0, 7.5, 100.0):
        m = RigMapping(scale=s, foot_smooth_coeff=0.05)
        assert ground_height_under(m, f, PhysicalPose(0.0, (0.4, 1.7, 0.1))) == pytest.approx(3.0, rel=1e-14)


def test_larger_scale_contracts_toward_mean():
    f = checkerboard()
    mean = float(f.heights.mean())
    pose = PhysicalPose(0.0, (0.0, 1.7, 0.0))
    small = ground_height_under(RigMapping(scale=1.0, foot_smooth_coeff=0.02), f, pose)
    big = ground_height_under(RigMapping(scale=100.0, foot_smooth_coeff=0.02, anchor=(0.0, 0.0)), f,
                              PhysicalPose(0.0, (0.0, 1.7, 0.0)))
    assert abs(big - mean) <= abs(small - mean)
    assert abs(big - mean) < 0.5


def test_zero_coefficient_is_raw_terrain():
    f = value_noise(2, 41, 41, 1.0, 4.0, 6.0, origin=(-20.0, -20.0))
    m = RigMapping(scale=10.0, foot_smooth_coeff=0.0)
    pose = PhysicalPose(0.0, (0.37, 1.7, -1.21))
    assert ground_height_under(m, f, pose) == sample_height(f, 3.7, -12.1)


def test_cached_and_local_ground_agree():
    f = value_noise(5, 101, 101, 2.0, 8.0, 20.0, origin=(-100.0, -100.0))
    g = WalkingGround(f)
    m = RigMapping(scale=40.0, foot_smooth_coeff=0.05)
    pose = PhysicalPose(0.0, (0.8, 1.7, -1.1))
    local = ground_height_under(m, f, pose, g)
    g.precompute(m.smoothing_radius)
    assert ground_height_under(m, f, pose, g) == pytest.approx(local, rel=1e-12, abs=1e-12)


# --- properties -------------------------------------------------------------------------

TERRAIN = value_noise(11, 201, 201, 12.0, 30.0, 90.0, origin=(-1200.0, -1200.0))
coords = st.floats(-1.9, 1.9)


@given(scale=st.floats(1, 200), x=coords, z=coords, h=st.floats(0.0, 2.2), yaw=st.floats(-4, 4))
@settings(max_examples=150, deadline=None)
def test_floor_alignment(scale, x, z, h, yaw):
    m = RigMapping(scale=scale, yaw_offset=yaw, foot_smooth_coeff=0.01)
    pose = PhysicalPose(0.0, (x, h, z))
    v = map_pose(m, TERRAIN, pose)
    ground = ground_height_under(m, TERRAIN, pose)
    assert v.position[1] - ground == pytest.approx(scale * h, rel=1e-9, abs=1e-9)


@given(scale=st.floats(1, 200), x=coords, z=coords, dx=st.floats(-0.05, 0.05), dz=st.floats(-0.05, 0.05),
       yaw=st.floats(-4, 4), ax=st.floats(-50, 50))
@settings(max_examples=150, deadline=None)
def test_velocity_sync(scale, x, z, dx, dz, yaw, ax):
    m = RigMapping(anchor=(ax, -ax), scale=scale, yaw_offset=yaw)
    a = map_pose(m, TERRAIN, PhysicalPose(0.0, (x, 1.7, z)))
    b = map_pose(m, TERRAIN, PhysicalPose(1 / 90, (x + dx, 1.7, z + dz)))
    virt = math.hypot(b.position[0] - a.position[0], b.position[2] - a.position[2])
    assert virt == pytest.approx(scale * math.hypot(dx, dz), rel=1e-9, abs=1e-9)


@given(x=coords, z=coords, x2=coords, z2=coords, scale=st.floats(0.001, 1000), yaw=st.floats(-4, 4))
def test_mapping_is_injective_and_invertible(x, z, x2, z2, scale, yaw):
    m = RigMapping(anchor=(3.0, -7.0), scale=scale, yaw_offset=yaw)
    v1, v2 = to_virtual_xz(m, x, z), to_virtual_xz(m, x2, z2)
    # separations below float resolution at the anchor collapse in any arithmetic
    if math.dist((x, z), (x2, z2)) > 1e-9:
        assert math.dist(v1, v2) == pytest.approx(scale * math.dist((x, z), (x2, z2)), rel=1e-9)
        assert math.dist(v1, v2) > 0
    assert to_physical_xz(m, *v1) == pytest.approx((x, z), abs=1e-9)


def test_rotation_convention():
    # +z rotated by a quarter turn points to +x
    assert rotate(math.pi / 2, 0.0, 1.0) == pytest.approx((1.0, 0.0), abs=1e-15)
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
