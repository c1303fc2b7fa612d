"""Giant-mode VR locomotion: rig mapping, resize transitions, arc teleport baseline
and a headless scripted-player simulator."""
from gullivr.errors import ConfigError, DomainError, GulliVRError, ScenarioError, StateError
from gullivr.heightfield import HeightField, raycast, sample_height, smooth
from gullivr.kernels import BACKEND
from gullivr.locomotion import (Chaperone, ModeState, PointOfInterest, TransitionSpec,
                                begin_transition, step_transition, teleport_arc)
from gullivr.rig import EyePoses, PhysicalPose, RigMapping, eye_poses, ground_height_under, map_pose

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Chaperone", "ConfigError", "DomainError", "EyePoses", "GulliVRError", "HeightField",
    "ModeState", "PhysicalPose", "PointOfInterest", "RigMapping", "ScenarioError", "StateError",
    "TransitionSpec", "begin_transition", "eye_poses", "ground_height_under", "map_pose", "raycast",
    "sample_height", "smooth", "step_transition", "teleport_arc",
]
