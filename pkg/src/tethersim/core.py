"""Frame conventions and small kinematic helpers.

World frame is right-handed with z pointing up, so depth is negative z.
Attitude uses the ZYX (yaw-pitch-roll) Euler convention. A generalized
position is stored as ``eta = [x, y, z, roll, pitch, yaw]`` and a body
velocity as ``nu = [u, v, w, p, q, r]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularAttitude

# |pitch| must stay below pi/2 minus this margin
PITCH_GUARD = 0.01


def wrap_angle(angle: float) -> float:
    """Map an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped == -math.pi:
        return math.pi
    return wrapped


def vec3(x=0.0, y=0.0, z=0.0) -> np.ndarray:
    v = np.array([x, y, z], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


def skew(v) -> np.ndarray:
    """Cross-product matrix, ``skew(a) @ b == cross(a, b)``."""
    return np.array(
        [[0.0, -v[2], v[1]],
         [v[2], 0.0, -v[0]],
         [-v[1], v[0], 0.0]]
    )


@dataclass(frozen=True)
class Pose:
    """Position (world, m) plus yaw/pitch/roll (rad)."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def __post_init__(self):
        values = (self.x, self.y, self.z, self.roll, self.pitch, self.yaw)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("pose components must be finite")
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def eta(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.roll, self.pitch, self.yaw])

    @classmethod
    def from_eta(cls, eta) -> "Pose":
        return cls(*(float(v) for v in eta[:6]))


def _angles(pose):
    if isinstance(pose, Pose):
        return pose.roll, pose.pitch, pose.yaw
    return pose[3], pose[4], pose[5]


def rotation_body_to_world(pose) -> np.ndarray:
    """Rotation matrix R = Rz(yaw) Ry(pitch) Rx(roll).

    ``pose`` may be a :class:`Pose` or a 6-element eta array.
    """
    phi, theta, psi = _angles(pose)
    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cpsi * cth, -spsi * cphi + cpsi * sth * sphi, spsi * sphi + cpsi * cphi * sth],
            [spsi * cth, cpsi * cphi + sphi * sth * spsi, -cpsi * sphi + sth * spsi * cphi],
            [-sth, cth * sphi, cth * cphi],
        ]
    )


def euler_rate_matrix(pose) -> np.ndarray:
    """Transformation from body angular velocity to Euler-angle rates."""
    phi, theta, _ = _angles(pose)
    if abs(theta) >= math.pi / 2 - PITCH_GUARD:
        raise SingularAttitude(f"pitch {theta:.6f} rad is inside the singularity guard")
    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, tth = math.cos(theta), math.tan(theta)
    return np.array(
        [
            [1.0, sphi * tth, cphi * tth],
            [0.0, cphi, -sphi],
            [0.0, sphi / cth, cphi / cth],
        ]
    )


def kinematic_map(pose, nu) -> np.ndarray:
    """Return eta_dot = J(eta) nu as a 6-vector."""
    nu = np.asarray(nu, dtype=float)
    T = euler_rate_matrix(pose)
    R = rotation_body_to_world(pose)
    return np.concatenate((R @ nu[:3], T @ nu[3:]))
