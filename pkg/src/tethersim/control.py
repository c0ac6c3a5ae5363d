"""Waypoint PD controllers with optional disturbance feedforward.

Both vehicles track a piecewise-constant target (the active waypoint).
In ``aware`` mode the controller subtracts the supplied disturbance
estimate from its commanded force before the thrust clamp; ``nonaware``
ignores the estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import rotation_body_to_world, wrap_angle
from .environment import SeaState, sea_state_preset, vehicle_disturbance
from .errors import InvalidParams, UnknownSet
from .vehicles import ControlInput, Disturbance, VehicleParams, VehicleState

AWARE = "aware"
NONAWARE = "nonaware"
MODES = (AWARE, NONAWARE)

# inside this horizontal distance the heading is held instead of pointed at the waypoint
LOS_RADIUS = 1.0


@dataclass(frozen=True)
class WaypointPlan:
    waypoints: tuple
    acceptance_radius: float = 0.5
    speed_cap: float = 1.0

    def __post_init__(self):
        pts = tuple(tuple(float(v) for v in wp) for wp in self.waypoints)
        if not pts:
            raise InvalidParams("waypoint plan needs at least one waypoint")
        if any(len(wp) != 3 for wp in pts):
            raise InvalidParams("waypoints must be 3-D points")
        if not self.acceptance_radius > 0:
            raise InvalidParams("acceptance radius must be > 0")
        if not self.speed_cap > 0:
            raise InvalidParams("speed cap must be > 0")
        object.__setattr__(self, "waypoints", pts)

    def target(self, index: int) -> np.ndarray:
        return np.array(self.waypoints[index])


@dataclass(frozen=True)
class Gains:
    kp: float
    kd: float
    kpsi: float
    kr: float

    def __post_init__(self):
        if min(self.kp, self.kd, self.kpsi, self.kr) < 0:
            raise InvalidParams("controller gains must be >= 0")


DEFAULT_ASV_GAINS = Gains(kp=40.0, kd=40.0, kpsi=8.0, kr=6.0)
DEFAULT_AUV_GAINS = Gains(kp=40.0, kd=40.0, kpsi=4.0, kr=2.0)


@dataclass(frozen=True)
class ControllerConfig:
    asv: Gains = field(default_factory=lambda: DEFAULT_ASV_GAINS)
    auv: Gains = field(default_factory=lambda: DEFAULT_AUV_GAINS)
    mode: str = AWARE
    label: str = "custom"

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParams(f"controller mode must be one of {MODES}, got {self.mode!r}")


def advance_waypoint(position, plan: WaypointPlan, index: int, horizontal: bool = False) -> int:
    """Move to the next waypoint once inside the acceptance radius; never goes back.

    ``horizontal`` ignores the vertical offset (the surface vehicle rides the
    waves and cannot close it).
    """
    last = len(plan.waypoints) - 1
    if index >= last:
        return index
    offset = plan.target(index) - np.asarray(position, dtype=float)
    if horizontal:
        offset = offset[:2]
    if np.linalg.norm(offset) < plan.acceptance_radius:
        return index + 1
    return index


def _approach_force(error, velocity, gains: Gains, speed_cap: float):
    """PD force in the world frame with the approach speed capped.

    Equivalent to ``kp * e - kd * v`` while ``kp/kd * |e|`` stays below
    the cap.
    """
    if gains.kd == 0:
        return gains.kp * error
    v_des = (gains.kp / gains.kd) * error
    speed = float(np.linalg.norm(v_des))
    if speed > speed_cap:
        v_des *= speed_cap / speed
    return gains.kd * (v_des - velocity)


def _heading_command(error, yaw, yaw_rate, gains: Gains):
    dist = math.hypot(error[0], error[1])
    if dist > LOS_RADIUS:
        yaw_err = wrap_angle(math.atan2(error[1], error[0]) - yaw)
    else:
        yaw_err = 0.0
    return gains.kpsi * yaw_err - gains.kr * yaw_rate


def compute_control(state: VehicleState, params: VehicleParams, plan: WaypointPlan,
                    config: ControllerConfig, disturbance_estimate: Disturbance | None = None,
                    index: int = 0) -> ControlInput:
    """Thrust command toward waypoint ``index`` of ``plan``.

    The surface vehicle is underactuated: it gets a surge force and a yaw
    moment only. The underwater vehicle gets a 3-axis force and a yaw
    moment.
    """
    gains = config.asv if params.surface else config.auv
    R = rotation_body_to_world(state.eta)
    error = plan.target(index) - state.eta[:3]
    v_world = R @ state.nu[:3]
    if params.surface:
        error = error.copy()
        error[2] = 0.0
        v_world = v_world.copy()
        v_world[2] = 0.0
    force_world = _approach_force(error, v_world, gains, plan.speed_cap)
    if config.mode == AWARE and disturbance_estimate is not None:
        force_world = force_world - disturbance_estimate.force
    force_body = R.T @ force_world
    yaw_moment = _heading_command(error, state.eta[5], state.nu[5], gains)
    tau = np.zeros(6)
    if params.surface:
        tau[0] = force_body[0]
    else:
        tau[:3] = force_body
    tau[5] = yaw_moment
    limits = params.thrust_limits
    return ControlInput.from_tau(np.clip(tau, -limits, limits))


def disturbance_estimator(sea: SeaState, t: float, state: VehicleState,
                          params: VehicleParams) -> Disturbance:
    """Perfect estimate: exactly the wave + wind load the environment applies."""
    return Disturbance(force=vehicle_disturbance(sea, t, state.eta, params))


_SETS = {
    "set_1": (AWARE, "moderate"),
    "set_2": (NONAWARE, "moderate"),
    "set_3": (AWARE, "rough"),
    "set_4": (NONAWARE, "rough"),
}
SET_LABELS = tuple(_SETS)


def configuration_sets(label: str, base: ControllerConfig | None = None):
    """Controller mode and sea state for one of the four study configurations."""
    try:
        mode, sea = _SETS[label]
    except KeyError:
        raise UnknownSet(f"unknown configuration set {label!r}; expected one of {SET_LABELS}") from None
    base = base or ControllerConfig()
    config = ControllerConfig(asv=base.asv, auv=base.auv, mode=mode, label=label)
    return config, sea_state_preset(sea)
