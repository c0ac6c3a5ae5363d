"""Six-DOF rigid-body dynamics for the surface and underwater vehicles.

    M nu_dot + C(nu) nu + D(nu_r) nu_r = tau + tau_env + tau_tether + g(eta)

with added mass folded into ``M`` and ``g(eta)`` returned as the restoring
load acting on the body (positive when it pushes the body along the axis).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import kinematic_map, rotation_body_to_world, wrap_angle
from .environment import GRAVITY, Hull
from .errors import InvalidParams


def _cross(a, b):
    return np.array(
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    )


@dataclass
class VehicleParams:
    name: str
    mass_matrix: np.ndarray
    damping_linear: np.ndarray
    damping_quadratic: np.ndarray
    weight: float
    buoyancy: float
    cg: np.ndarray = field(default_factory=lambda: np.zeros(3))
    cb: np.ndarray = field(default_factory=lambda: np.zeros(3))
    hull: Hull = field(default_factory=lambda: Hull(1.0, 1.0, 0.1))
    wind_cx: float = 0.0
    wind_cy: float = 0.0
    frontal_area: float = 0.0
    lateral_area: float = 0.0
    thrust_limits: np.ndarray = field(default_factory=lambda: np.full(6, 100.0))
    surface: bool = False

    def __post_init__(self):
        for name in ("mass_matrix", "damping_linear", "damping_quadratic"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float).reshape(6, 6))
        self.cg = np.asarray(self.cg, dtype=float)
        self.cb = np.asarray(self.cb, dtype=float)
        self.thrust_limits = np.asarray(self.thrust_limits, dtype=float)
        self.validate()

    def validate(self):
        M = self.mass_matrix
        if not np.allclose(M, M.T, rtol=0, atol=1e-12 * max(1.0, np.abs(M).max())):
            raise InvalidParams(f"{self.name}: mass matrix must be symmetric")
        if np.linalg.eigvalsh(M).min() <= 0:
            raise InvalidParams(f"{self.name}: mass matrix must be positive definite")
        for name in ("damping_linear", "damping_quadratic"):
            D = getattr(self, name)
            if np.linalg.eigvalsh(0.5 * (D + D.T)).min() < -1e-12:
                raise InvalidParams(f"{self.name}: {name} must be positive semi-definite")
        if np.any(self.thrust_limits <= 0) or self.thrust_limits.shape != (6,):
            raise InvalidParams(f"{self.name}: thrust limits must be six positive values")
        if self.weight < 0 or self.buoyancy < 0:
            raise InvalidParams(f"{self.name}: weight and buoyancy must be >= 0")

    @cached_property
    def mass_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.mass_matrix)


def asv_defaults() -> VehicleParams:
    """BlueBoat-sized catamaran; every number here is a modelling default."""
    m = 15.0
    added = 1.3
    inertia = np.array([1.9, 2.0, 3.0])
    M = np.diag([m * added, m * added, m * added, *(inertia * added)])
    return VehicleParams(
        name="asv",
        mass_matrix=M,
        damping_linear=np.diag([5.0, 15.0, 20.0, 2.0, 2.0, 5.0]),
        damping_quadratic=np.diag([11.0, 40.0, 40.0, 2.0, 2.0, 4.0]),
        weight=m * GRAVITY,
        buoyancy=m * GRAVITY,
        hull=Hull(beam=0.4, length=1.2, draft=0.04),
        wind_cx=0.8,
        wind_cy=0.9,
        frontal_area=0.12,
        lateral_area=0.3,
        thrust_limits=np.array([100.0, 100.0, 100.0, 20.0, 20.0, 20.0]),
        surface=True,
    )


def auv_defaults() -> VehicleParams:
    """BlueROV2 Heavy-sized vehicle; damping after published ROV identification."""
    m = 13.5
    added = 1.3
    inertia = np.array([0.26, 0.23, 0.37])
    M = np.diag([m * added, m * added, m * added, *(inertia * added)])
    return VehicleParams(
        name="auv",
        mass_matrix=M,
        damping_linear=np.diag([4.03, 6.22, 5.18, 0.07, 0.07, 0.07]),
        damping_quadratic=np.diag([18.18, 21.66, 36.99, 1.55, 1.55, 1.55]),
        weight=m * GRAVITY,
        buoyancy=m * GRAVITY,
        cb=np.array([0.0, 0.0, 0.02]),
        hull=Hull(beam=0.575, length=0.457, draft=0.06),
        thrust_limits=np.array([90.0, 90.0, 110.0, 20.0, 20.0, 20.0]),
        surface=False,
    )


def default_params(which: str) -> VehicleParams:
    if which == "asv":
        return asv_defaults()
    if which == "auv":
        return auv_defaults()
    raise InvalidParams(f"unknown vehicle {which!r}")


@dataclass
class VehicleState:
    eta: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        self.eta = np.asarray(self.eta, dtype=float).copy()
        self.nu = np.asarray(self.nu, dtype=float).copy()

    @classmethod
    def at_rest(cls, eta) -> "VehicleState":
        return cls(eta, np.zeros(6))

    @property
    def position(self) -> np.ndarray:
        return self.eta[:3]

    @property
    def yaw(self) -> float:
        return float(self.eta[5])

    def copy(self) -> "VehicleState":
        return VehicleState(self.eta, self.nu)


@dataclass(frozen=True)
class ControlInput:
    """Body-frame thrust: force (N) and moment (N m)."""

    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    moment: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @property
    def tau(self) -> np.ndarray:
        return np.concatenate((self.force, self.moment))

    @classmethod
    def from_tau(cls, tau) -> "ControlInput":
        tau = np.asarray(tau, dtype=float)
        return cls(tau[:3].copy(), tau[3:].copy())

    def clamped(self, limits) -> "ControlInput":
        limits = np.asarray(limits, dtype=float)
        return ControlInput.from_tau(np.clip(self.tau, -limits, limits))


@dataclass(frozen=True)
class Disturbance:
    """World-frame environmental load on a vehicle."""

    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    moment: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not (np.all(np.isfinite(self.force)) and np.all(np.isfinite(self.moment))):
            raise InvalidParams("disturbance must be finite")


def coriolis_matrix(M, nu) -> np.ndarray:
    """Coriolis-centripetal matrix parameterised from a symmetric M."""
    M = np.asarray(M, dtype=float)
    nu = np.asarray(nu, dtype=float)
    a = M[:3, :3] @ nu[:3] + M[:3, 3:] @ nu[3:]
    b = M[3:, :3] @ nu[:3] + M[3:, 3:] @ nu[3:]
    C = np.zeros((6, 6))
    Sa = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    Sb = np.array([[0.0, -b[2], b[1]], [b[2], 0.0, -b[0]], [-b[1], b[0], 0.0]])
    C[:3, 3:] = -Sa
    C[3:, :3] = -Sa
    C[3:, 3:] = -Sb
    return C


def _coriolis_force(M, nu):
    # C(nu) nu without assembling the matrix
    a = M[:3, :3] @ nu[:3] + M[:3, 3:] @ nu[3:]
    b = M[3:, :3] @ nu[:3] + M[3:, 3:] @ nu[3:]
    w = nu[3:]
    return np.concatenate((_cross(w, a), _cross(nu[:3], a) + _cross(w, b)))


def damping_matrix(nu, params: VehicleParams) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    return params.damping_linear + params.damping_quadratic * np.abs(nu)[None, :]


def damping_forces(nu, params: VehicleParams) -> np.ndarray:
    """Hydrodynamic damping load, ``-(D_lin + D_quad diag|nu|) nu``."""
    nu = np.asarray(nu, dtype=float)
    return -(params.damping_linear @ nu + params.damping_quadratic @ (np.abs(nu) * nu))


def restoring_forces(pose, params: VehicleParams, R=None) -> np.ndarray:
    """Gravity and buoyancy resolved in the body frame.

    Returns the load acting on the body: net force ``(B - W)`` along
    world up, plus the righting moment from the CG/CB offsets.
    """
    if R is None:
        R = rotation_body_to_world(pose)
    up = R[2]  # world z-axis expressed in body coordinates
    fg = -params.weight * up
    fb = params.buoyancy * up
    moment = _cross(params.cg, fg) + _cross(params.cb, fb)
    return np.concatenate((fg + fb, moment))


def body_load(R, force_world, moment_world=None, lever=None) -> np.ndarray:
    """Rotate a world force (and moment) into a body 6-vector.

    ``lever`` is the body-frame point of application, adding r x F.
    """
    fb = R.T @ force_world
    mb = np.zeros(3) if moment_world is None else R.T @ moment_world
    if lever is not None:
        mb = mb + _cross(lever, fb)
    return np.concatenate((fb, mb))


def acceleration(state: VehicleState, params: VehicleParams, tau, disturbance: Disturbance,
                 tether_force, tether_attach=None, current=None) -> np.ndarray:
    eta, nu = state.eta, state.nu
    R = rotation_body_to_world(eta)
    nu_r = nu
    if current is not None:
        nu_r = nu.copy()
        nu_r[:3] -= R.T @ current
    load = (
        np.asarray(tau, dtype=float)
        + body_load(R, disturbance.force, disturbance.moment)
        + body_load(R, np.asarray(tether_force, dtype=float), lever=tether_attach)
        - _coriolis_force(params.mass_matrix, nu)
        + damping_forces(nu_r, params)
        + restoring_forces(eta, params, R)
    )
    return params.mass_inverse @ load


def step(state: VehicleState, params: VehicleParams, control, disturbance: Disturbance,
         tether_force, dt: float, tether_attach=None, current=None) -> VehicleState:
    """Advance one semi-implicit Euler step (velocity first, then pose).

    ``control`` is a :class:`ControlInput` or a body 6-vector; ``current``
    is the world-frame water velocity used for relative-flow damping.
    """
    if not 0 < dt <= 0.02:
        raise InvalidParams(f"dt must be in (0, 0.02], got {dt}")
    tau = control.tau if isinstance(control, ControlInput) else control
    nu_dot = acceleration(state, params, tau, disturbance, tether_force, tether_attach, current)
    nu = state.nu + dt * nu_dot
    eta = state.eta + dt * kinematic_map(state.eta, nu)
    eta[5] = wrap_angle(eta[5])
    return VehicleState(eta, nu)


def kinetic_energy(state: VehicleState, params: VehicleParams) -> float:
    return 0.5 * float(state.nu @ params.mass_matrix @ state.nu)


def attachment_point(state: VehicleState, offset) -> np.ndarray:
    R = rotation_body_to_world(state.eta)
    return state.eta[:3] + R @ np.asarray(offset, dtype=float)


def attachment_velocity(state: VehicleState, offset) -> np.ndarray:
    R = rotation_body_to_world(state.eta)
    offset = np.asarray(offset, dtype=float)
    return R @ (state.nu[:3] + _cross(state.nu[3:], offset))
