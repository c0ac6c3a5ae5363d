"""Lumped-mass tether made of buoyant spheres joined by inextensible links.

Nodes ``0`` and ``N`` are pinned to the vehicle attachment points. Interior
nodes carry one sphere each, the two end nodes half a sphere. Links are
kept at ``L / N`` by Gauss-Seidel distance projection; bending at each
interior node sees ball-joint damping and a one-sided penalty beyond the
angular limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .environment import GRAVITY, RHO_WATER
from .errors import BadInitShape, InvalidParams, Unstable

MAX_NODE_SPEED = 1e3
# link-length tolerance used when settling an initial shape
BUILD_TOLERANCE = 1e-10
BUILD_MAX_SWEEPS = 20000


def default_segments(length: float) -> int:
    """One segment per half metre of cable, at least eight."""
    return max(8, int(round(length / 0.5)))


@dataclass(frozen=True)
class TetherParams:
    length: float
    segments: int | None = None
    radius: float = 0.05
    # None means near-neutral: 1.03 x water density
    density: float | None = None
    water_density: float = RHO_WATER
    angle_limit: float = 1.5
    joint_damping: float = 0.05
    limit_stiffness: float = 50.0
    drag_normal: float = 1.0
    drag_tangential: float = 0.01
    iterations: int = 10

    def __post_init__(self):
        if self.segments is None:
            object.__setattr__(self, "segments", default_segments(self.length))
        if self.density is None:
            object.__setattr__(self, "density", 1.03 * self.water_density)
        checks = [
            (self.length > 0, "length must be > 0"),
            (self.segments >= 2, "segment count must be >= 2"),
            (self.radius > 0, "radius must be > 0"),
            (self.density > 0, "segment density must be > 0"),
            (self.water_density > 0, "water density must be > 0"),
            (self.angle_limit > 0, "joint angle limit must be > 0"),
            (self.joint_damping >= 0, "joint damping must be >= 0"),
            (self.limit_stiffness >= 0, "limit stiffness must be >= 0"),
            (self.drag_normal >= 0 and self.drag_tangential >= 0, "drag coefficients must be >= 0"),
            (self.iterations >= 1, "projection iterations must be >= 1"),
        ]
        for ok, message in checks:
            if not ok:
                raise InvalidParams(f"tether: {message}")

    @property
    def rest_length(self) -> float:
        return self.length / self.segments

    @property
    def sphere_volume(self) -> float:
        return 4.0 / 3.0 * math.pi * self.radius**3

    @property
    def sphere_mass(self) -> float:
        return self.density * self.sphere_volume

    @property
    def sphere_inertia(self) -> float:
        """Solid-sphere inertia; kept for completeness, unused by point nodes."""
        return 0.4 * self.sphere_mass * self.radius**2

    def node_fractions(self) -> np.ndarray:
        frac = np.ones(self.segments + 1)
        frac[0] = frac[-1] = 0.5
        return frac


@dataclass
class TetherState:
    positions: np.ndarray
    velocities: np.ndarray
    masses: np.ndarray
    segment_inertia: float

    def copy(self) -> "TetherState":
        return TetherState(self.positions.copy(), self.velocities.copy(),
                           self.masses.copy(), self.segment_inertia)

    @property
    def link_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.positions, axis=0), axis=1)

    def momentum(self, free_only=True) -> np.ndarray:
        sl = slice(1, -1) if free_only else slice(None)
        return (self.masses[sl, None] * self.velocities[sl]).sum(axis=0)

    def kinetic_energy(self) -> float:
        return 0.5 * float((self.masses * (self.velocities**2).sum(axis=1)).sum())


@dataclass
class EndpointCoupling:
    """Forces the cable exerts on each vehicle (world frame, N)."""

    asv_force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    auv_force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    max_link_deviation: float = 0.0

    @property
    def tension_proxy(self) -> float:
        return max(float(np.linalg.norm(self.asv_force)), float(np.linalg.norm(self.auv_force)))


# kernels ------------------------------------------------------------------


@numba.njit(cache=True)
def _tangent(pos, i):
    n = pos.shape[0] - 1
    lo = i - 1 if i > 0 else 0
    hi = i + 1 if i < n else n
    tx = pos[hi, 0] - pos[lo, 0]
    ty = pos[hi, 1] - pos[lo, 1]
    tz = pos[hi, 2] - pos[lo, 2]
    norm = math.sqrt(tx * tx + ty * ty + tz * tz)
    if norm == 0.0:
        return 0.0, 0.0, 0.0
    return tx / norm, ty / norm, tz / norm


@numba.njit(cache=True)
def _external_forces(pos, vel, flow, frac, mass, volume, rho_w, g,
                     area_n, area_t, cdn, cdt, out):
    n_nodes = pos.shape[0]
    for i in range(n_nodes):
        tx, ty, tz = _tangent(pos, i)
        ux = vel[i, 0] - flow[i, 0]
        uy = vel[i, 1] - flow[i, 1]
        uz = vel[i, 2] - flow[i, 2]
        ut = ux * tx + uy * ty + uz * tz
        utx, uty, utz = ut * tx, ut * ty, ut * tz
        unx, uny, unz = ux - utx, uy - uty, uz - utz
        un_mag = math.sqrt(unx * unx + uny * uny + unz * unz)
        kn = 0.5 * rho_w * cdn * area_n * frac[i] * un_mag
        kt = 0.5 * rho_w * cdt * area_t * frac[i] * abs(ut)
        out[i, 0] = -kn * unx - kt * utx
        out[i, 1] = -kn * uny - kt * uty
        out[i, 2] = -kn * unz - kt * utz + (rho_w * volume * frac[i] - mass[i]) * g


@numba.njit(cache=True)
def _bend(pos, i):
    """Bend angle at node i and its gradient w.r.t. nodes i-1, i, i+1."""
    ax = pos[i, 0] - pos[i - 1, 0]
    ay = pos[i, 1] - pos[i - 1, 1]
    az = pos[i, 2] - pos[i - 1, 2]
    bx = pos[i + 1, 0] - pos[i, 0]
    by = pos[i + 1, 1] - pos[i, 1]
    bz = pos[i + 1, 2] - pos[i, 2]
    la = math.sqrt(ax * ax + ay * ay + az * az)
    lb = math.sqrt(bx * bx + by * by + bz * bz)
    grad = np.zeros((3, 3))
    if la == 0.0 or lb == 0.0:
        return 0.0, grad
    ax, ay, az = ax / la, ay / la, az / la
    bx, by, bz = bx / lb, by / lb, bz / lb
    cos_t = ax * bx + ay * by + az * bz
    # cross product magnitude is better conditioned than acos near 0 and pi
    cx = ay * bz - az * by
    cy = az * bx - ax * bz
    cz = ax * by - ay * bx
    sin_t = math.sqrt(cx * cx + cy * cy + cz * cz)
    theta = math.atan2(sin_t, cos_t)
    if sin_t < 1e-12:
        return theta, grad
    # d theta / d a and d theta / d b
    for k, (ak, bk) in enumerate(((ax, bx), (ay, by), (az, bz))):
        da = -(bk - cos_t * ak) / (la * sin_t)
        db = -(ak - cos_t * bk) / (lb * sin_t)
        grad[0, k] = -da
        grad[1, k] = da - db
        grad[2, k] = db
    return theta, grad


@numba.njit(cache=True)
def _joint_forces(pos, vel, limit, k_lim, damping, out):
    out[:, :] = 0.0
    n = pos.shape[0] - 1
    for i in range(1, n):
        theta, grad = _bend(pos, i)
        rate = 0.0
        for j in range(3):
            for k in range(3):
                rate += grad[j, k] * vel[i - 1 + j, k]
        moment = -damping * rate
        if theta > limit:
            moment -= k_lim * (theta - limit)
        if moment != 0.0:
            for j in range(3):
                for k in range(3):
                    out[i - 1 + j, k] += moment * grad[j, k]


@numba.njit(cache=True)
def _project_link(pos, inv_mass, j, rest):
    dx = pos[j + 1, 0] - pos[j, 0]
    dy = pos[j + 1, 1] - pos[j, 1]
    dz = pos[j + 1, 2] - pos[j, 2]
    length = math.sqrt(dx * dx + dy * dy + dz * dz)
    w = inv_mass[j] + inv_mass[j + 1]
    if length == 0.0 or w == 0.0:
        return 0.0, 0.0, 0.0
    lam = (length - rest) / w
    nx, ny, nz = dx / length, dy / length, dz / length
    pos[j, 0] += inv_mass[j] * lam * nx
    pos[j, 1] += inv_mass[j] * lam * ny
    pos[j, 2] += inv_mass[j] * lam * nz
    pos[j + 1, 0] -= inv_mass[j + 1] * lam * nx
    pos[j + 1, 1] -= inv_mass[j + 1] * lam * ny
    pos[j + 1, 2] -= inv_mass[j + 1] * lam * nz
    return lam * nx, lam * ny, lam * nz


@numba.njit(cache=True)
def _project(pos, inv_mass, rest, iterations, pull_start, pull_end):
    """Gauss-Seidel link projection, alternating sweep direction.

    Accumulates into ``pull_start``/``pull_end`` the position-level
    multipliers (lambda * n) of the two end links, i.e. the pull of the
    cable on each pinned end times dt^2.
    """
    n = pos.shape[0] - 1
    for it in range(iterations):
        for jj in range(n):
            j = jj if it % 2 == 0 else n - 1 - jj
            px, py, pz = _project_link(pos, inv_mass, j, rest)
            if j == 0:
                pull_start[0] += px
                pull_start[1] += py
                pull_start[2] += pz
            if j == n - 1:
                pull_end[0] -= px
                pull_end[1] -= py
                pull_end[2] -= pz


@numba.njit(cache=True)
def _max_deviation(pos, rest):
    worst = 0.0
    for j in range(pos.shape[0] - 1):
        dx = pos[j + 1, 0] - pos[j, 0]
        dy = pos[j + 1, 1] - pos[j, 1]
        dz = pos[j + 1, 2] - pos[j, 2]
        dev = abs(math.sqrt(dx * dx + dy * dy + dz * dz) - rest) / rest
        if dev > worst:
            worst = dev
    return worst


@numba.njit(cache=True)
def _step_kernel(pos, vel, mass, inv_mass, frac, flow, dt, g, rest, volume, rho_w,
                 area_n, area_t, cdn, cdt, limit, k_lim, damping, iterations,
                 pull_start, pull_end, work_ext, work_joint):
    _external_forces(pos, vel, flow, frac, mass, volume, rho_w, g,
                     area_n, area_t, cdn, cdt, work_ext)
    _joint_forces(pos, vel, limit, k_lim, damping, work_joint)
    n = pos.shape[0] - 1
    old = pos.copy()
    for i in range(1, n):
        for k in range(3):
            vel[i, k] += dt * (work_ext[i, k] + work_joint[i, k]) * inv_mass[i]
            pos[i, k] += dt * vel[i, k]
    _project(pos, inv_mass, rest, iterations, pull_start, pull_end)
    top = 0.0
    for i in range(1, n):
        speed2 = 0.0
        for k in range(3):
            vel[i, k] = (pos[i, k] - old[i, k]) / dt
            speed2 += vel[i, k] * vel[i, k]
        if speed2 > top:
            top = speed2
    return math.sqrt(top)


# public API ---------------------------------------------------------------


def _inverse_masses(state: TetherState) -> np.ndarray:
    inv = 1.0 / state.masses
    inv[0] = inv[-1] = 0.0
    return inv


def _flow_array(flow, n_nodes):
    if flow is None:
        return np.zeros((n_nodes, 3))
    flow = np.asarray(flow, dtype=float)
    if flow.shape == (3,):
        return np.broadcast_to(flow, (n_nodes, 3)).copy()
    if flow.shape != (n_nodes, 3):
        raise InvalidParams(f"flow must be a 3-vector or ({n_nodes}, 3) array")
    return np.ascontiguousarray(flow)


def build(params: TetherParams, init_shape) -> TetherState:
    """Create a tether at rest on ``init_shape`` (N + 1 points).

    The shape is then settled so every link is exactly ``L / N`` long,
    keeping both end points fixed.
    """
    pts = np.array(init_shape, dtype=float)
    n = params.segments
    if pts.shape != (n + 1, 3):
        raise BadInitShape(f"expected {n + 1} points of dimension 3, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise BadInitShape("initial shape contains non-finite values")
    rest = params.rest_length
    spacing = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    worst = np.max(np.abs(spacing - rest)) / rest
    if worst > 0.01:
        raise BadInitShape(f"initial spacing deviates {100 * worst:.3f}% from L/N (limit 1%)")
    masses = params.sphere_mass * params.node_fractions()
    state = TetherState(pts, np.zeros_like(pts), masses, params.sphere_inertia)
    settle(state, params)
    return state


def conform_shape(points, params: TetherParams) -> np.ndarray:
    """Project sampled points to exact ``L / N`` spacing, ends fixed.

    Chords of a strongly curved sample are shorter than their arcs; this
    turns such a sample into a valid input for :func:`build`.
    """
    pts = np.array(points, dtype=float)
    inv = np.ones(pts.shape[0])
    inv[0] = inv[-1] = 0.0
    scratch = np.zeros(3)
    for _ in range(BUILD_MAX_SWEEPS // 50):
        if _max_deviation(pts, params.rest_length) <= BUILD_TOLERANCE:
            break
        _project(pts, inv, params.rest_length, 50, scratch, scratch.copy())
    return pts


def match_end_velocities(state: TetherState, start_velocity, end_velocity,
                         tolerance: float = 1e-10, max_sweeps: int = 5000) -> TetherState:
    """Give the cable a velocity field compatible with its moving ends.

    Starts from the linear blend of the end velocities and removes, link by
    link, the part that would stretch or compress it (mass weighted, ends
    fixed). Used to start a run without an impulsive jerk.
    """
    pos = state.positions
    n = pos.shape[0] - 1
    s = np.linspace(0.0, 1.0, n + 1)[:, None]
    vel = (1.0 - s) * np.asarray(start_velocity, float) + s * np.asarray(end_velocity, float)
    inv = _inverse_masses(state)
    d = np.diff(pos, axis=0)
    normals = d / np.linalg.norm(d, axis=1)[:, None]
    w = inv[:-1] + inv[1:]
    for sweep in range(max_sweeps):
        worst = 0.0
        order = range(n) if sweep % 2 == 0 else range(n - 1, -1, -1)
        for j in order:
            rate = float((vel[j + 1] - vel[j]) @ normals[j])
            worst = max(worst, abs(rate))
            if w[j] > 0.0:
                vel[j] += inv[j] * rate / w[j] * normals[j]
                vel[j + 1] -= inv[j + 1] * rate / w[j] * normals[j]
        if worst <= tolerance:
            break
    state.velocities = vel
    return state


def settle(state: TetherState, params: TetherParams, tolerance=BUILD_TOLERANCE):
    """Project link lengths to ``tolerance`` with the end nodes fixed."""
    inv = _inverse_masses(state)
    rest = params.rest_length
    scratch = np.zeros(3)
    for _ in range(BUILD_MAX_SWEEPS // 50):
        if _max_deviation(state.positions, rest) <= tolerance:
            return
        _project(state.positions, inv, rest, 50, scratch, scratch.copy())


def external_forces(state: TetherState, params: TetherParams, flow=None, g: float = GRAVITY) -> np.ndarray:
    """Weight, buoyancy and quadratic drag on every node."""
    n_nodes = state.positions.shape[0]
    out = np.zeros((n_nodes, 3))
    _external_forces(
        state.positions, state.velocities, _flow_array(flow, n_nodes),
        params.node_fractions(), state.masses, params.sphere_volume,
        params.water_density, g, math.pi * params.radius**2,
        2.0 * params.radius * params.rest_length,
        params.drag_normal, params.drag_tangential, out,
    )
    return out


def joint_torques(state: TetherState, params: TetherParams) -> np.ndarray:
    """Joint damping and angular-limit moments as equivalent node forces.

    Each moment M acts on the bend angle theta through its gradient, so
    the node forces are ``M * d theta / d p`` and sum to zero.
    """
    out = np.zeros_like(state.positions)
    _joint_forces(state.positions, state.velocities, params.angle_limit,
                  params.limit_stiffness, params.joint_damping, out)
    return out


def bend_angles(state: TetherState) -> np.ndarray:
    return np.array([_bend(state.positions, i)[0] for i in range(1, state.positions.shape[0] - 1)])


def step(state: TetherState, params: TetherParams, start, end, start_velocity=None,
         end_velocity=None, flow=None, dt: float = 0.005,
         g: float = GRAVITY) -> tuple[TetherState, EndpointCoupling]:
    """Advance the cable one step with both ends pinned.

    ``start``/``end`` are the world attachment points of the surface and
    underwater vehicle. Returns the new state and the forces on each
    vehicle derived from the end-link projection impulses.
    """
    if not 0 < dt <= 0.02:
        raise InvalidParams(f"dt must be in (0, 0.02], got {dt}")
    new = state.copy()
    pos, vel = new.positions, new.velocities
    pos[0] = start
    pos[-1] = end
    vel[0] = 0.0 if start_velocity is None else start_velocity
    vel[-1] = 0.0 if end_velocity is None else end_velocity
    n_nodes = pos.shape[0]
    pull_start = np.zeros(3)
    pull_end = np.zeros(3)
    top_speed = _step_kernel(
        pos, vel, new.masses, _inverse_masses(new), params.node_fractions(),
        _flow_array(flow, n_nodes), dt, g, params.rest_length, params.sphere_volume,
        params.water_density, math.pi * params.radius**2,
        2.0 * params.radius * params.rest_length, params.drag_normal,
        params.drag_tangential, params.angle_limit, params.limit_stiffness,
        params.joint_damping, params.iterations, pull_start, pull_end,
        np.empty((n_nodes, 3)), np.empty((n_nodes, 3)),
    )
    if not top_speed <= MAX_NODE_SPEED:
        raise Unstable(f"tether node speed {top_speed:.3g} m/s exceeds {MAX_NODE_SPEED:g} m/s")
    coupling = EndpointCoupling(
        asv_force=pull_start / dt**2,
        auv_force=pull_end / dt**2,
        max_link_deviation=_max_deviation(pos, params.rest_length),
    )
    return new, coupling
