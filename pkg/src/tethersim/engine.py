"""Fixed-step loop coupling environment, controllers, tether and vehicles.

Every step runs in the same order:

1. environmental loads at time t,
2. waypoint bookkeeping and control commands,
3. tether step against the current attachment points,
4. vehicle steps consuming control, disturbance and tether reaction,
5. t advances by dt.

The tether therefore sees vehicle poses from the start of the step and the
vehicles see tether forces computed in the same step.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import catenary, control, environment, tether, vehicles
from .errors import SingularAttitude, Unstable
from .metrics import RunMetrics, summarize
from .scenario import Scenario, dump_scenario, initial_attachments
from .tether import EndpointCoupling, TetherState
from .vehicles import Disturbance, VehicleState

COLUMNS = (
    "t", "asv_x", "asv_y", "asv_z", "asv_yaw", "auv_x", "auv_y", "auv_z", "auv_yaw",
    "asv_err", "auv_err", "tether_tension_proxy", "wave_force_x", "wave_force_y",
)


@dataclass
class WorldState:
    step: int
    asv: VehicleState
    auv: VehicleState
    tether: TetherState
    asv_waypoint: int = 0
    auv_waypoint: int = 0
    coupling: EndpointCoupling = field(default_factory=EndpointCoupling)

    def time(self, dt: float) -> float:
        return self.step * dt

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "asv": {"eta": self.asv.eta.tolist(), "nu": self.asv.nu.tolist()},
            "auv": {"eta": self.auv.eta.tolist(), "nu": self.auv.nu.tolist()},
            "tether": {
                "positions": self.tether.positions.tolist(),
                "velocities": self.tether.velocities.tolist(),
                "masses": self.tether.masses.tolist(),
                "segment_inertia": self.tether.segment_inertia,
            },
            "asv_waypoint": self.asv_waypoint,
            "auv_waypoint": self.auv_waypoint,
            "coupling": {
                "asv_force": self.coupling.asv_force.tolist(),
                "auv_force": self.coupling.auv_force.tolist(),
                "max_link_deviation": self.coupling.max_link_deviation,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WorldState":
        t = d["tether"]
        c = d["coupling"]
        return cls(
            step=d["step"],
            asv=VehicleState(d["asv"]["eta"], d["asv"]["nu"]),
            auv=VehicleState(d["auv"]["eta"], d["auv"]["nu"]),
            tether=TetherState(
                np.array(t["positions"]), np.array(t["velocities"]),
                np.array(t["masses"]), t["segment_inertia"],
            ),
            asv_waypoint=d["asv_waypoint"],
            auv_waypoint=d["auv_waypoint"],
            coupling=EndpointCoupling(
                np.array(c["asv_force"]), np.array(c["auv_force"]), c["max_link_deviation"]
            ),
        )


def resolve_sea(scenario: Scenario, seed: int | None = None):
    """Sea state with the wave phase drawn from the seed when configured random.

    One generator, one draw: the phase is the first uniform sample on
    [0, 2 pi) from ``numpy.random.default_rng(seed)``.
    """
    if not scenario.random_phase:
        return scenario.sea
    seed = scenario.sim.seed if seed is None else seed
    phase = float(np.random.default_rng(seed).uniform(0.0, 2.0 * math.pi))
    return replace(scenario.sea, wave=replace(scenario.sea.wave, phase=phase))


@dataclass
class RunResult:
    name: str
    seed: int
    rows: np.ndarray
    metrics: RunMetrics

    def write(self, directory, scenario: Scenario | None = None, timeseries: bool = True) -> Path:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        if timeseries:
            write_timeseries(out / "timeseries.csv", self.rows)
        payload = {"name": self.name, "seed": self.seed, **self.metrics.as_dict()}
        (out / "metrics.json").write_text(json.dumps(payload, indent=2) + "\n")
        if scenario is not None:
            (out / "scenario.toml").write_text(dump_scenario(scenario))
        return out


def write_timeseries(path, rows: np.ndarray):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")


class Simulation:
    """One deterministic run of a scenario for a given seed."""

    def __init__(self, scenario: Scenario, seed: int | None = None):
        self.scenario = scenario
        self.seed = scenario.sim.seed if seed is None else seed
        self.sea = resolve_sea(scenario, self.seed)
        self.dt = scenario.sim.dt
        self.current = environment.current_velocity(self.sea.current)
        self.asv_params = scenario.asv.params
        self.auv_params = scenario.auv.params

    # state construction ---------------------------------------------------

    def _surface(self, state: VehicleState, t: float) -> VehicleState:
        eta = state.eta.copy()
        nu = state.nu.copy()
        eta[2] = environment.wave_elevation(t, self.sea.wave)
        eta[3] = eta[4] = 0.0
        nu[2] = nu[3] = nu[4] = 0.0
        return VehicleState(eta, nu)

    def initial_world(self) -> WorldState:
        sc = self.scenario
        asv = self._surface(VehicleState.at_rest(sc.asv.initial_eta), 0.0)
        auv = VehicleState.at_rest(sc.auv.initial_eta)
        p0, p1 = initial_attachments(sc.asv, sc.auv, sc.asv_attach, sc.auv_attach, self.sea)
        # Each step projects the cable against the endpoints at the start of the
        # step, so in steady motion the nodes trail the ends by one step. Build the
        # initial cable the same way: against the ends one step back, moving with them.
        _, v0, _, v1 = self._endpoints(WorldState(0, asv, auv, None), 0.0)
        q0, q1 = p0 - v0 * self.dt, p1 - v1 * self.dt
        solution = catenary.solve_between(q0, q1, sc.tether.length)
        shape = catenary.sample_equal_arc(solution, sc.tether.segments, q0, q1)
        cable = tether.build(sc.tether, tether.conform_shape(shape, sc.tether))
        tether.match_end_velocities(cable, v0, v1)
        return WorldState(0, asv, auv, cable)

    # stepping ---------------------------------------------------------------

    def _endpoints(self, world: WorldState, t: float):
        sc = self.scenario
        p0 = vehicles.attachment_point(world.asv, sc.asv_attach)
        v0 = vehicles.attachment_velocity(world.asv, sc.asv_attach)
        v0[2] += environment.wave_elevation_rate(t, self.sea.wave)
        p1 = vehicles.attachment_point(world.auv, sc.auv_attach)
        v1 = vehicles.attachment_velocity(world.auv, sc.auv_attach)
        return p0, v0, p1, v1

    def step_world(self, world: WorldState) -> WorldState:
        sc = self.scenario
        dt = self.dt
        t = world.step * dt
        try:
            # 1. environment
            d_asv = Disturbance(environment.vehicle_disturbance(self.sea, t, world.asv.eta, self.asv_params))
            d_auv = Disturbance(environment.vehicle_disturbance(self.sea, t, world.auv.eta, self.auv_params))
            # 2. control
            asv_wp = control.advance_waypoint(world.asv.position, sc.asv_plan, world.asv_waypoint,
                                            horizontal=True)
            auv_wp = control.advance_waypoint(world.auv.position, sc.auv_plan, world.auv_waypoint)
            u_asv = control.compute_control(world.asv, self.asv_params, sc.asv_plan,
                                            sc.controller, d_asv, asv_wp)
            u_auv = control.compute_control(world.auv, self.auv_params, sc.auv_plan,
                                            sc.controller, d_auv, auv_wp)
            # 3. tether
            p0, v0, p1, v1 = self._endpoints(world, t)
            cable, coupling = tether.step(world.tether, sc.tether, p0, p1, v0, v1,
                                          self.current, dt)
            # 4. vehicles
            asv = vehicles.step(world.asv, self.asv_params, u_asv, d_asv, coupling.asv_force,
                                dt, sc.asv_attach, self.current)
            asv = self._surface(asv, t + dt)
            auv = vehicles.step(world.auv, self.auv_params, u_auv, d_auv, coupling.auv_force,
                                dt, sc.auv_attach, self.current)
        except (Unstable, SingularAttitude) as exc:
            exc.step_index = world.step
            raise
        # 5. time
        return WorldState(world.step + 1, asv, auv, cable, asv_wp, auv_wp, coupling)

    # recording --------------------------------------------------------------

    def _row(self, world: WorldState) -> list:
        sc = self.scenario
        t = world.step * self.dt
        asv, auv = world.asv, world.auv
        asv_ref = sc.asv_plan.target(world.asv_waypoint)
        auv_ref = sc.auv_plan.target(world.auv_waypoint)
        wave = environment.wave_force(t, environment.RHO_WATER, environment.GRAVITY,
                                      self.asv_params.hull, self.sea.wave)
        return [
            t, *asv.eta[:3], asv.eta[5], *auv.eta[:3], auv.eta[5],
            float(np.linalg.norm(asv.eta[:3] - asv_ref)),
            float(np.linalg.norm(auv.eta[:3] - auv_ref)),
            world.coupling.tension_proxy, wave[0], wave[1],
        ]

    def run(self, world: WorldState | None = None, stop_step: int | None = None):
        """Run to the end (or ``stop_step``); returns (RunResult, final world)."""
        sc = self.scenario
        n_steps = sc.sim.n_steps if stop_step is None else stop_step
        dec = sc.sim.decimation
        world = self.initial_world() if world is None else world
        rows, asv_ref, auv_ref, link_dev = [], [], [], []
        peak = 0.0
        while True:
            if world.step % dec == 0:
                rows.append(self._row(world))
                asv_ref.append(sc.asv_plan.target(world.asv_waypoint))
                auv_ref.append(sc.auv_plan.target(world.auv_waypoint))
                link_dev.append(world.coupling.max_link_deviation if world.step else
                                float(np.max(np.abs(world.tether.link_lengths / sc.tether.rest_length - 1))))
            if world.step >= n_steps:
                break
            world = self.step_world(world)
            peak = max(peak, world.coupling.tension_proxy)
        data = np.array(rows)
        metrics = summarize(data[:, 1:4], np.array(asv_ref), data[:, 5:8], np.array(auv_ref),
                            link_dev, peak)
        return RunResult(sc.name, self.seed, data, metrics), world


def run(scenario: Scenario, seed: int | None = None) -> RunResult:
    result, _ = Simulation(scenario, seed).run()
    return result


def default_output_dir(scenario: Scenario, seed: int) -> Path:
    if scenario.output_dir:
        return Path(scenario.output_dir)
    return Path("results") / f"{scenario.name}-{seed}"


__all__ = ["COLUMNS", "RunResult", "Simulation", "WorldState", "run"]
