"""Scenario files: TOML text with sections sim, sea, asv, auv, tether,
plans, controller and outputs.

Loading fills every default and records it, so ``dump_scenario`` writes a
fully explicit file. Unknown keys are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import pydantic
import tomli
import tomli_w
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import control, environment
from .catenary import CatenaryProblem
from .environment import CurrentParams, Hull, SeaState, WaveParams, WindParams
from .errors import ParseError, ValidationError
from .tether import TetherParams, default_segments
from .vehicles import VehicleParams, default_params

Vec3 = tuple[float, float, float]
Vec6 = tuple[float, float, float, float, float, float]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SimSection(_Section):
    name: str = "scenario"
    dt: float = Field(0.005, gt=0, le=0.02)
    duration: float = Field(60.0, gt=0)
    seed: int = 0
    decimation: int = Field(20, ge=1)


class WaveSection(_Section):
    amplitude: Optional[float] = Field(None, ge=0)
    wavelength: Optional[float] = Field(None, gt=0)
    direction: Optional[float] = None
    phase: Union[float, Literal["random"], None] = None
    # 0 is a valid frequency; omit the key to use the dispersion relation
    frequency: Optional[float] = Field(None, ge=0)


class WindSection(_Section):
    speed: Optional[float] = Field(None, ge=0)
    direction: Optional[float] = None
    air_density: Optional[float] = Field(None, gt=0)


class CurrentSection(_Section):
    speed: Optional[float] = Field(None, ge=0)
    attack: Optional[float] = None
    sideslip: Optional[float] = None


class SeaSection(_Section):
    preset: Literal["moderate", "rough", "custom"] = "moderate"
    wave: WaveSection = WaveSection()
    wind: WindSection = WindSection()
    current: CurrentSection = CurrentSection()


Matrix6 = Union[Vec6, tuple[Vec6, Vec6, Vec6, Vec6, Vec6, Vec6]]


class VehicleSection(_Section):
    # None: surface vehicle at the origin, underwater vehicle at (1.5, 0, -1.5)
    position: Optional[Vec3] = None
    yaw: float = 0.0
    pitch: float = 0.0
    roll: float = 0.0
    mass: Optional[Matrix6] = None
    damping_linear: Optional[Matrix6] = None
    damping_quadratic: Optional[Matrix6] = None
    weight: Optional[float] = Field(None, ge=0)
    buoyancy: Optional[float] = Field(None, ge=0)
    cg: Optional[Vec3] = None
    cb: Optional[Vec3] = None
    hull: Optional[Vec3] = None
    wind_cx: Optional[float] = Field(None, ge=0)
    wind_cy: Optional[float] = Field(None, ge=0)
    frontal_area: Optional[float] = Field(None, ge=0)
    lateral_area: Optional[float] = Field(None, ge=0)
    thrust_limits: Optional[Vec6] = None

    @field_validator("hull")
    @classmethod
    def _positive_hull(cls, v):
        if v is not None and min(v) <= 0:
            raise ValueError("hull dimensions (beam, length, draft) must be > 0")
        return v

    @field_validator("thrust_limits")
    @classmethod
    def _positive_limits(cls, v):
        if v is not None and min(v) <= 0:
            raise ValueError("thrust limits must be > 0")
        return v


class TetherSection(_Section):
    length: float = Field(10.0, gt=0)
    segments: Optional[int] = Field(None, ge=2)
    radius: float = Field(0.05, gt=0)
    density: Optional[float] = Field(None, gt=0)
    water_density: float = Field(environment.RHO_WATER, gt=0)
    angle_limit: float = Field(1.5, gt=0)
    joint_damping: float = Field(0.05, ge=0)
    limit_stiffness: float = Field(50.0, ge=0)
    drag_normal: float = Field(1.0, ge=0)
    drag_tangential: float = Field(0.01, ge=0)
    iterations: int = Field(10, ge=1)
    asv_attach: Vec3 = (0.0, 0.0, -0.1)
    auv_attach: Vec3 = (0.0, 0.0, 0.1)


class PlanSection(_Section):
    waypoints: Optional[tuple[Vec3, ...]] = None
    acceptance_radius: float = Field(0.5, gt=0)
    speed_cap: float = Field(1.0, gt=0)

    @field_validator("waypoints")
    @classmethod
    def _non_empty(cls, v):
        if v is not None and len(v) == 0:
            raise ValueError("at least one waypoint is required")
        return v


class PlansSection(_Section):
    asv: PlanSection = PlanSection()
    auv: PlanSection = PlanSection()


class GainsSection(_Section):
    kp: float = Field(ge=0)
    kd: float = Field(ge=0)
    kpsi: float = Field(ge=0)
    kr: float = Field(ge=0)


def _gains_default(g: control.Gains) -> GainsSection:
    return GainsSection(kp=g.kp, kd=g.kd, kpsi=g.kpsi, kr=g.kr)


class ControllerSection(_Section):
    config_set: Literal["set_1", "set_2", "set_3", "set_4", "custom"] = "custom"
    mode: Literal["aware", "nonaware"] = "aware"
    asv: GainsSection = _gains_default(control.DEFAULT_ASV_GAINS)
    auv: GainsSection = _gains_default(control.DEFAULT_AUV_GAINS)


class OutputsSection(_Section):
    directory: Optional[str] = None
    timeseries: bool = True


class ScenarioConfig(_Section):
    sim: SimSection = SimSection()
    sea: SeaSection = SeaSection()
    asv: VehicleSection = VehicleSection()
    auv: VehicleSection = VehicleSection()
    tether: TetherSection = TetherSection()
    plans: PlansSection = PlansSection()
    controller: ControllerSection = ControllerSection()
    outputs: OutputsSection = OutputsSection()

    @model_validator(mode="after")
    def _config_set_consistent(self):
        label = self.controller.config_set
        if label == "custom":
            return self
        mode, preset = control._SETS[label]
        if "mode" in self.controller.model_fields_set and self.controller.mode != mode:
            raise ValueError(f"controller.mode {self.controller.mode!r} contradicts {label} ({mode})")
        if "preset" in self.sea.model_fields_set and self.sea.preset != preset:
            raise ValueError(f"sea.preset {self.sea.preset!r} contradicts {label} ({preset})")
        return self


# runtime objects ----------------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    dt: float
    duration: float
    seed: int
    decimation: int

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def n_rows(self) -> int:
        return self.n_steps // self.decimation + 1


@dataclass(frozen=True)
class VehicleSetup:
    params: VehicleParams
    initial_eta: np.ndarray


@dataclass(frozen=True)
class Scenario:
    name: str
    sim: SimConfig
    sea: SeaState
    random_phase: bool
    asv: VehicleSetup
    auv: VehicleSetup
    tether: TetherParams
    asv_attach: np.ndarray
    auv_attach: np.ndarray
    asv_plan: control.WaypointPlan
    auv_plan: control.WaypointPlan
    controller: control.ControllerConfig
    output_dir: Optional[str]
    write_timeseries: bool
    config: ScenarioConfig


def _matrix(value, default):
    if value is None:
        return default
    arr = np.array(value, dtype=float)
    return np.diag(arr) if arr.ndim == 1 else arr


DEFAULT_POSITIONS = {"asv": (0.0, 0.0, 0.0), "auv": (1.5, 0.0, -1.5)}


def _fill_vehicle(section: VehicleSection, which: str) -> VehicleSection:
    """Return the section with every vehicle parameter made explicit."""
    d = default_params(which)

    def diag_or_full(m):
        return tuple(float(v) for v in np.diag(m)) if np.count_nonzero(m - np.diag(np.diag(m))) == 0 \
            else tuple(tuple(float(v) for v in row) for row in m)

    filled = {
        "position": DEFAULT_POSITIONS[which],
        "mass": diag_or_full(d.mass_matrix),
        "damping_linear": diag_or_full(d.damping_linear),
        "damping_quadratic": diag_or_full(d.damping_quadratic),
        "weight": d.weight,
        "buoyancy": d.buoyancy,
        "cg": tuple(float(v) for v in d.cg),
        "cb": tuple(float(v) for v in d.cb),
        "hull": (d.hull.beam, d.hull.length, d.hull.draft),
        "wind_cx": d.wind_cx,
        "wind_cy": d.wind_cy,
        "frontal_area": d.frontal_area,
        "lateral_area": d.lateral_area,
        "thrust_limits": tuple(float(v) for v in d.thrust_limits),
    }
    update = {k: v for k, v in filled.items() if getattr(section, k) is None}
    return section.model_copy(update=update)


def _fill_sea(sea: SeaSection) -> SeaSection:
    base = SeaState() if sea.preset == "custom" else environment.sea_state_preset(sea.preset)
    wave = sea.wave.model_copy(update={
        k: v for k, v in {
            "amplitude": base.wave.amplitude,
            "wavelength": base.wave.wavelength,
            "direction": base.wave.direction,
            "phase": "random",
        }.items() if getattr(sea.wave, k) is None
    })
    wind = sea.wind.model_copy(update={
        k: v for k, v in {
            "speed": base.wind.speed,
            "direction": base.wind.direction,
            "air_density": base.wind.air_density,
        }.items() if getattr(sea.wind, k) is None
    })
    current = sea.current.model_copy(update={
        k: v for k, v in {
            "speed": base.current.speed,
            "attack": base.current.attack,
            "sideslip": base.current.sideslip,
        }.items() if getattr(sea.current, k) is None
    })
    return sea.model_copy(update={"wave": wave, "wind": wind, "current": current})


def fill_defaults(cfg: ScenarioConfig) -> ScenarioConfig:
    """Make every default explicit so the config dumps to a complete file."""
    controller = cfg.controller
    sea = cfg.sea
    if controller.config_set != "custom":
        mode, preset = control._SETS[controller.config_set]
        controller = controller.model_copy(update={"mode": mode})
        sea = sea.model_copy(update={"preset": preset})
    asv = _fill_vehicle(cfg.asv, "asv")
    auv = _fill_vehicle(cfg.auv, "auv")
    tether = cfg.tether
    if tether.segments is None:
        tether = tether.model_copy(update={"segments": default_segments(tether.length)})
    if tether.density is None:
        tether = tether.model_copy(update={"density": 1.03 * tether.water_density})
    plans = cfg.plans
    if plans.asv.waypoints is None:
        plans = plans.model_copy(update={"asv": plans.asv.model_copy(update={"waypoints": (asv.position,)})})
    if plans.auv.waypoints is None:
        plans = plans.model_copy(update={"auv": plans.auv.model_copy(update={"waypoints": (auv.position,)})})
    return cfg.model_copy(update={
        "sea": _fill_sea(sea),
        "asv": asv,
        "auv": auv,
        "tether": tether,
        "plans": plans,
        "controller": controller,
    })


def _vehicle_params(section: VehicleSection, which: str) -> VehicleParams:
    d = default_params(which)
    return VehicleParams(
        name=which,
        mass_matrix=_matrix(section.mass, d.mass_matrix),
        damping_linear=_matrix(section.damping_linear, d.damping_linear),
        damping_quadratic=_matrix(section.damping_quadratic, d.damping_quadratic),
        weight=section.weight,
        buoyancy=section.buoyancy,
        cg=np.array(section.cg),
        cb=np.array(section.cb),
        hull=Hull(*section.hull),
        wind_cx=section.wind_cx,
        wind_cy=section.wind_cy,
        frontal_area=section.frontal_area,
        lateral_area=section.lateral_area,
        thrust_limits=np.array(section.thrust_limits),
        surface=(which == "asv"),
    )


def _sea_state(sea: SeaSection) -> SeaState:
    label = {"moderate": "Moderate", "rough": "Rough"}.get(sea.preset, "Custom")
    phase = 0.0 if sea.wave.phase == "random" else sea.wave.phase
    return SeaState(
        label=label,
        wave=WaveParams(
            amplitude=sea.wave.amplitude,
            wavelength=sea.wave.wavelength,
            direction=sea.wave.direction,
            phase=phase,
            frequency=sea.wave.frequency,
        ),
        wind=WindParams(speed=sea.wind.speed, direction=sea.wind.direction,
                        air_density=sea.wind.air_density),
        current=CurrentParams(speed=sea.current.speed, attack=sea.current.attack,
                              sideslip=sea.current.sideslip),
    )


def _initial_eta(section: VehicleSection) -> np.ndarray:
    return np.array([*section.position, section.roll, section.pitch, section.yaw], dtype=float)


def build_scenario(cfg: ScenarioConfig) -> Scenario:
    """Validate cross-field constraints and build the runtime scenario."""
    cfg = fill_defaults(cfg)
    try:
        asv = VehicleSetup(_vehicle_params(cfg.asv, "asv"), _initial_eta(cfg.asv))
        auv = VehicleSetup(_vehicle_params(cfg.auv, "auv"), _initial_eta(cfg.auv))
    except Exception as exc:  # InvalidParams from matrix checks
        raise ValidationError("asv/auv", str(exc)) from None
    t = cfg.tether
    tether = TetherParams(
        length=t.length, segments=t.segments, radius=t.radius, density=t.density,
        water_density=t.water_density, angle_limit=t.angle_limit,
        joint_damping=t.joint_damping, limit_stiffness=t.limit_stiffness,
        drag_normal=t.drag_normal, drag_tangential=t.drag_tangential,
        iterations=t.iterations,
    )
    sea = _sea_state(cfg.sea)
    asv_attach = np.array(t.asv_attach)
    auv_attach = np.array(t.auv_attach)
    _check_tether_span(asv, auv, asv_attach, auv_attach, tether.length, sea)
    ctrl = cfg.controller
    controller = control.ControllerConfig(
        asv=control.Gains(**ctrl.asv.model_dump()),
        auv=control.Gains(**ctrl.auv.model_dump()),
        mode=ctrl.mode,
        label=ctrl.config_set,
    )
    plans = {
        name: control.WaypointPlan(p.waypoints, p.acceptance_radius, p.speed_cap)
        for name, p in (("asv", cfg.plans.asv), ("auv", cfg.plans.auv))
    }
    return Scenario(
        name=cfg.sim.name,
        sim=SimConfig(cfg.sim.dt, cfg.sim.duration, cfg.sim.seed, cfg.sim.decimation),
        sea=sea,
        random_phase=(cfg.sea.wave.phase == "random"),
        asv=asv,
        auv=auv,
        tether=tether,
        asv_attach=asv_attach,
        auv_attach=auv_attach,
        asv_plan=plans["asv"],
        auv_plan=plans["auv"],
        controller=controller,
        output_dir=cfg.outputs.directory,
        write_timeseries=cfg.outputs.timeseries,
        config=cfg,
    )


def initial_attachments(asv: VehicleSetup, auv: VehicleSetup, asv_attach, auv_attach, sea: SeaState):
    from .core import rotation_body_to_world

    eta_asv = asv.initial_eta.copy()
    eta_asv[2] = environment.wave_elevation(0.0, sea.wave)
    eta_asv[3] = eta_asv[4] = 0.0
    p0 = eta_asv[:3] + rotation_body_to_world(eta_asv) @ asv_attach
    p1 = auv.initial_eta[:3] + rotation_body_to_world(auv.initial_eta) @ auv_attach
    return p0, p1


def _check_tether_span(asv, auv, asv_attach, auv_attach, length, sea):
    # the random wave phase is unknown here: check mean surface, crest and trough
    for elevation_phase in (math.pi / 2, 0.0, math.pi):
        wave = WaveParams(sea.wave.amplitude, sea.wave.wavelength, phase=elevation_phase,
                          frequency=sea.wave.frequency)
        p0, p1 = initial_attachments(asv, auv, asv_attach, auv_attach, SeaState(wave=wave))
        chord = float(np.linalg.norm(p1 - p0))
        if length < 1.01 * chord:
            raise ValidationError(
                "tether.length",
                f"length {length} must be >= 1.01 x attachment distance {chord:.4f}",
            )
        dx = float(np.hypot(*(p1[:2] - p0[:2])))
        if dx <= 1e-6:
            raise ValidationError("asv/auv.position", "attachment points must be horizontally separated")
        CatenaryProblem(dx, float(p1[2] - p0[2]), length)


# text I/O -------------------------------------------------------------------


def _format_pydantic(err: pydantic.ValidationError) -> ValidationError:
    first = err.errors()[0]
    loc = ".".join(str(p) for p in first["loc"]) or "scenario"
    return ValidationError(loc, first["msg"])


def parse_config(text: str) -> ScenarioConfig:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ParseError(f"scenario parse error: {exc}") from None
    try:
        return ScenarioConfig.model_validate(raw)
    except pydantic.ValidationError as exc:
        raise _format_pydantic(exc) from None


def load_scenario(text: str, name: str | None = None) -> Scenario:
    """Parse and validate scenario text.

    ``name`` replaces the default ``sim.name`` when the file does not set one.
    """
    cfg = parse_config(text)
    if name is not None and "name" not in cfg.sim.model_fields_set:
        cfg = cfg.model_copy(update={"sim": cfg.sim.model_copy(update={"name": name})})
    return build_scenario(cfg)


def load_scenario_file(path) -> Scenario:
    path = Path(path)
    return load_scenario(path.read_text(encoding="utf-8"), name=path.stem)


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items() if v is not None}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def dump_config(cfg: ScenarioConfig) -> str:
    return tomli_w.dumps(_plain(cfg.model_dump()))


def dump_scenario(scenario: Scenario) -> str:
    return dump_config(scenario.config)


def with_updates(scenario: Scenario, **sections) -> Scenario:
    """Rebuild ``scenario`` with some config fields replaced.

    Keys are dotted paths, e.g. ``with_updates(s, **{"tether.length": 15})``.
    Dependent defaults (segment count) are recomputed when their source
    changes and they were not set explicitly.
    """
    data = scenario.config.model_dump()
    for dotted, value in sections.items():
        target = data
        *parents, leaf = dotted.split(".")
        for p in parents:
            target = target[p]
        target[leaf] = value
    if "tether.length" in sections and "tether.segments" not in sections:
        data["tether"]["segments"] = None
    if "controller.config_set" in sections:
        # the set decides mode and sea state; keep only the wave-phase choice
        data["controller"].pop("mode", None)
        data["sea"] = {"wave": {"phase": data["sea"]["wave"]["phase"]}}
    try:
        cfg = ScenarioConfig.model_validate(_plain(data))
    except pydantic.ValidationError as exc:
        raise _format_pydantic(exc) from None
    return build_scenario(cfg)
