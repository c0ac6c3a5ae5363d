"""Wave, wind and current disturbances plus the named sea-state presets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams, UnknownPreset

RHO_WATER = 1025.0
RHO_AIR = 1.225
GRAVITY = 9.81


def deep_water_frequency(wavelength: float, g: float = GRAVITY) -> float:
    """Angular frequency from the deep-water dispersion relation."""
    return math.sqrt(g * 2.0 * math.pi / wavelength)


@dataclass(frozen=True)
class Hull:
    beam: float
    length: float
    draft: float

    def check(self):
        if not (self.beam > 0 and self.length > 0 and self.draft > 0):
            raise InvalidParams(f"hull dimensions must be positive, got {self}")


@dataclass(frozen=True)
class WaveParams:
    amplitude: float = 0.0
    wavelength: float = 20.0
    direction: float = 0.0
    phase: float = 0.0
    # None selects the deep-water dispersion value
    frequency: float | None = None

    def __post_init__(self):
        if self.amplitude < 0:
            raise InvalidParams("wave amplitude must be >= 0")
        if not self.wavelength > 0:
            raise InvalidParams("wavelength must be > 0")
        if self.frequency is not None and self.frequency < 0:
            raise InvalidParams("wave frequency must be >= 0")

    @property
    def omega(self) -> float:
        if self.frequency is None:
            return deep_water_frequency(self.wavelength)
        return self.frequency

    @property
    def height(self) -> float:
        return 2.0 * self.amplitude

    @property
    def wave_number_term(self) -> float:
        """The wave characteristic constant k = (2 pi / wavelength) * amplitude."""
        return 2.0 * math.pi / self.wavelength * self.amplitude


@dataclass(frozen=True)
class WindParams:
    speed: float = 0.0
    direction: float = 0.0
    air_density: float = RHO_AIR
    cx: float = 0.0
    cy: float = 0.0
    frontal_area: float = 0.0
    lateral_area: float = 0.0

    def __post_init__(self):
        if not self.air_density > 0:
            raise InvalidParams("air density must be > 0")
        if self.speed < 0:
            raise InvalidParams("wind speed must be >= 0")
        if min(self.cx, self.cy, self.frontal_area, self.lateral_area) < 0:
            raise InvalidParams("wind coefficients and areas must be >= 0")


@dataclass(frozen=True)
class CurrentParams:
    speed: float = 0.0
    attack: float = 0.0
    sideslip: float = 0.0

    def __post_init__(self):
        if self.speed < 0:
            raise InvalidParams("current speed must be >= 0")


@dataclass(frozen=True)
class SeaState:
    label: str = "Custom"
    wave: WaveParams = field(default_factory=WaveParams)
    wind: WindParams = field(default_factory=WindParams)
    current: CurrentParams = field(default_factory=CurrentParams)


def wave_force_magnitude(rho_water: float, g: float, hull: Hull, wave: WaveParams) -> float:
    hull.check()
    if not (rho_water > 0 and g > 0):
        raise InvalidParams("water density and gravity must be positive")
    return rho_water * g * hull.beam * hull.length * hull.draft * wave.wave_number_term


def wave_force(t: float, rho_water: float, g: float, hull: Hull, wave: WaveParams) -> np.ndarray:
    """Horizontal world-frame wave force, sinusoidal in time."""
    amp = wave_force_magnitude(rho_water, g, hull, wave) * math.sin(wave.omega * t + wave.phase)
    return np.array([amp * math.cos(wave.direction), amp * math.sin(wave.direction), 0.0])


def wave_elevation(t: float, wave: WaveParams) -> float:
    return wave.amplitude * math.cos(wave.omega * t + wave.phase)


def wave_elevation_rate(t: float, wave: WaveParams) -> float:
    return -wave.amplitude * wave.omega * math.sin(wave.omega * t + wave.phase)


def depth_attenuation(z: float, wave: WaveParams) -> float:
    """Linear-theory decay factor exp(-2 pi depth / wavelength); 1 at or above the surface."""
    depth = max(0.0, -z)
    return math.exp(-2.0 * math.pi * depth / wave.wavelength)


def wind_force(wind: WindParams, vehicle_yaw: float) -> np.ndarray:
    """World-frame wind force on a surface hull.

    The longitudinal term uses (C_x, A_w) and the lateral term (C_y, A_lw),
    both resolved against the wind angle relative to the bow.
    """
    q = 0.5 * wind.air_density * wind.speed**2
    gamma = wind.direction - vehicle_yaw
    fx = q * wind.cx * wind.frontal_area * math.cos(gamma)
    fy = q * wind.cy * wind.lateral_area * math.sin(gamma)
    c, s = math.cos(vehicle_yaw), math.sin(vehicle_yaw)
    return np.array([c * fx - s * fy, s * fx + c * fy, 0.0])


def current_velocity(current: CurrentParams) -> np.ndarray:
    ca, sa = math.cos(current.attack), math.sin(current.attack)
    cb, sb = math.cos(current.sideslip), math.sin(current.sideslip)
    vc = current.speed
    return np.array([vc * ca * cb, vc * sb, vc * sa * cb])


# amplitude = height / 2; wavelengths are modelling choices, not reported values
_PRESETS = {
    "moderate": SeaState(
        label="Moderate",
        wave=WaveParams(amplitude=1.5, wavelength=20.0),
        wind=WindParams(speed=3.0),
        current=CurrentParams(speed=0.5),
    ),
    "rough": SeaState(
        label="Rough",
        wave=WaveParams(amplitude=2.25, wavelength=30.0),
        wind=WindParams(speed=4.5),
        current=CurrentParams(speed=1.0),
    ),
}

PRESET_NAMES = tuple(_PRESETS)


def sea_state_preset(label: str) -> SeaState:
    try:
        return _PRESETS[label.lower()]
    except KeyError:
        raise UnknownPreset(f"unknown sea-state preset {label!r}; expected one of {PRESET_NAMES}") from None


def vehicle_disturbance(sea: SeaState, t: float, eta, params, rho_water: float = RHO_WATER,
                        g: float = GRAVITY) -> np.ndarray:
    """World-frame wave + wind force on one vehicle at time ``t``.

    Surface hulls get the full wave force and the wind; submerged hulls get
    the wave force decayed with depth and no wind. ``params`` needs
    ``hull`` and ``surface`` (plus wind coefficients for surface hulls).
    """
    force = wave_force(t, rho_water, g, params.hull, sea.wave)
    if params.surface:
        wind = WindParams(
            speed=sea.wind.speed,
            direction=sea.wind.direction,
            air_density=sea.wind.air_density,
            cx=params.wind_cx,
            cy=params.wind_cy,
            frontal_area=params.frontal_area,
            lateral_area=params.lateral_area,
        )
        force = force + wind_force(wind, float(eta[5]))
    else:
        force = force * depth_attenuation(float(eta[2]), sea.wave)
    return force
