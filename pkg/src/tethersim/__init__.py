"""Tethered surface/underwater vehicle simulator."""

from .catenary import CatenaryProblem, solve as solve_catenary
from .engine import RunResult, Simulation, WorldState, run
from .errors import TetherSimError
from .scenario import Scenario, load_scenario, load_scenario_file
from .sweep import run_sweep

__version__ = "0.1.0"

__all__ = [
    "CatenaryProblem", "RunResult", "Scenario", "Simulation", "TetherSimError", "WorldState",
    "load_scenario", "load_scenario_file", "run", "run_sweep", "solve_catenary",
]
