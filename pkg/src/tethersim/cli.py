"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 runtime failure (instability or
a failed sweep cell), 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import tomli_w

from . import catenary, engine
from .errors import (
    BadInitShape, InvalidParams, NoConvergence, ParseError, SingularAttitude, TautCable,
    TetherSimError, Unstable, UnknownPreset, UnknownSet, ValidationError,
)
from .scenario import ScenarioConfig, _fill_vehicle, _plain, load_scenario_file, with_updates
from .sweep import run_sweep

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 64

_INVALID = (ParseError, ValidationError, InvalidParams, TautCable, BadInitShape,
            UnknownPreset, UnknownSet)
_RUNTIME = (Unstable, SingularAttitude, NoConvergence)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tethersim", description="Tethered ASV/AUV simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run one scenario")
    p.add_argument("scenario", type=Path)
    p.add_argument("--seed", type=int, help="wave-phase seed (default: sim.seed)")
    p.add_argument("--out", type=Path, help="output directory (default: results/<name>-<seed>)")
    p.add_argument("--config-set", choices=("set_1", "set_2", "set_3", "set_4"))

    p = sub.add_parser("sweep", help="sweep tether length or configuration set")
    p.add_argument("scenario", type=Path)
    p.add_argument("--axis", required=True, choices=("tether-length", "config-set"))
    p.add_argument("--values", required=True, help="comma-separated axis values")
    p.add_argument("--seeds", type=int, default=5, help="seeds per cell (default 5)")
    p.add_argument("--workers", type=int, help="parallel runs (capped by TETHERSIM_WORKERS)")
    p.add_argument("--out", type=Path, help="output directory (default: results/<name>-sweep-<axis>)")

    p = sub.add_parser("catenary", help="solve a two-point catenary")
    p.add_argument("--dx", type=float, required=True, help="horizontal span (m)")
    p.add_argument("--dz", type=float, required=True, help="height of end above start (m)")
    p.add_argument("--len", dest="length", type=float, required=True, help="cable length (m)")
    p.add_argument("--samples", type=int, help="also print N+1 equal-arc points as CSV")

    p = sub.add_parser("explain-params", help="print default vehicle parameters")
    p.add_argument("--vehicle", choices=("asv", "auv"))
    return parser


def _cmd_run(args, out):
    scenario = load_scenario_file(args.scenario)
    if args.config_set:
        scenario = with_updates(scenario, **{"controller.config_set": args.config_set})
    seed = scenario.sim.seed if args.seed is None else args.seed
    result = engine.run(scenario, seed)
    directory = args.out or engine.default_output_dir(scenario, seed)
    result.write(directory, scenario, timeseries=scenario.write_timeseries)
    m = result.metrics
    print(f"{scenario.name} seed={seed}: combined_err={m.combined_err:.4f} m "
          f"asv_mean_err={m.asv_mean_err:.4f} m auv_mean_err={m.auv_mean_err:.4f} m "
          f"max_link_dev={m.max_link_dev_pct:.4f}% -> {directory}", file=out)
    return EXIT_OK


def _parse_values(axis: str, text: str):
    items = [v.strip() for v in text.split(",") if v.strip()]
    if not items:
        raise UsageError("--values: at least one value is required")
    if axis == "tether-length":
        try:
            return [float(v) for v in items]
        except ValueError:
            raise UsageError(f"--values: tether lengths must be numbers, got {text!r}") from None
    return items


def _cmd_sweep(args, out):
    if args.seeds < 1:
        raise UsageError("--seeds: must be >= 1")
    values = _parse_values(args.axis, args.values)
    base = load_scenario_file(args.scenario)
    seeds = [base.sim.seed + i for i in range(args.seeds)]
    result = run_sweep(base, args.axis, values, seeds, args.workers)
    directory = args.out or Path("results") / f"{base.name}-sweep-{args.axis}"
    result.write(directory)
    for row in result.summary():
        print(f"{row['axis_value']}: median_combined_err={row['median_combined_err']:.4f} m "
              f"({row['seed_count']}/{len(seeds)} seeds ok)", file=out)
    for cell in result.cells:
        for seed, msg in sorted(cell.failures.items()):
            print(f"cell {cell.axis_value} seed {seed} failed: {msg}", file=sys.stderr)
    print(f"summary -> {Path(directory) / 'sweep_summary.csv'}", file=out)
    return EXIT_RUNTIME if result.failed else EXIT_OK


def _cmd_catenary(args, out):
    if args.samples is not None and args.samples < 1:
        raise UsageError("--samples: must be >= 1")
    try:
        sol = catenary.solve(catenary.CatenaryProblem(args.dx, args.dz, args.length))
    except TautCable as exc:
        raise TautCable(f"--len: {exc}") from None
    except InvalidParams as exc:
        raise InvalidParams(f"--dx/--dz/--len: {exc}") from None
    print(f"a={sol.a:.12g}", file=out)
    print(f"c={sol.c:.12g}", file=out)
    print(f"residual_dz={sol.residual_dz:.3e}", file=out)
    print(f"residual_length={sol.residual_length:.3e}", file=out)
    if args.samples:
        points = catenary.sample_equal_arc(sol, args.samples)
        print("x,z", file=out)
        for x, _, z in points:
            print(f"{x:.9g},{z:.9g}", file=out)
    return EXIT_OK


def _tidy(value):
    """Round away binary noise (2.4699999999999998 -> 2.47) for display."""
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _tidy(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_tidy(v) for v in value]
    return value


def _cmd_explain(args, out):
    cfg = ScenarioConfig()
    which = [args.vehicle] if args.vehicle else ["asv", "auv"]
    pose_keys = ("position", "roll", "pitch", "yaw")
    doc = {w: _tidy(_plain(_fill_vehicle(getattr(cfg, w), w).model_dump(exclude=set(pose_keys))))
           for w in which}
    print("# default vehicle parameters (SI units, body frame); copy a block into a scenario to override",
          file=out)
    print(tomli_w.dumps(doc), end="", file=out)
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "catenary": _cmd_catenary,
    "explain-params": _cmd_explain,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: scenario file not found: {exc.filename}", file=sys.stderr)
        return EXIT_INVALID
    except _INVALID as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except _RUNTIME as exc:
        step = getattr(exc, "step_index", None)
        where = f" at step {step}" if step is not None else ""
        print(f"error: {type(exc).__name__}{where}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except TetherSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
