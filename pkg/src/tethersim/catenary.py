"""Static catenary between the surface and underwater attachment points.

The surface end sits at the local origin ``x = 0``; the curve is

    z(x) = a cosh((x - c) / a) - a cosh(c / a)

and ``(a, c)`` are found from the vertical-offset and total-length
conditions at ``x = D``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, NoConvergence, OutOfDomain, TautCable

NEWTON_BUDGET = 100
BISECTION_BUDGET = 200
TAUT_MARGIN = 1e-9
# cosh/sinh arguments beyond this overflow or lose all precision
MAX_ARG = 700.0
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class CatenaryProblem:
    dx: float
    dz: float
    length: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.dx, self.dz, self.length)):
            raise InvalidParams("catenary inputs must be finite")
        if not self.dx > 0:
            raise InvalidParams(f"horizontal distance must be > 0, got {self.dx}")
        if not self.length > 0:
            raise InvalidParams(f"cable length must be > 0, got {self.length}")

    @property
    def chord(self) -> float:
        return math.hypot(self.dx, self.dz)


@dataclass(frozen=True)
class CatenarySolution:
    a: float
    c: float
    residual_dz: float
    residual_length: float
    problem: CatenaryProblem

    @property
    def dx(self) -> float:
        return self.problem.dx

    @property
    def dz(self) -> float:
        return self.problem.dz

    @property
    def length(self) -> float:
        return self.problem.length


def residuals(a: float, c: float, problem: CatenaryProblem) -> tuple[float, float]:
    """Vertical-offset and length residuals of a candidate ``(a, c)``."""
    u1 = (problem.dx - c) / a
    u0 = c / a
    r_dz = a * (math.cosh(u1) - math.cosh(u0)) - problem.dz
    r_len = a * (math.sinh(u1) + math.sinh(u0)) - problem.length
    return r_dz, r_len


def _jacobian(a, c, D):
    u1 = (D - c) / a
    u0 = c / a
    ch1, sh1 = math.cosh(u1), math.sinh(u1)
    ch0, sh0 = math.cosh(u0), math.sinh(u0)
    return (
        (ch1 - u1 * sh1) - (ch0 - u0 * sh0),
        -sh1 - sh0,
        (sh1 - u1 * ch1) + (sh0 - u0 * ch0),
        ch0 - ch1,
    )


def _in_range(a, c, D):
    return a > 0 and abs(c / a) <= MAX_ARG and abs((D - c) / a) <= MAX_ARG


def _bisect_decreasing(f, lo, hi, iterations=BISECTION_BUDGET):
    """Root of a decreasing function bracketed by f(lo) > 0 > f(hi)."""
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bracket_a(f, D):
    lo = D / (2.0 * MAX_ARG)
    hi = max(D, 1.0)
    for _ in range(BISECTION_BUDGET):
        if f(hi) < 0:
            return lo, hi
        lo, hi = hi, 2.0 * hi
    raise NoConvergence("could not bracket the catenary parameter")


def symmetric_guess(dx: float, length: float) -> float:
    """Parameter ``a`` of a level cable: root of 2 a sinh(D / 2a) = L."""

    def f(a):
        return 2.0 * a * math.sinh(dx / (2.0 * a)) - length

    lo, hi = _bracket_a(f, dx)
    return _bisect_decreasing(f, lo, hi)


def _scaled_norm(r_dz, r_len, problem):
    return max(abs(r_dz) / max(1.0, abs(problem.dz)), abs(r_len) / problem.length)


def _newton(problem, a, c):
    D = problem.dx
    r = residuals(a, c, problem)
    err = _scaled_norm(*r, problem)
    for _ in range(NEWTON_BUDGET):
        if err < 1e-14:
            break
        j11, j12, j21, j22 = _jacobian(a, c, D)
        det = j11 * j22 - j12 * j21
        if det == 0 or not math.isfinite(det):
            break
        da = (j22 * r[0] - j12 * r[1]) / det
        dc = (-j21 * r[0] + j11 * r[1]) / det
        step = 1.0
        for _ in range(60):
            a_new, c_new = a - step * da, c - step * dc
            if _in_range(a_new, c_new, D):
                r_new = residuals(a_new, c_new, problem)
                err_new = _scaled_norm(*r_new, problem)
                if err_new < err:
                    break
            step *= 0.5
        else:
            break
        a, c, r, err = a_new, c_new, r_new, err_new
    return a, c, err


def _nested_bisection(problem):
    D, dz, L = problem.dx, problem.dz, problem.length

    def offset(a):
        # vertex offset that zeroes the vertical residual for this a
        return D / 2.0 - a * math.asinh(dz / (2.0 * a * math.sinh(D / (2.0 * a))))

    def f(a):
        c = offset(a)
        if not _in_range(a, c, D):
            return math.inf
        return residuals(a, c, problem)[1]

    lo, hi = _bracket_a(f, D)
    a = _bisect_decreasing(f, lo, hi)
    return a, offset(a)


def solve(problem: CatenaryProblem) -> CatenarySolution:
    """Find ``(a, c)`` for the given endpoint offsets and cable length.

    Damped Newton from the level-cable guess; falls back to bisection on
    ``a`` (vertex offset in closed form) when Newton stalls.
    """
    if problem.length <= problem.chord * (1.0 + TAUT_MARGIN):
        raise TautCable(
            f"cable length {problem.length} does not exceed chord {problem.chord}"
        )
    D = problem.dx
    a0 = symmetric_guess(D, problem.length)
    a, c, err = _newton(problem, a0, D / 2.0)
    if not err < RESIDUAL_TOL * 1e-2:
        a, c = _nested_bisection(problem)
        a, c, err = _newton(problem, a, c)
    r_dz, r_len = residuals(a, c, problem)
    if not (abs(r_dz) < RESIDUAL_TOL * max(1.0, abs(problem.dz))
            and abs(r_len) < RESIDUAL_TOL * problem.length):
        raise NoConvergence(f"catenary residuals ({r_dz:.3e}, {r_len:.3e}) above tolerance")
    return CatenarySolution(a, c, r_dz, r_len, problem)


def _check_x(solution, x):
    if not 0.0 <= x <= solution.dx:
        raise OutOfDomain(f"x={x} outside [0, {solution.dx}]")


def shape(solution: CatenarySolution, x: float) -> float:
    _check_x(solution, x)
    a, c = solution.a, solution.c
    return a * math.cosh((x - c) / a) - a * math.cosh(c / a)


def arc_length(solution: CatenarySolution, x0: float, x1: float) -> float:
    _check_x(solution, x0)
    _check_x(solution, x1)
    if x1 < x0:
        raise OutOfDomain(f"arc bounds out of order: {x0} > {x1}")
    a, c = solution.a, solution.c
    return a * (math.sinh((x1 - c) / a) - math.sinh((x0 - c) / a))


def sample_equal_arc(solution: CatenarySolution, n: int, start=None, end=None) -> np.ndarray:
    """``n + 1`` points spaced ``L / n`` apart along the curve.

    Without ``start``/``end`` the points lie in the local x-z plane
    (y = 0). Otherwise they are placed between the two world points,
    whose horizontal separation and height difference must match the
    solved problem.
    """
    if n < 1:
        raise InvalidParams("sample count must be >= 1")
    a, c = solution.a, solution.c
    L, D = solution.length, solution.dx
    s = np.arange(n + 1) * (L / n)
    x = c + a * np.arcsinh(s / a - math.sinh(c / a))
    x[0], x[-1] = 0.0, D
    np.clip(x, 0.0, D, out=x)
    z = a * np.cosh((x - c) / a) - a * math.cosh(c / a)
    z[0], z[-1] = 0.0, solution.dz

    if start is None:
        pts = np.column_stack((x, np.zeros_like(x), z))
        return pts
    p0 = np.asarray(start, dtype=float)
    p1 = np.asarray(end, dtype=float)
    horiz = p1[:2] - p0[:2]
    heading = horiz / np.linalg.norm(horiz)
    pts = np.empty((n + 1, 3))
    pts[:, 0] = p0[0] + x * heading[0]
    pts[:, 1] = p0[1] + x * heading[1]
    pts[:, 2] = p0[2] + z
    pts[0] = p0
    pts[-1] = p1
    return pts


def solve_between(start, end, length: float) -> CatenarySolution:
    """Solve for the catenary hanging between two world points."""
    p0 = np.asarray(start, dtype=float)
    p1 = np.asarray(end, dtype=float)
    dx = float(np.hypot(*(p1[:2] - p0[:2])))
    return solve(CatenaryProblem(dx, float(p1[2] - p0[2]), length))
