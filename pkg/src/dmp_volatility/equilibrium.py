"""Steady-state tightness: existence bracket, root finding, uniqueness checks."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import (InfeasibleVacancy, MultipleRootsDetected, NoSignChange,
                     NonPositiveUpperBracket, ZeroBargainingPower)
from .model import Calibration, Equilibrium, MatchingTech, _check_theta, _out, equilibrium_at

THETA_FLOOR = 1e-12
SCAN_POINTS = 512


class Uniqueness(enum.Enum):
    GuaranteedByParameters = "guaranteed_by_parameters"
    NumericalCheckRequired = "numerical_check_required"
    VerifiedNumerically = "verified_numerically"
    MultipleRootsDetected = "multiple_roots_detected"


class Feasibility(NamedTuple):
    margin: float
    feasible: bool


@dataclass(frozen=True)
class SolveReport:
    theta_star: float
    theta_bar: float
    t_at_zero: float
    t_prime_min: float
    t_prime_max: float
    uniqueness: Uniqueness
    iterations: int
    residual: float


def initial_vacancy_feasible(cal: Calibration) -> Feasibility:
    """Value of the first vacancy net of its costs; must be positive for entry."""
    lhs = (1.0 - cal.phi) * (cal.y - cal.z - cal.beta * cal.s * cal.tau) / (cal.r + cal.s)
    margin = lhs - (cal.c + cal.beta * cal.h)
    return Feasibility(margin=margin, feasible=margin > 0.0)


def fundamental_surplus(cal: Calibration) -> float:
    """Resources available to firms for vacancy creation, y - z - beta s tau - beta (r+s) h / (1-phi)."""
    return (cal.y - cal.z - cal.beta * cal.s * cal.tau
            - cal.beta * (cal.r + cal.s) * cal.h / (1.0 - cal.phi))


def theta_bar(cal: Calibration, tech: MatchingTech | None = None) -> float:
    """Upper end of the bracket that contains every equilibrium tightness."""
    if cal.phi == 0.0:
        raise ZeroBargainingPower("theta_bar is unbounded when phi = 0")
    bracket = fundamental_surplus(cal) + cal.beta * cal.ell
    if cal.c <= 0.0:
        raise NonPositiveUpperBracket("theta_bar needs c > 0")
    value = (1.0 - cal.phi) / (cal.c * cal.phi) * bracket
    if not value > 0.0:
        raise NonPositiveUpperBracket(f"theta_bar = {value} <= 0; cost configuration infeasible")
    return value


def big_t(cal: Calibration, tech: MatchingTech, x):
    """Equilibrium residual; its zeros are the steady-state tightness values."""
    x = _check_theta(x)
    q = tech.q(x)
    f = x * q
    phi = cal.phi
    bracket = phi * cal.h - (1.0 - phi) * cal.ell
    cost = (cal.c * (cal.r + cal.s + phi * f) / q + cal.beta * f * bracket) / (1.0 - phi)
    return _out(fundamental_surplus(cal) - cost)


def big_t_prime(cal: Calibration, tech: MatchingTech, x):
    x = _check_theta(x)
    q = tech.q(x)
    dq = tech.q_prime(x)
    df = q + x * dq
    phi = cal.phi
    bracket = phi * cal.h - (1.0 - phi) * cal.ell
    val = (cal.c * (cal.r + cal.s) * dq / ((1.0 - phi) * q ** 2)
           - cal.c * phi / (1.0 - phi)
           - cal.beta * df * bracket / (1.0 - phi))
    return _out(val)


def uniqueness_class(cal: Calibration) -> Uniqueness:
    """Parameter-based uniqueness guarantee.

    The table cells marked unique (phi >= 1 - phi with h >= ell) all satisfy
    phi*h - (1-phi)*ell >= 0, which is itself sufficient: the workers' job
    creation curve then slopes up and the residual is strictly decreasing.
    """
    if cal.phi * cal.h - (1.0 - cal.phi) * cal.ell >= 0.0:
        return Uniqueness.GuaranteedByParameters
    return Uniqueness.NumericalCheckRequired


def _expanding_upper(cal, tech, start=1.0, max_doublings=200):
    x = start
    for _ in range(max_doublings):
        if big_t(cal, tech, x) < 0.0:
            return x
        x *= 2.0
    raise NoSignChange("no upper bracket found by geometric expansion")


def _scan(cal, tech, lo, hi, n=SCAN_POINTS):
    grid = np.geomspace(max(lo, hi * 1e-10), hi, n)
    vals = big_t(cal, tech, grid)
    slopes = big_t_prime(cal, tech, grid)
    crossings = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    return grid, vals, slopes, crossings


def solve_theta(cal: Calibration, tech: MatchingTech, tol: float = 1e-12) -> SolveReport:
    """Solve the steady-state condition for tightness.

    Uses Brent's bracketing method on (THETA_FLOOR, theta_bar]. A 512-point
    log-spaced scan of the residual verifies that only one crossing exists;
    when several are found all of them are reported.
    """
    feas = initial_vacancy_feasible(cal)
    if not feas.feasible:
        raise InfeasibleVacancy(f"initial vacancy value margin {feas.margin:.6g} <= 0")
    if cal.phi == 0.0:
        upper = _expanding_upper(cal, tech)
    else:
        upper = theta_bar(cal, tech)
    t0 = big_t(cal, tech, THETA_FLOOR)
    t_hi = big_t(cal, tech, upper)

    # scan first: with q(0) < 1 the residual can start negative and still
    # cross zero twice, so equal endpoint signs do not rule out equilibria
    grid, vals, slopes, crossings = _scan(cal, tech, THETA_FLOOR, upper)
    if len(crossings) > 1 or (len(crossings) == 1 and not t0 > 0.0):
        edges = [(grid[i], grid[i + 1]) for i in crossings]
        if not t0 > 0.0 and vals[0] > 0.0:
            # the scan starts above THETA_FLOOR; a crossing may hide below it
            edges.insert(0, (THETA_FLOOR, grid[0]))
        roots = [brentq(lambda x: big_t(cal, tech, x), a, b, xtol=tol) for a, b in edges]
        if len(roots) > 1:
            raise MultipleRootsDetected(roots)
    if not (t0 > 0.0 > t_hi):
        raise NoSignChange(f"T({THETA_FLOOR:g})={t0:.6g}, T({upper:.6g})={t_hi:.6g}")

    theta, res = brentq(lambda x: big_t(cal, tech, x), THETA_FLOOR, upper,
                        xtol=tol, rtol=4 * np.finfo(float).eps, full_output=True)
    klass = uniqueness_class(cal)
    if klass is not Uniqueness.GuaranteedByParameters:
        klass = Uniqueness.VerifiedNumerically
    return SolveReport(
        theta_star=theta,
        theta_bar=upper,
        t_at_zero=t0,
        t_prime_min=float(slopes.min()),
        t_prime_max=float(slopes.max()),
        uniqueness=klass,
        iterations=res.iterations,
        residual=abs(big_t(cal, tech, theta)),
    )


def solve_equilibrium(cal: Calibration, tech: MatchingTech, tol: float = 1e-12) -> Equilibrium:
    report = solve_theta(cal, tech, tol)
    return equilibrium_at(cal, tech, report.theta_star)
