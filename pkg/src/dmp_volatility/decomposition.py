"""Two-factor decomposition of the elasticity of tightness and productivity sweeps."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .equilibrium import fundamental_surplus, solve_theta
from .errors import ModelError, NonPositiveSurplus, OutOfRangeElasticity, ZeroVacancyCost
from .model import (Calibration, MatchingTech, _check_theta, eta_mu, f_find,
                    wage_firm_side)


@dataclass(frozen=True)
class Decomposition:
    upsilon: float
    upsilon_bound: float
    surplus_fraction: float
    eta_theta_y: float
    eta_u_y: float
    eta_w_y: float
    eta_mu_at_theta: float


def upsilon(cal: Calibration, tech: MatchingTech, theta) -> float:
    """First factor of the decomposition (the only channel for worker-paid costs)."""
    if cal.c <= 0.0:
        raise ZeroVacancyCost("upsilon is undefined when the vacancy cost is zero")
    theta = _check_theta(theta)
    q = tech.q(theta)
    f = theta * q
    eta = tech.eta(theta)
    rs = cal.r + cal.s
    cost_ratio = (cal.phi * cal.h - (1.0 - cal.phi) * cal.ell) / cal.c
    num = rs + f * (cal.phi + cal.beta * q * cost_ratio)
    den = rs * eta + f * (cal.phi + cal.beta * (1.0 - eta) * q * cost_ratio)
    return float(num / den) if np.ndim(theta) == 0 else num / den


def upsilon_bound(eta):
    """Upper bound max(1/eta, 1/(1-eta)) on the first factor."""
    eta_arr = np.asarray(eta, dtype=float)
    if np.any(~((eta_arr > 0.0) & (eta_arr < 1.0))):
        raise OutOfRangeElasticity(f"matching elasticity must lie in (0, 1), got {eta}")
    bound = np.maximum(1.0 / eta_arr, 1.0 / (1.0 - eta_arr))
    return float(bound) if bound.ndim == 0 else bound


def surplus_fraction(cal: Calibration) -> float:
    return fundamental_surplus(cal) / cal.y


def eta_theta_y(cal: Calibration, tech: MatchingTech, theta) -> float:
    fs = fundamental_surplus(cal)
    if fs <= 0.0:
        raise NonPositiveSurplus(f"fundamental surplus {fs:.6g} <= 0")
    return upsilon(cal, tech, theta) * cal.y / fs


def eta_u_y(cal: Calibration, tech: MatchingTech, theta) -> float:
    f = f_find(tech, theta, check=False)
    u = cal.s / (cal.s + f)
    return -(1.0 - u) * (1.0 - eta_mu(tech, theta)) * eta_theta_y(cal, tech, theta)


def _equilibrium_wage(cal, tech, y):
    theta = solve_theta(cal.replace(y=y), tech).theta_star
    return wage_firm_side(cal.replace(y=y), tech, theta)


def eta_w_y(cal: Calibration, tech: MatchingTech, rel_step: float = 1e-6) -> float:
    """Elasticity of the equilibrium wage with respect to productivity.

    Central difference over full re-solves at y(1 +/- rel_step). If the two
    one-sided slopes disagree by more than 1e-3 (relative) the estimate is
    Richardson-extrapolated from steps rel_step and rel_step/2.
    """
    y = cal.y
    w0 = _equilibrium_wage(cal, tech, y)

    def central(d):
        up = _equilibrium_wage(cal, tech, y * (1 + d))
        down = _equilibrium_wage(cal, tech, y * (1 - d))
        return up, down, (up - down) / (2 * d * y)

    up, down, slope = central(rel_step)
    fwd = (up - w0) / (rel_step * y)
    bwd = (w0 - down) / (rel_step * y)
    if abs(fwd - bwd) > 1e-3 * max(abs(slope), 1e-300):
        _, _, half = central(rel_step / 2)
        slope = (4.0 * half - slope) / 3.0
    return slope * y / w0


def decompose(cal: Calibration, tech: MatchingTech, theta: float | None = None,
              rel_step: float = 1e-6) -> Decomposition:
    """All decomposition objects at ``theta`` (solved when omitted)."""
    if theta is None:
        theta = solve_theta(cal, tech).theta_star
    eta = eta_mu(tech, theta)
    return Decomposition(
        upsilon=upsilon(cal, tech, theta),
        upsilon_bound=upsilon_bound(eta),
        surplus_fraction=surplus_fraction(cal),
        eta_theta_y=eta_theta_y(cal, tech, theta),
        eta_u_y=eta_u_y(cal, tech, theta),
        eta_w_y=eta_w_y(cal, tech, rel_step),
        eta_mu_at_theta=eta,
    )


@dataclass(frozen=True)
class SweepPoint:
    """One productivity level of a sweep.

    ``u`` uses monthly transition probabilities aggregated from the daily
    ones, the convention behind the 5.7 percent calibration target;
    ``u_daily`` is the steady state of the daily model itself.
    """

    y: float
    theta: float
    u: float
    u_daily: float
    w: float
    flag: str = ""


def monthly_unemployment(s_daily, f_daily, days_per_month: float = 30.0):
    """s_m / (s_m + f_m) with daily probabilities compounded to monthly."""
    s_m = -np.expm1(days_per_month * np.log1p(-s_daily))
    f_m = -np.expm1(days_per_month * np.log1p(-f_daily))
    return s_m / (s_m + f_m)


def default_y_grid(lo: float = 0.97, hi: float = 1.03, step: float = 0.001) -> np.ndarray:
    n = int(round((hi - lo) / step)) + 1
    return np.round(np.linspace(lo, hi, n), 10)


def sweep_y(cal: Calibration, tech: MatchingTech, y_grid: Sequence[float] | None = None,
            days_per_month: float = 30.0) -> list[SweepPoint]:
    """Re-solve the steady state at each productivity level, others held fixed.

    Infeasible points are kept with NaN values and a flag naming the error.
    """
    if y_grid is None:
        y_grid = default_y_grid()
    out = []
    for y in y_grid:
        y = float(y)
        try:
            c = cal.replace(y=y)
            theta = solve_theta(c, tech).theta_star
            f = f_find(tech, theta, check=False)
            out.append(SweepPoint(y, theta, float(monthly_unemployment(c.s, f, days_per_month)),
                                  c.s / (c.s + f), float(wage_firm_side(c, tech, theta))))
        except ModelError as exc:
            out.append(SweepPoint(y, np.nan, np.nan, np.nan, np.nan, f"InfeasibleAtY:{type(exc).__name__}"))
    return out
