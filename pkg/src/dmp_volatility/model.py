"""Model primitives: calibration, matching technologies, wages and values.

All rates and flows are per model period (one day). Functions accept
scalars or numpy arrays for ``theta`` where that makes sense.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Union

import numpy as np

from .errors import InvalidCalibration, NonPositiveTheta, ProbabilityOverflow


@dataclass(frozen=True)
class Calibration:
    """Per-period model primitives.

    Attributes:
        y: output per match.
        z: flow value of nonwork.
        r: per-period interest rate.
        s: per-period separation probability.
        phi: worker bargaining power.
        c: flow cost of posting a vacancy.
        h: one-off hiring cost paid by the firm.
        ell: one-off cost paid by the worker on accepting a job.
        tau: layoff tax.
    """

    y: float
    z: float
    r: float
    s: float
    phi: float
    c: float = 0.0
    h: float = 0.0
    ell: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        if not self.y > self.z:
            raise InvalidCalibration(f"need y > z, got y={self.y}, z={self.z}")
        if not 0.0 < self.s < 1.0:
            raise InvalidCalibration(f"separation probability {self.s} not in (0, 1)")
        if not self.r > 0.0:
            raise InvalidCalibration(f"interest rate must be positive, got {self.r}")
        if not 0.0 <= self.phi < 1.0:
            raise InvalidCalibration(f"bargaining power {self.phi} not in [0, 1)")
        for name in ("c", "h", "ell", "tau"):
            if getattr(self, name) < 0.0:
                raise InvalidCalibration(f"{name} must be nonnegative")

    @property
    def beta(self) -> float:
        return 1.0 / (1.0 + self.r)

    def replace(self, **changes) -> "Calibration":
        return replace(self, **changes)


def _check_theta(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any(~(theta > 0.0)):
        raise NonPositiveTheta(f"tightness must be positive, got {theta}")
    return theta


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class DRW:
    """Matching function M(u, v) = mu * u * v / (u**gamma + v**gamma)**(1/gamma)."""

    mu: float
    gamma: float
    name: str = field(default="DRW", init=False)

    def __post_init__(self):
        if not (self.mu > 0 and self.gamma > 0):
            raise InvalidCalibration("DRW needs mu > 0 and gamma > 0")

    def q(self, theta):
        return self.mu * np.exp(-np.log1p(theta ** self.gamma) / self.gamma)

    def q_prime(self, theta):
        g = self.gamma
        return -self.mu * theta ** (g - 1.0) * np.exp(-(1.0 / g + 1.0) * np.log1p(theta ** g))

    def eta(self, theta):
        return 1.0 / (1.0 + theta ** (-self.gamma))

    def matches(self, u, v):
        g = self.gamma
        return self.mu * u * v / (u ** g + v ** g) ** (1.0 / g)


@dataclass(frozen=True)
class CobbDouglas:
    """Matching function M(u, v) = A * u**a * v**(1 - a)."""

    efficiency: float
    exponent: float
    name: str = field(default="CobbDouglas", init=False)

    def __post_init__(self):
        if not (self.efficiency > 0 and 0 < self.exponent < 1):
            raise InvalidCalibration("Cobb-Douglas needs A > 0 and 0 < a < 1")

    def q(self, theta):
        return self.efficiency * theta ** (-self.exponent)

    def q_prime(self, theta):
        return -self.exponent * self.efficiency * theta ** (-self.exponent - 1.0)

    def eta(self, theta):
        return np.full_like(np.asarray(theta, dtype=float), self.exponent)

    def matches(self, u, v):
        return self.efficiency * u ** self.exponent * v ** (1.0 - self.exponent)


MatchingTech = Union[DRW, CobbDouglas]


def q_fill(tech: MatchingTech, theta, check: bool = True):
    """Job-filling probability q(theta).

    With ``check`` set, a value above one raises ProbabilityOverflow
    instead of being clamped. Solvers pass ``check=False`` because the
    equilibrium condition is a smooth function of q on all of (0, inf).
    """
    theta = _check_theta(theta)
    q = tech.q(theta)
    if check and np.any(q > 1.0):
        raise ProbabilityOverflow(f"q(theta) > 1 at theta={theta}; matching efficiency too large")
    return _out(q)


def f_find(tech: MatchingTech, theta, check: bool = True):
    """Job-finding probability f(theta) = theta * q(theta)."""
    theta = _check_theta(theta)
    q = tech.q(theta)
    f = theta * q
    if check and (np.any(q > 1.0) or np.any(f > 1.0)):
        raise ProbabilityOverflow(f"matching probability above one at theta={theta}")
    return _out(f)


def q_prime(tech: MatchingTech, theta):
    theta = _check_theta(theta)
    return _out(tech.q_prime(theta))


def f_prime(tech: MatchingTech, theta):
    """Derivative of the finding rate, q + theta * q' = q * (1 - eta)."""
    theta = _check_theta(theta)
    return _out(tech.q(theta) + theta * tech.q_prime(theta))


def eta_mu(tech: MatchingTech, theta):
    """Elasticity of matches with respect to unemployment, -q'(theta) theta / q(theta)."""
    theta = _check_theta(theta)
    return _out(tech.eta(theta))


def wage_firm_side(cal: Calibration, tech: MatchingTech, theta):
    """Wage consistent with free entry of vacancies (firms' job creation)."""
    q = q_fill(tech, theta, check=False)
    rs = cal.r + cal.s
    return cal.y - cal.beta * cal.s * cal.tau - rs * cal.c / q - rs * cal.h / (1.0 + cal.r)


def wage_worker_side(cal: Calibration, tech: MatchingTech, theta):
    """Nash-bargained wage given the value of unemployment (workers' job creation)."""
    theta_arr = _check_theta(theta)
    f = theta_arr * tech.q(theta_arr)
    phi = cal.phi
    w = (cal.z + phi * (cal.y - cal.z - cal.beta * cal.s * cal.tau + theta_arr * cal.c)
         + cal.beta * f * (phi * cal.h - (1.0 - phi) * cal.ell))
    return _out(w)


class ValueFunctions(NamedTuple):
    J: float
    V: float
    E: float
    U: float
    w_R: float


def value_functions(cal: Calibration, tech: MatchingTech, theta, w) -> ValueFunctions:
    """Present values of a filled job, a vacancy, employment and unemployment."""
    theta = float(_check_theta(theta))
    q = tech.q(theta)
    f = theta * q
    beta, phi, r, s = cal.beta, cal.phi, cal.r, cal.s
    J = cal.c / (beta * q) + cal.h
    w_R = (cal.z + phi * cal.c * theta / (1.0 - phi)
           + f / (1.0 + r) * (phi * cal.h / (1.0 - phi) - cal.ell))
    U = w_R * (1.0 + r) / r
    E = (w + beta * s * U) / (1.0 - beta * (1.0 - s))
    return ValueFunctions(J=J, V=0.0, E=E, U=U, w_R=w_R)


def employment_value(cal: Calibration, w, U):
    """Value of employment at wage ``w`` given the value of unemployment."""
    beta = cal.beta
    return (w + beta * cal.s * U) / (1.0 - beta * (1.0 - cal.s))


def unemployment_rate(cal: Calibration, tech: MatchingTech, theta):
    f = f_find(tech, theta, check=False)
    return cal.s / (cal.s + f)


@dataclass(frozen=True)
class Equilibrium:
    theta: float
    u: float
    w: float
    J: float
    V: float
    E: float
    U: float
    w_R: float


def equilibrium_at(cal: Calibration, tech: MatchingTech, theta: float) -> Equilibrium:
    """Steady-state objects implied by a (solved) tightness."""
    w = wage_firm_side(cal, tech, theta)
    vf = value_functions(cal, tech, theta, w)
    return Equilibrium(theta=float(theta), u=float(unemployment_rate(cal, tech, theta)),
                       w=float(w), **vf._asdict())
