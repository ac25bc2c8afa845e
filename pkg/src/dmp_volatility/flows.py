"""Monthly transition probabilities corrected for time aggregation and cumulative hires.

Within a month the labor force is held constant, workers find jobs at
Poisson rate ``varphi`` and separate at rate ``varsigma``, and the hires
reported for the month accumulate linearly. Separation probabilities come
from the employment/hires identity; finding probabilities then follow from
the closed-form solution for employment given the separation rate.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateLaborForce, ModelError, NoRoot, ZeroUnemployment

S_UPPER = 0.999
VARPHI_UPPER = 20.0
_SERIES_CUTOFF = 1e-8


@dataclass(frozen=True)
class MonthObs:
    """Stocks and flows for one month, in persons.

    ``hires`` are the cumulative hires reported for the month, which move
    employment from ``e_t`` (start of month) to ``e_next`` (start of next).
    """

    date: str
    e_t: float
    e_next: float
    hires: float
    l_t: float
    u_t: float
    unrate: float = math.nan
    flag: str = ""


@dataclass(frozen=True)
class FlowRates:
    date: str
    s_t: float
    s_approx: float
    s_uncorrected: float
    f_t: float
    f_uncorrected: float
    varsigma: float
    varphi: float
    flag: str = ""

    @property
    def ok(self) -> bool:
        return not self.flag


def rate_to_prob(rate):
    return -np.expm1(-np.asarray(rate, dtype=float))


def prob_to_rate(prob):
    return -np.log1p(-np.asarray(prob, dtype=float))


def retention_ratio(s):
    """s / ln(1 - s), continuous at s = 0 where it equals -1."""
    s = float(s)
    if s < _SERIES_CUTOFF:
        return -1.0 / (1.0 + s / 2.0 + s * s / 3.0)
    return s / math.log1p(-s)


def next_employment_from_separation(e_t, hires, s):
    """Employment at the start of next month given a separation probability."""
    return e_t * (1.0 - s) + hires - hires * (1.0 + retention_ratio(s))


def next_employment_from_rates(e_t, l_t, varsigma, varphi):
    """Closed-form end-of-month employment for constant Poisson rates."""
    x = varsigma + varphi
    # (1 - exp(-x)) / x, equal to 1 at x = 0
    frac = -math.expm1(-x) / x if x > 0.0 else 1.0
    return varphi * l_t * frac + e_t * math.exp(-x)


def solve_separation(obs: MonthObs, tol: float = 1e-14) -> float:
    if not obs.e_t > 0.0:
        raise NoRoot(f"{obs.date}: employment must be positive")
    if obs.hires < 0.0:
        raise NoRoot(f"{obs.date}: negative hires")

    def resid(s):
        return next_employment_from_separation(obs.e_t, obs.hires, s) - obs.e_next

    lo, hi = resid(0.0), resid(S_UPPER)
    if lo == 0.0:
        return 0.0
    if not (lo > 0.0 > hi):
        raise NoRoot(f"{obs.date}: separation equation has no root in [0, {S_UPPER}]")
    return brentq(resid, 0.0, S_UPPER, xtol=tol, rtol=4 * np.finfo(float).eps)


def approx_separation(obs: MonthObs) -> tuple[float, bool]:
    """Separation probability under net-hires accounting; returns (value, clipped)."""
    s = 1.0 - (obs.e_next - obs.hires) / obs.e_t
    clipped = s < 0.0 or s >= 1.0
    return min(max(s, 0.0), math.nextafter(1.0, 0.0)), clipped


def solve_finding(obs: MonthObs, varsigma: float, tol: float = 1e-14) -> float:
    """Monthly finding probability given the separation rate; solves for varphi."""
    if not obs.l_t > obs.e_t:
        raise DegenerateLaborForce(f"{obs.date}: labor force {obs.l_t} <= employment {obs.e_t}")
    if varsigma < 0.0:
        raise NoRoot(f"{obs.date}: negative separation rate")

    def resid(varphi):
        return next_employment_from_rates(obs.e_t, obs.l_t, varsigma, varphi) - obs.e_next

    lo, hi = resid(0.0), resid(VARPHI_UPPER)
    if lo == 0.0:
        return 0.0
    if not (lo < 0.0 < hi):
        raise NoRoot(f"{obs.date}: finding equation has no root in [0, {VARPHI_UPPER}]")
    varphi = brentq(resid, 0.0, VARPHI_UPPER, xtol=tol, rtol=4 * np.finfo(float).eps)
    return float(rate_to_prob(varphi))


def uncorrected_finding(obs: MonthObs) -> float:
    """Hires over unemployment; may exceed one."""
    if not obs.u_t > 0.0:
        raise ZeroUnemployment(f"{obs.date}: unemployment level is zero")
    return obs.hires / obs.u_t


def uncorrected_separation(f_uncorrected: float, unrate_percent: float) -> float:
    """Separation rate making u = s / (s + f) hold with the official unemployment rate."""
    u = unrate_percent / 100.0
    return u * f_uncorrected / (1.0 - u)


def adjust_month(obs: MonthObs) -> FlowRates:
    nan = math.nan
    flags = [obs.flag] if obs.flag else []
    s_app = f_unc = s_unc = nan
    if not flags:
        s_app, clipped = approx_separation(obs)
        if clipped:
            flags.append("s_approx_clipped")
        try:
            f_unc = uncorrected_finding(obs)
            s_unc = uncorrected_separation(f_unc, obs.unrate)
        except ZeroUnemployment as exc:
            flags.append(type(exc).__name__)
    s_t = f_t = varsigma = varphi = nan
    hard = bool(obs.flag)
    if not hard:
        try:
            s_t = solve_separation(obs)
            varsigma = float(prob_to_rate(s_t))
            f_t = solve_finding(obs, varsigma)
            varphi = float(prob_to_rate(f_t))
        except ModelError as exc:
            flags.append(type(exc).__name__)
    return FlowRates(obs.date, s_t, s_app, s_unc, f_t, f_unc, varsigma, varphi, ";".join(flags))


def adjust_series(months: Sequence[MonthObs]) -> list[FlowRates]:
    """Correct every month; failures are flagged and kept in place."""
    return [adjust_month(m) for m in months]


def solvable(rates: Iterable[FlowRates]) -> list[bool]:
    return [math.isfinite(r.f_t) and math.isfinite(r.s_t) for r in rates]


FLOW_COLUMNS = ("date", "s_corrected", "s_approx", "s_uncorrected", "f_corrected",
                "f_uncorrected", "varsigma", "varphi", "flag")


def _fmt(x):
    return "" if isinstance(x, float) and math.isnan(x) else repr(float(x))


def write_flows_csv(rates: Sequence[FlowRates], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FLOW_COLUMNS)
        for r in rates:
            w.writerow([r.date, _fmt(r.s_t), _fmt(r.s_approx), _fmt(r.s_uncorrected), _fmt(r.f_t),
                        _fmt(r.f_uncorrected), _fmt(r.varsigma), _fmt(r.varphi), r.flag])


def read_flows_csv(path) -> list[FlowRates]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            val = {k: (float(row[k]) if row[k] else math.nan) for k in FLOW_COLUMNS[1:-1]}
            out.append(FlowRates(row["date"], val["s_corrected"], val["s_approx"],
                                 val["s_uncorrected"], val["f_corrected"], val["f_uncorrected"],
                                 val["varsigma"], val["varphi"], row["flag"]))
    return out
