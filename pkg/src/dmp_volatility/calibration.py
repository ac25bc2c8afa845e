"""Monthly targets to daily parameters, preset economies, and the results table."""
from __future__ import annotations

import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import NamedTuple

from .decomposition import eta_theta_y, eta_w_y
from .equilibrium import fundamental_surplus
from .errors import InvalidCalibration, NonPositiveCost
from .model import DRW, Calibration, MatchingTech, f_find, q_fill

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

# Fixed cost in the high-h economy, as reported with the results table.
HIGH_H = 8.976
DEFAULT_GAMMA = 0.103
# Reference data moment for the elasticity of tightness (not a model output).
DATA_ETA_THETA_Y = 7.56


@dataclass(frozen=True)
class MonthlyTargets:
    theta_star: float = 0.72
    f_monthly: float = 0.594
    r_monthly: float = 0.004
    s_monthly: float = 0.036
    days_per_month: float = 30.0
    z: float = 0.71
    y: float = 1.0
    phi: float = 0.5

    def __post_init__(self):
        for name in ("f_monthly", "s_monthly"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise InvalidCalibration(f"{name} must lie in (0, 1)")
        if not self.theta_star > 0.0:
            raise InvalidCalibration("theta_star must be positive")

    @property
    def implied_unemployment(self) -> float:
        return self.s_monthly / (self.s_monthly + self.f_monthly)


class DailyRates(NamedTuple):
    r: float
    s: float
    f: float


def monthly_to_daily(targets: MonthlyTargets) -> DailyRates:
    """Interest compounds; separation and finding probabilities are complement roots."""
    n = targets.days_per_month
    return DailyRates(
        r=math.expm1(math.log1p(targets.r_monthly) / n),
        s=-math.expm1(math.log1p(-targets.s_monthly) / n),
        f=-math.expm1(math.log1p(-targets.f_monthly) / n),
    )


def daily_to_monthly(rates: DailyRates, days_per_month: float = 30.0) -> DailyRates:
    n = days_per_month
    return DailyRates(
        r=math.expm1(n * math.log1p(rates.r)),
        s=-math.expm1(n * math.log1p(-rates.s)),
        f=-math.expm1(n * math.log1p(-rates.f)),
    )


def calibrate_mu(targets: MonthlyTargets, gamma: float, check_grid=None) -> float:
    """Matching efficiency that delivers the daily finding target at theta_star."""
    if not gamma > 0:
        raise InvalidCalibration("gamma must be positive")
    th = targets.theta_star
    f = monthly_to_daily(targets).f
    mu = f * math.exp(math.log1p(th ** gamma) / gamma) / th
    tech = DRW(mu, gamma)
    q_fill(tech, th)
    if check_grid is not None:
        q_fill(tech, check_grid)
    return mu


def base_calibration(targets: MonthlyTargets, c: float = 0.0, h: float = 0.0,
                     ell: float = 0.0, tau: float = 0.0) -> Calibration:
    d = monthly_to_daily(targets)
    return Calibration(y=targets.y, z=targets.z, r=d.r, s=d.s, phi=targets.phi,
                       c=c, h=h, ell=ell, tau=tau)


def solve_c_given_costs(cal: Calibration, tech: MatchingTech, theta_star: float,
                        h: float | None = None, ell: float | None = None) -> float:
    """Vacancy cost that makes ``theta_star`` an equilibrium for given one-off costs.

    Any ``c`` already on ``cal`` is ignored.
    """
    h = cal.h if h is None else h
    ell = cal.ell if ell is None else ell
    cal = cal.replace(h=h, ell=ell, c=0.0)
    q = q_fill(tech, theta_star, check=False)
    f = theta_star * q
    phi = cal.phi
    resources = fundamental_surplus(cal) - f / (1.0 + cal.r) * (phi * h / (1.0 - phi) - ell)
    c = resources * (1.0 - phi) * q / (cal.r + cal.s + phi * f)
    if not c > 0.0:
        raise NonPositiveCost(f"cost mix h={h}, ell={ell} needs c={c:.6g} <= 0 at theta={theta_star}")
    return c


def solve_h_max(cal: Calibration, tech: MatchingTech, theta_star: float) -> float:
    """Largest firm-paid fixed cost compatible with theta_star (c = 0, ell = tau = 0)."""
    f = f_find(tech, theta_star, check=False)
    phi, r, s = cal.phi, cal.r, cal.s
    return (cal.y - cal.z) / (cal.beta * (r + s) / (1.0 - phi) + f * phi / ((1.0 + r) * (1.0 - phi)))


@dataclass(frozen=True)
class EconomyPreset:
    """Share of the high-h fixed cost paid by firms (h) and by workers (ell)."""

    name: str
    h_share: float = 0.0
    ell_share: float = 0.0
    h: float | None = None
    ell: float | None = None

    def costs(self, high_h: float) -> tuple[float, float]:
        h = self.h if self.h is not None else self.h_share * high_h
        ell = self.ell if self.ell is not None else self.ell_share * high_h
        return h, ell


PRESETS = (
    EconomyPreset("Baseline"),
    EconomyPreset("MiddleH", h_share=0.5),
    EconomyPreset("HighH", h_share=1.0),
    EconomyPreset("Split", h_share=0.5, ell_share=0.5),
)


@dataclass
class Economy:
    name: str
    cal: Calibration
    tech: DRW


def build_economies(targets: MonthlyTargets | None = None, gamma: float = DEFAULT_GAMMA,
                    presets=PRESETS, high_h: float | None = HIGH_H) -> dict[str, Economy]:
    """Calibrate each preset to the common steady state.

    ``high_h=None`` uses h_max rounded down to three decimals.
    """
    targets = targets or MonthlyTargets()
    tech = DRW(calibrate_mu(targets, gamma), gamma)
    base = base_calibration(targets)
    if high_h is None:
        high_h = math.floor(solve_h_max(base, tech, targets.theta_star) * 1000) / 1000
    out = {}
    for p in presets:
        h, ell = p.costs(high_h)
        c = solve_c_given_costs(base, tech, targets.theta_star, h, ell)
        out[p.name] = Economy(p.name, base.replace(c=c, h=h, ell=ell), tech)
    return out


@dataclass(frozen=True)
class TableRow:
    economy: str
    c: float
    h: float
    ell: float
    eta_theta_y: float
    eta_w_y: float


def build_table(targets: MonthlyTargets | None = None, gamma: float = DEFAULT_GAMMA,
                presets=PRESETS, high_h: float | None = HIGH_H) -> list[TableRow]:
    targets = targets or MonthlyTargets()
    rows = []
    for econ in build_economies(targets, gamma, presets, high_h).values():
        cal, tech = econ.cal, econ.tech
        rows.append(TableRow(econ.name, cal.c, cal.h, cal.ell,
                             eta_theta_y(cal, tech, targets.theta_star),
                             eta_w_y(cal, tech)))
    return rows


@dataclass
class ModelConfig:
    targets: MonthlyTargets = field(default_factory=MonthlyTargets)
    gamma: float = DEFAULT_GAMMA
    high_h: float | None = HIGH_H
    economies: tuple = PRESETS
    extra: dict = field(default_factory=dict)


def _parse_text(text: str, suffix: str) -> dict:
    if suffix == ".toml":
        return tomllib.loads(text)
    return json.loads(text)


def load_config(path) -> ModelConfig:
    """Read a JSON or TOML file with keys ``targets``, ``gamma``, ``high_h``, ``economies``.

    Unknown top-level keys are kept in ``extra`` for the command-line layer.
    """
    path = Path(path)
    raw = _parse_text(path.read_text(), path.suffix.lower())
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ModelConfig:
    raw = dict(raw)
    known = {f.name for f in fields(MonthlyTargets)}
    t = raw.pop("targets", {}) or {}
    bad = set(t) - known
    if bad:
        raise InvalidCalibration(f"unknown target keys: {sorted(bad)}")
    cfg = ModelConfig(targets=MonthlyTargets(**t))
    if "gamma" in raw:
        cfg.gamma = float(raw.pop("gamma"))
    if "high_h" in raw:
        v = raw.pop("high_h")
        cfg.high_h = None if v is None else float(v)
    if "economies" in raw:
        cfg.economies = tuple(EconomyPreset(**e) for e in raw.pop("economies"))
    cfg.extra = raw
    return cfg


def config_to_dict(cfg: ModelConfig) -> dict:
    return {
        "targets": asdict(cfg.targets),
        "gamma": cfg.gamma,
        "high_h": cfg.high_h,
        "economies": [asdict(e) for e in cfg.economies],
    }
