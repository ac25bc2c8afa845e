"""Nonlinear least-squares estimation of the DRW matching function.

Model for the monthly finding probability:

    log f_t = alpha + log theta_t - log(1 + theta_t**gamma) / gamma
              + psi * G_t + xi * C_t + eps_t

with G the Great Recession / slow-recovery regime and C the pandemic
regime. For fixed gamma the model is linear in (alpha, psi, xi), so the
concentrated sum of squares is minimized over gamma alone.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .decomposition import upsilon_bound
from .errors import MisalignedSeries, NoInteriorMinimum, RankDeficientDummies

G_START, G_END = "2007-12", "2020-01"
C_START = "2020-02"
GAMMA_BRACKET = (0.01, 5.0)
_GRID_POINTS = 80
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def regime_dummies(dates: Sequence[str], g_window=(G_START, G_END), c_start=C_START):
    """Return (G, C) indicator arrays for 'YYYY-MM' dates (string comparison is chronological)."""
    g = np.array([g_window[0] <= d <= g_window[1] for d in dates], dtype=float)
    c = np.array([d >= c_start for d in dates], dtype=float)
    return g, c


@dataclass
class EstimationSample:
    dates: list
    log_f: np.ndarray
    log_theta: np.ndarray
    g_dummy: np.ndarray
    c_dummy: np.ndarray
    mask: np.ndarray  # True where the row enters the regression

    def __post_init__(self):
        n = len(self.dates)
        for name in ("log_f", "log_theta", "g_dummy", "c_dummy", "mask"):
            if len(getattr(self, name)) != n:
                raise MisalignedSeries(f"{name} has length {len(getattr(self, name))}, expected {n}")
        if np.any(self.g_dummy * self.c_dummy):
            raise MisalignedSeries("regime dummies overlap")

    @property
    def theta(self) -> np.ndarray:
        return np.exp(self.log_theta)

    @property
    def n_obs(self) -> int:
        return int(self.mask.sum())

    @classmethod
    def from_arrays(cls, dates, f, theta, g_window=(G_START, G_END), c_start=C_START):
        """Sample from raw finding probabilities and tightness; bad rows are masked."""
        f = np.asarray(f, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if not (len(dates) == len(f) == len(theta)):
            raise MisalignedSeries(f"lengths differ: dates={len(dates)}, f={len(f)}, theta={len(theta)}")
        ok = np.isfinite(f) & (f > 0) & np.isfinite(theta) & (theta > 0)
        with np.errstate(invalid="ignore", divide="ignore"):
            log_f = np.where(ok, np.log(np.where(ok, f, 1.0)), np.nan)
            log_theta = np.where(ok, np.log(np.where(ok, theta, 1.0)), np.nan)
        g, c = regime_dummies(dates, g_window, c_start)
        return cls(list(dates), log_f, log_theta, g, c, ok)


def build_sample(rates, vacancies, unemployment, **regimes) -> EstimationSample:
    """Align corrected flow rates with vacancy and unemployment levels.

    ``rates`` is a sequence of FlowRates; the other two are sequences of the
    same length (persons). Flagged months are masked.
    """
    if not (len(rates) == len(vacancies) == len(unemployment)):
        raise MisalignedSeries("rates, vacancies and unemployment must have the same length")
    dates = [r.date for r in rates]
    v = np.asarray(vacancies, dtype=float)
    u = np.asarray(unemployment, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        theta = v / u
    f = np.array([r.f_t if not r.flag else np.nan for r in rates], dtype=float)
    return EstimationSample.from_arrays(dates, f, theta, **regimes)


def drw_log_shape(log_theta, gamma):
    """log theta - log(1 + theta**gamma) / gamma, computed stably."""
    return log_theta - np.logaddexp(0.0, gamma * log_theta) / gamma


def _design(sample: EstimationSample, dummies: bool) -> np.ndarray:
    m = sample.mask
    cols = [np.ones(m.sum())]
    if dummies:
        cols += [sample.g_dummy[m], sample.c_dummy[m]]
    X = np.column_stack(cols)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise RankDeficientDummies("regime dummies are constant or collinear on the unmasked sample")
    return X


def _linear_fit(sample, X, gamma):
    m = sample.mask
    target = sample.log_f[m] - drw_log_shape(sample.log_theta[m], gamma)
    coef, *_ = np.linalg.lstsq(X, target, rcond=None)
    resid = target - X @ coef
    return coef, resid, float(resid @ resid)


def ssr_profile(sample: EstimationSample, gamma: float, dummies: bool = True) -> float:
    """Concentrated sum of squared residuals at ``gamma``."""
    return _linear_fit(sample, _design(sample, dummies), gamma)[2]


def golden_section(fun, lo: float, hi: float, tol: float = 1e-8, max_iter: int = 500):
    """Minimize a unimodal function on [lo, hi]; returns (x, f(x), iterations)."""
    a, b = lo, hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = fun(x1), fun(x2)
    it = 0
    while b - a > tol and it < max_iter:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = fun(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = fun(x2)
        it += 1
    x = 0.5 * (a + b)
    return x, fun(x), it


@dataclass
class EstimationResult:
    alpha: float
    gamma: float
    psi: float
    xi: float
    ssr: float
    residuals: np.ndarray
    smear_factor: float
    n_obs: int
    dates: list = field(default_factory=list)
    dummies: bool = True
    gamma_fixed: bool = False
    boundary: bool = False

    def log_mu(self, g: float = 0.0, c: float = 0.0) -> float:
        return self.alpha + self.psi * g + self.xi * c

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha, "gamma": self.gamma, "psi": self.psi, "xi": self.xi,
            "ssr": self.ssr, "smear_factor": self.smear_factor, "n_obs": self.n_obs,
            "dummies": self.dummies, "gamma_fixed": self.gamma_fixed,
            "boundary_minimum": self.boundary,
        }


def fit_nls(sample: EstimationSample, gamma_bracket=GAMMA_BRACKET, tol: float = 1e-8,
            dummies: bool = True, gamma_fixed: float | None = None) -> EstimationResult:
    """Profiled NLS: closed-form (alpha, psi, xi) given gamma, golden-section search over gamma.

    A log-spaced grid locates the basin first so that the golden-section
    step works on a unimodal interval. If the minimum sits on the bracket
    edge a NoInteriorMinimum warning is issued and the edge value returned.
    """
    if sample.n_obs < 10:
        raise MisalignedSeries(f"need at least 10 usable observations, have {sample.n_obs}")
    X = _design(sample, dummies)
    boundary = False
    if gamma_fixed is not None:
        gamma = float(gamma_fixed)
    else:
        lo, hi = gamma_bracket
        grid = np.geomspace(lo, hi, _GRID_POINTS)
        ssr = np.array([_linear_fit(sample, X, g)[2] for g in grid])
        k = int(np.argmin(ssr))
        a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        gamma, _, _ = golden_section(lambda g: _linear_fit(sample, X, g)[2], a, b, tol)
        if k in (0, len(grid) - 1) and min(gamma - lo, hi - gamma) < 10 * tol:
            boundary = True
            warnings.warn(f"SSR has no interior minimum on {gamma_bracket}; returning gamma={gamma:.6g}",
                          NoInteriorMinimum, stacklevel=2)
    coef, resid, ssr_val = _linear_fit(sample, X, gamma)
    psi = xi = 0.0
    if dummies:
        alpha, psi, xi = (float(v) for v in coef)
    else:
        alpha = float(coef[0])
    dates = [d for d, keep in zip(sample.dates, sample.mask) if keep]
    return EstimationResult(alpha=alpha, gamma=float(gamma), psi=psi, xi=xi, ssr=ssr_val,
                            residuals=resid, smear_factor=float(np.mean(np.exp(resid))),
                            n_obs=len(resid), dates=dates, dummies=dummies,
                            gamma_fixed=gamma_fixed is not None, boundary=boundary)


def naive_predict(result: EstimationResult, theta, g=0.0, c=0.0):
    """Plug-in level prediction exp(fitted log f)."""
    theta = np.asarray(theta, dtype=float)
    log_pred = result.log_mu(np.asarray(g), np.asarray(c)) + drw_log_shape(np.log(theta), result.gamma)
    out = np.exp(log_pred)
    return float(out) if out.ndim == 0 else out


def smear_predict(result: EstimationResult, theta, g=0.0, c=0.0):
    """Retransformed level prediction: naive prediction times the mean of exp(residuals)."""
    return naive_predict(result, theta, g, c) * result.smear_factor


def elasticity_series(gamma: float, theta):
    """Elasticity of matches with respect to unemployment for the DRW function."""
    theta = np.asarray(theta, dtype=float)
    out = 1.0 / (1.0 + theta ** (-gamma))
    return float(out) if out.ndim == 0 else out


def bound_series(gamma: float, theta):
    """max(1/eta, 1/(1-eta)) along a tightness series; 2 under Cobb-Douglas with eta = 1/2."""
    return upsilon_bound(elasticity_series(gamma, theta))
