import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmp_volatility.data_io import month_range
from dmp_volatility.errors import MisalignedSeries, NoInteriorMinimum, RankDeficientDummies
from dmp_volatility.estimation import (EstimationSample, _design, bound_series, drw_log_shape,
                                       elasticity_series, fit_nls, golden_section, naive_predict,
                                       regime_dummies, smear_predict, ssr_profile)
from synthetic import TRUE, finding_probabilities, theta_path

DATES = month_range("2000-12", "2023-05")


def sample_with_noise(sigma, seed, dates=DATES, params=TRUE):
    rng = np.random.default_rng(seed)
    theta = theta_path(len(dates), seed=seed)
    f = finding_probabilities(dates, theta, sigma=sigma, rng=rng, **params)
    return EstimationSample.from_arrays(dates, f, theta)


def test_regime_dummies():
    g, c = regime_dummies(["2005-01", "2007-11", "2007-12", "2010-06", "2020-01", "2020-02", "2021-03"])
    assert list(g) == [0, 0, 1, 1, 1, 0, 0]
    assert list(c) == [0, 0, 0, 0, 0, 1, 1]


def test_drw_log_shape_matches_direct():
    th = np.geomspace(0.05, 20, 30)
    for gamma in (0.05, 0.103, 1.0, 3.0):
        direct = np.log(th * (1 + th ** gamma) ** (-1 / gamma))
        np.testing.assert_allclose(drw_log_shape(np.log(th), gamma), direct, rtol=1e-12, atol=1e-13)


def test_zero_noise_recovery():
    res = fit_nls(sample_with_noise(0.0, 0))
    assert res.gamma == pytest.approx(TRUE["gamma"], abs=1e-6)
    assert res.alpha == pytest.approx(TRUE["alpha"], abs=1e-5)
    assert res.psi == pytest.approx(TRUE["psi"], abs=1e-6)
    assert res.xi == pytest.approx(TRUE["xi"], abs=1e-6)
    assert res.ssr < 1e-14
    assert res.smear_factor == pytest.approx(1.0, abs=1e-9)


def test_noisy_recovery_monte_carlo():
    errs = []
    for rep in range(100):
        res = fit_nls(sample_with_noise(0.05, 1000 + rep, dates=DATES[:270]))
        errs.append(abs(res.gamma - TRUE["gamma"]))
    assert np.median(errs) <= 0.05


def test_normal_equations_and_local_minimum():
    sample = sample_with_noise(0.05, 7)
    res = fit_nls(sample)
    X = _design(sample, True)
    np.testing.assert_allclose(X.T @ res.residuals, 0.0, atol=1e-9)
    assert abs(res.residuals.sum()) < 1e-9
    for step in (0.99, 1.01):
        assert res.ssr <= ssr_profile(sample, res.gamma * step)


def test_golden_section_quadratic():
    x, fx, it = golden_section(lambda v: (v - 1.234) ** 2, 0.0, 5.0, tol=1e-10)
    assert x == pytest.approx(1.234, abs=1e-9)
    assert it > 10


def test_smearing_factor():
    # residuals of +-0.1 give mean(exp) = cosh(0.1)
    res = fit_nls(sample_with_noise(0.0, 0))
    res.residuals = np.tile([0.1, -0.1], 50)
    res.smear_factor = float(np.mean(np.exp(res.residuals)))
    assert res.smear_factor == pytest.approx(math.cosh(0.1), rel=1e-14)
    assert smear_predict(res, 0.72) == pytest.approx(naive_predict(res, 0.72) * math.cosh(0.1))


def test_smearing_exceeds_one_with_noise():
    res = fit_nls(sample_with_noise(0.05, 3))
    assert res.smear_factor > 1.0
    pred = smear_predict(res, theta_path(10))
    assert np.all(pred > naive_predict(res, theta_path(10)))


def test_elasticity_and_bound():
    assert elasticity_series(0.103, 1.0) == 0.5
    assert elasticity_series(1.27, 0.72) == pytest.approx(0.398, abs=1e-3)
    assert bound_series(0.5, 1.0) == 2.0
    th = np.geomspace(0.1, 10, 40)
    np.testing.assert_array_less(1.99999, bound_series(1.27, th))


@given(st.floats(0.01, 100.0), st.floats(0.05, 3.0))
@settings(max_examples=200, deadline=None)
def test_elasticity_in_unit_interval(theta, gamma):
    eta = elasticity_series(gamma, theta)
    assert 0 < eta < 1
    assert bound_series(gamma, theta) >= 2.0


def test_scale_invariance():
    # multiplying f by a constant moves only alpha
    s = sample_with_noise(0.05, 11)
    base = fit_nls(s)
    shifted = EstimationSample(s.dates, s.log_f + math.log(0.5), s.log_theta, s.g_dummy, s.c_dummy, s.mask)
    res = fit_nls(shifted)
    assert res.gamma == pytest.approx(base.gamma, abs=1e-7)
    assert res.alpha == pytest.approx(base.alpha + math.log(0.5), abs=1e-6)
    assert res.psi == pytest.approx(base.psi, abs=1e-6)


def test_boundary_warning():
    params = dict(TRUE, gamma=20.0)
    s = sample_with_noise(0.0, 0, params=params)
    with pytest.warns(NoInteriorMinimum):
        res = fit_nls(s)
    assert res.boundary
    assert res.gamma == pytest.approx(5.0, abs=1e-6)


def test_rank_deficient_dummies():
    dates = month_range("2001-01", "2005-12")
    theta = theta_path(len(dates))
    f = finding_probabilities(dates, theta, **TRUE)
    with pytest.raises(RankDeficientDummies):
        fit_nls(EstimationSample.from_arrays(dates, f, theta))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        res = fit_nls(EstimationSample.from_arrays(dates, f, theta), dummies=False)
    assert res.gamma == pytest.approx(TRUE["gamma"], abs=1e-6)


def test_dummies_never_worse():
    s = sample_with_noise(0.05, 5)
    assert fit_nls(s, dummies=False).ssr >= fit_nls(s).ssr


def test_fixed_gamma():
    s = sample_with_noise(0.05, 5)
    res = fit_nls(s, gamma_fixed=1.27)
    assert res.gamma == 1.27 and res.gamma_fixed
    assert res.ssr >= fit_nls(s).ssr


def test_masking_and_errors():
    theta = theta_path(len(DATES))
    f = finding_probabilities(DATES, theta, **TRUE)
    f[5] = np.nan
    f[6] = 0.0
    theta[7] = -1.0
    s = EstimationSample.from_arrays(DATES, f, theta)
    assert s.n_obs == len(DATES) - 3
    assert fit_nls(s).gamma == pytest.approx(TRUE["gamma"], abs=1e-6)
    with pytest.raises(MisalignedSeries):
        EstimationSample.from_arrays(DATES[:-1], f, theta)
    with pytest.raises(MisalignedSeries):
        fit_nls(EstimationSample.from_arrays(DATES[:5], f[:5], theta[:5]))
