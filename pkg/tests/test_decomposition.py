import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from dmp_volatility.decomposition import (decompose, default_y_grid, eta_theta_y, eta_u_y, eta_w_y,
                                          monthly_unemployment, surplus_fraction, sweep_y, upsilon,
                                          upsilon_bound)
from dmp_volatility.equilibrium import initial_vacancy_feasible, solve_theta
from dmp_volatility.errors import (ModelError, NonPositiveSurplus, OutOfRangeElasticity,
                                   ZeroVacancyCost)
from dmp_volatility.model import DRW, Calibration, CobbDouglas, eta_mu, f_find, q_fill, wage_firm_side


def fd_elasticity(fun, y, rel=1e-6):
    return (fun(y * (1 + rel)) - fun(y * (1 - rel))) / (2 * rel * y) * y / fun(y)


def test_baseline_upsilon_by_hand(baseline):
    cal, tech = baseline.cal, baseline.tech
    rs = cal.r + cal.s
    f = f_find(tech, 0.72)
    eta = eta_mu(tech, 0.72)
    by_hand = (rs + cal.phi * f) / (rs * eta + cal.phi * f)
    assert upsilon(cal, tech, 0.72) == pytest.approx(by_hand, rel=1e-14)
    assert by_hand == pytest.approx(1.0446, abs=2e-4)


def test_split_upsilon_equals_costless_form(economies):
    split = economies["Split"]
    zero = split.cal.replace(h=0.0, ell=0.0)
    assert upsilon(split.cal, split.tech, 0.72) == pytest.approx(upsilon(zero, split.tech, 0.72), rel=1e-12)


def test_cobb_douglas_upsilon_below_two():
    cal = Calibration(y=1, z=0.7, r=1e-9, s=1e-9, phi=0.5, c=0.2)
    val = upsilon(cal, CobbDouglas(0.3, 0.5), 0.8)
    assert 0 < val < 2
    assert val == pytest.approx(1.0, rel=1e-6)


def test_upsilon_bound_values():
    assert upsilon_bound(0.5) == 2.0
    assert upsilon_bound(0.2) == pytest.approx(5.0)
    assert upsilon_bound(0.8) == pytest.approx(5.0)
    np.testing.assert_allclose(upsilon_bound(np.array([0.25, 0.5])), [4.0, 2.0])
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(OutOfRangeElasticity):
            upsilon_bound(bad)


def test_upsilon_needs_vacancy_cost(baseline):
    with pytest.raises(ZeroVacancyCost):
        upsilon(baseline.cal.replace(c=0.0), baseline.tech, 0.72)


@pytest.mark.parametrize("name,target", [("Baseline", 3.602), ("MiddleH", 4.846),
                                         ("HighH", 7.402), ("Split", 3.760)])
def test_eta_theta_y_table(economies, name, target):
    e = economies[name]
    assert eta_theta_y(e.cal, e.tech, 0.72) == pytest.approx(target, rel=5e-3)


def test_eta_theta_y_against_resolves(economies):
    for e in economies.values():
        fd = fd_elasticity(lambda y: solve_theta(e.cal.replace(y=y), e.tech).theta_star, e.cal.y)
        assert eta_theta_y(e.cal, e.tech, 0.72) == pytest.approx(fd, rel=1e-4)


def test_eta_u_y_against_resolves(economies):
    for e in economies.values():
        def u_of(y):
            th = solve_theta(e.cal.replace(y=y), e.tech).theta_star
            f = f_find(e.tech, th)
            return e.cal.s / (e.cal.s + f)
        assert eta_u_y(e.cal, e.tech, 0.72) == pytest.approx(fd_elasticity(u_of, 1.0), rel=1e-4)


def test_eta_u_y_baseline_value(baseline):
    cal, tech = baseline.cal, baseline.tech
    u = cal.s / (cal.s + f_find(tech, 0.72))
    expected = -(1 - u) * (1 - eta_mu(tech, 0.72)) * eta_theta_y(cal, tech, 0.72)
    assert eta_u_y(cal, tech, 0.72) == pytest.approx(expected, rel=1e-14)
    assert eta_u_y(cal, tech, 0.72) < 0


def test_eta_w_y_matches_total_derivative(economies):
    # dw/dy = dw/dy|theta + dw/dtheta * dtheta/dy, firm-side wage
    for e in economies.values():
        cal, tech = e.cal, e.tech
        th = 0.72
        w = wage_firm_side(cal, tech, th)
        dq = tech.q_prime(th)
        q = q_fill(tech, th)
        dw_dth = (cal.r + cal.s) * cal.c * dq / q ** 2
        dth_dy = eta_theta_y(cal, tech, th) * th / cal.y
        analytic = (1.0 + dw_dth * dth_dy) * cal.y / w
        assert eta_w_y(cal, tech) == pytest.approx(analytic, rel=1e-6)


def test_eta_w_y_baseline(baseline):
    assert eta_w_y(baseline.cal, baseline.tech) == pytest.approx(0.991, abs=3e-3)


def test_surplus_fraction(economies):
    for e in economies.values():
        cal = e.cal
        expected = 1 - (cal.z + cal.beta * cal.s * cal.tau + cal.beta * (cal.r + cal.s) * cal.h / (1 - cal.phi)) / cal.y
        assert surplus_fraction(cal) == pytest.approx(expected, rel=1e-12)
        assert surplus_fraction(cal.replace(y=1.01)) > surplus_fraction(cal)


def test_non_positive_surplus(economies):
    high = economies["HighH"]
    with pytest.raises(NonPositiveSurplus):
        eta_theta_y(high.cal.replace(h=200.0), high.tech, 0.72)


def test_decompose_consistency(economies):
    for e in economies.values():
        d = decompose(e.cal, e.tech)
        assert d.eta_theta_y == pytest.approx(d.upsilon / d.surplus_fraction, rel=1e-12)
        assert 0 < d.upsilon < d.upsilon_bound


def random_calibration(draw_phi, draw_c, draw_h, ell_share, draw_mu, draw_gamma):
    phi = draw_phi
    h = draw_h
    ell = ell_share * phi * h / (1 - phi)  # keeps phi*h - (1-phi)*ell >= 0
    cal = Calibration(y=1.0, z=0.7, r=1.3e-4, s=1.2e-3, phi=phi, c=draw_c, h=h, ell=ell)
    return cal, DRW(draw_mu, draw_gamma)


@given(phi=st.floats(0.05, 0.95), c=st.floats(1e-4, 2.0), h=st.floats(0.0, 50.0),
       share=st.floats(0.0, 1.0), mu=st.floats(0.01, 1.0), gamma=st.floats(0.05, 3.0),
       theta=st.floats(1e-3, 1e3))
@settings(max_examples=300, deadline=None)
def test_upsilon_bound_property(phi, c, h, share, mu, gamma, theta):
    cal, tech = random_calibration(phi, c, h, share, mu, gamma)
    assume(initial_vacancy_feasible(cal).feasible)
    val = upsilon(cal, tech, theta)
    assert 0 < val < upsilon_bound(eta_mu(tech, theta)) * (1 + 1e-12)


def test_default_grid():
    g = default_y_grid()
    assert len(g) == 61
    assert g[0] == 0.97 and g[-1] == 1.03
    assert 1.0 in g


def test_sweep_at_unit_productivity(economies):
    for e in economies.values():
        pts = sweep_y(e.cal, e.tech, [1.0])
        assert pts[0].u == pytest.approx(0.036 / (0.036 + 0.594), rel=1e-9)
        assert pts[0].u == pytest.approx(0.057, abs=5e-4)


def test_sweep_shapes(economies):
    grid = default_y_grid()
    sw = {n: sweep_y(e.cal, e.tech, grid) for n, e in economies.items()}
    u = {n: np.array([p.u for p in s]) for n, s in sw.items()}
    for arr in u.values():
        assert np.all(np.diff(arr) < 0)
    i99, i100, i101 = (int(np.argmin(abs(grid - y))) for y in (0.99, 1.0, 1.01))
    base = u["Baseline"]
    assert abs(base[i99] - base[i100]) > abs(base[i101] - base[i100])
    swing = {n: abs(a[i99 - 9] - a[i101 + 9]) for n, a in u.items()}
    assert max(swing, key=swing.get) == "HighH"
    for n in ("Baseline", "MiddleH", "Split"):
        others = np.delete(np.arange(len(grid)), i100)
        assert np.all(np.abs(u["HighH"][others] - u["HighH"][i100]) > np.abs(u[n][others] - u[n][i100]))
    low = grid < 1
    assert np.all(np.abs(u["Split"][low] - base[low]) < np.abs(u["Split"][low] - u["MiddleH"][low]))


def test_sweep_flags_infeasible(economies):
    high = economies["HighH"]
    pts = sweep_y(high.cal, high.tech, [0.5, 1.0])
    assert pts[0].flag.startswith("InfeasibleAtY:")
    assert np.isnan(pts[0].theta)
    assert not pts[1].flag


def test_monthly_unemployment_convention(targets):
    from dmp_volatility.calibration import monthly_to_daily
    d = monthly_to_daily(targets)
    assert monthly_unemployment(d.s, d.f) == pytest.approx(targets.implied_unemployment, rel=1e-12)


def test_errors_propagate_from_sweep(baseline):
    # a grid point below z leaves the calibration invalid; it is flagged, not raised
    pts = sweep_y(baseline.cal, baseline.tech, [0.7])
    assert pts[0].flag
    with pytest.raises(ModelError):
        solve_theta(baseline.cal.replace(y=0.7001, c=10.0), baseline.tech)
