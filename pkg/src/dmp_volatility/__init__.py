"""Steady-state search-and-matching model with one-off job-creation costs.

Solves for equilibrium tightness, decomposes the elasticity of tightness
with respect to productivity, corrects monthly labor-flow data for time
aggregation and cumulative hires, and estimates a DRW matching function.
"""
__version__ = "0.1.0"

from .calibration import (MonthlyTargets, PRESETS, EconomyPreset, build_economies, build_table,
                          calibrate_mu, monthly_to_daily, solve_c_given_costs, solve_h_max)
from .decomposition import (decompose, eta_theta_y, eta_u_y, eta_w_y, surplus_fraction, sweep_y,
                            upsilon, upsilon_bound)
from .equilibrium import (Uniqueness, big_t, big_t_prime, fundamental_surplus, initial_vacancy_feasible,
                          solve_equilibrium, solve_theta, theta_bar, uniqueness_class)
from .errors import DataError, ModelError
from .estimation import (EstimationResult, EstimationSample, bound_series, build_sample,
                         elasticity_series, fit_nls, naive_predict, smear_predict)
from .flows import (FlowRates, MonthObs, adjust_series, approx_separation, solve_finding,
                    solve_separation, uncorrected_finding)
from .model import DRW, Calibration, CobbDouglas, equilibrium_at, f_find, q_fill
