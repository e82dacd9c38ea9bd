import math
from dataclasses import replace

import numpy as np
import pytest

from kyle_eq import (MarketParams, Regime, classify_role, detect_regime,
                     deviation_gains, expected_profits, simulate_market,
                     verify_equilibrium)
from kyle_eq.profits import ProfitEngine, benchmark_it_profit


def test_zero_sum_identity(sol_small_it_j1, sol_rt_j1, sol_mixed_pop, sol_no_hft):
    for sol in (sol_small_it_j1, sol_rt_j1, sol_mixed_pop, sol_no_hft):
        rep = expected_profits(sol)
        assert abs(rep.zero_sum_gap(sol.params)) < 1e-9


def test_no_hft_two_party_zero_sum(sol_no_hft):
    rep = expected_profits(sol_no_hft)
    assert rep.noise_profit == pytest.approx(-rep.it_profit, abs=1e-12)
    assert rep.it_profit == pytest.approx(rep.benchmark_it, abs=1e-9)


def test_unwinder_gross_equals_net(sol_rt_j1):
    """Positions clear, so the inventory penalty contributes nothing."""
    eng = ProfitEngine(sol_rt_j1.profile, sol_rt_j1.pricing, sol_rt_j1.params)
    j = sol_rt_j1.params.j1
    assert eng.hft_value(j, gross=True) == pytest.approx(
        eng.hft_value(j, gross=False), abs=1e-15)


def test_deviation_gains_nonpositive(sol_small_it_j1, sol_mixed_pop):
    for sol in (sol_small_it_j1, sol_mixed_pop):
        gains = deviation_gains(sol)
        assert max(gains.values()) < 1e-10


def test_corrupted_solution_fails_deviation():
    sol = detect_regime(MarketParams(theta_1plus=1.0, theta_2=1.0,
                                     theta_eps=0.0, j1=1))
    bad = replace(sol, profile=replace(sol.profile, a1=sol.profile.a1 * 1.1))
    gains = deviation_gains(bad)
    assert max(gains.values()) > 1e-6


def test_simulation_determinism(sol_small_it_j1):
    a = simulate_market(sol_small_it_j1, 10 ** 5, seed=42)
    b = simulate_market(sol_small_it_j1, 10 ** 5, seed=42)
    assert a.lambda_hat == b.lambda_hat
    assert a.profit_mean == b.profit_mean
    assert a.series_mean == b.series_mean


def test_simulation_martingale_and_ols(sol_small_it_j1):
    s = simulate_market(sol_small_it_j1, 4 * 10 ** 5, seed=11)
    assert abs(s.series_mean["p2"]) < 4.0 * s.series_mean_se["p2"]
    pr = sol_small_it_j1.pricing
    for k, true in (("lambda1", pr.lambda1), ("lambda1plus", pr.lambda1plus),
                    ("lambda21", pr.lambda21), ("lambda22", pr.lambda22)):
        assert abs(s.lambda_hat[k] - true) < 4.0 * s.lambda_se[k], k


def test_standard_errors_scale_with_n(sol_small_it_j1):
    a = simulate_market(sol_small_it_j1, 10 ** 5, seed=3)
    b = simulate_market(sol_small_it_j1, 4 * 10 ** 5, seed=3)
    for k in a.profit_se:
        ratio = a.profit_se[k] / b.profit_se[k]
        assert 1.6 <= ratio <= 2.5, (k, ratio)
    ratio = a.lambda_se["lambda22"] / b.lambda_se["lambda22"]
    assert 1.6 <= ratio <= 2.5


def test_profits_match_simulation(sol_small_it_j1, sol_rt_j1):
    for sol in (sol_small_it_j1, sol_rt_j1):
        rep = expected_profits(sol)
        s = simulate_market(sol, 10 ** 6, seed=5)
        pairs = [("pi_it", rep.it_profit), ("pi_noise", rep.noise_profit)]
        if "pi_small" in s.profit_mean:
            pairs.append(("pi_small", rep.hft_profit_small))
        if "pi_rt" in s.profit_mean:
            pairs.append(("pi_rt", rep.hft_profit_rt))
        for k, true in pairs:
            z = abs(s.profit_mean[k] - true) / s.profit_se[k]
            assert z < 4.0, (k, z)


def test_verify_passes_on_equilibria(sol_small_it_j1, sol_rt_j1):
    for sol in (sol_small_it_j1, sol_rt_j1):
        rep = verify_equilibrium(sol, n=10 ** 5, seed=9)
        assert rep.passed, rep
        assert rep.clearing_margin == 0.0 or sol.params.j2 == 0
        if sol.regime is Regime.PURE:
            assert rep.indifference_pass is None
        else:
            assert rep.indifference_pass is not None


def test_verify_flags_corrupted_solution(sol_small_it_j1):
    bad = replace(sol_small_it_j1,
                  profile=replace(sol_small_it_j1.profile,
                                  a1=sol_small_it_j1.profile.a1 * 1.1))
    rep = verify_equilibrium(bad, n=10 ** 4, seed=9)
    assert not rep.deviation_pass
    assert rep.deviation_margin > 1e-6


def test_roles(sol_small_it_j1, sol_rt_j1):
    assert classify_role(sol_small_it_j1, "small") == "small_it"
    assert classify_role(sol_rt_j1, "rt") == "round_tripper"


def test_inverse_round_tripper_below_boundary():
    # scarce fast noise with one zero-aversion and nine unwinding traders
    sol = detect_regime(MarketParams(theta_1plus=0.3, theta_2=1.0,
                                     theta_eps=0.0, j1=1, j2=9))
    assert sol.found
    assert classify_role(sol, "small") == "inverse_round_tripper"
    assert classify_role(sol, "rt") == "round_tripper"


def test_benchmark_profit_is_classic_two_period():
    val = benchmark_it_profit(1.0)
    assert 0.5 < val < 1.5
