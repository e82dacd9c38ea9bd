"""Acceptance suite: every exit criterion at its stated tolerance, one
pass/fail line per criterion.  Criteria: closed-form limit values (1e-12),
tiny-fast-noise convergence (1e-3), the infinite-aversion reduction and the
reduced-system cross-validation (1e-7), regime claims, the Monte-Carlo
verification of a 30-solution corpus, the threshold qualitative suite,
comparative statics, and determinism/scale invariance."""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from kyle_eq import (MarketParams, RawParams, Regime, detect_regime,
                     limit_small_it, solve_point, solve_specialized,
                     to_dimensionless, verify_equilibrium)
from kyle_eq.limits import RegimeMismatchError
from kyle_eq.profits import benchmark_it_profit, expected_profits
from kyle_eq.simulate import simulate_market
from kyle_eq.thresholds import (critical_theta1plus_pure, existence_boundary,
                                inverse_rt_boundary, profit_thresholds)

COEFFS = ("a1", "theta_z", "a21", "alpha22", "beta11", "beta21", "beta22",
          "beta23", "beta12")


def _report(num: int, text: str):
    print(f"\nACCEPTANCE {num}: PASS - {text}")


# -- 1: closed-form limit values ------------------------------------------------

def test_criterion_1_closed_form_limits():
    t0 = time.time()
    lim2 = limit_small_it(2, 0.0, 1.0, Regime.MIXED)
    for got, want in ((lim2.theta_z, 0.14), (lim2.a1, 0.6), (lim2.a21, 1.25),
                      (lim2.alpha22, -0.75), (lim2.beta21, 0.75),
                      (lim2.lambda1, 0.4)):
        assert abs(got - want) <= 1e-12
    lim1 = limit_small_it(1, 0.0, 1.0, Regime.MIXED)
    assert abs(lim1.theta_z - 1.0 / 39.0) <= 1e-12
    assert abs(lim1.a1 - 1.0 / math.sqrt(3.25)) <= 1e-12
    elapsed = time.time() - t0
    assert elapsed < 1.0
    _report(1, f"closed-form limit values reproduced to 1e-12 in {elapsed:.3f}s")


# -- 2: convergence to the limit ------------------------------------------------

def test_criterion_2_limit_convergence():
    t0 = time.time()
    checked = 0
    for J in (1, 2, 3, 5, 10):
        for te in (0.0, 0.5, 1.0):
            try:
                lim = limit_small_it(J, te, 1.0, Regime.MIXED)
            except RegimeMismatchError:
                lim = limit_small_it(J, te, 1.0, Regime.PURE)
            sol = detect_regime(MarketParams(theta_1plus=1e-6, theta_2=1.0,
                                             theta_eps=te, j1=J))
            assert sol.found, (J, te)
            assert sol.regime is lim.regime, (J, te, sol.regime, lim.regime)
            for f, want in (("a1", lim.a1), ("theta_z", lim.theta_z),
                            ("a21", lim.a21), ("alpha22", lim.alpha22),
                            ("beta21", lim.beta21)):
                got = getattr(sol.profile, f)
                assert abs(got - want) <= 1e-3 * max(1.0, abs(want)), (J, te, f)
            checked += 1
    elapsed = time.time() - t0
    assert elapsed < 300.0
    _report(2, f"{checked} limit points matched within 1e-3 in {elapsed:.0f}s")


# -- 3: infinite-aversion reduction ----------------------------------------------

def test_criterion_3_unwinding_reduction():
    rng = np.random.default_rng(7)
    count = 0
    while count < 10:
        params = MarketParams(
            theta_1plus=float(rng.uniform(0.1, 1.5)),
            theta_2=float(rng.uniform(0.5, 2.0)),
            theta_eps=float(rng.uniform(0.0, 1.5)),
            j2=int(rng.integers(1, 6)))
        g = detect_regime(params)
        if not g.found:
            continue
        s = solve_specialized(params, regime_hint=g.regime)
        assert s.found and s.regime is g.regime, params
        worst = max(abs(getattr(g.profile, f) - getattr(s.profile, f))
                    for f in COEFFS)
        assert worst <= 1e-7, (params, worst)
        for sol in (g, s):
            _, b21, b22, b23, _ = sol.profile.expand(params)
            assert all(v == 0.0 for v in b21)
            assert all(v == 0.0 for v in b22)
            assert all(v == -1.0 for v in b23)
            assert sol.profile.beta12 > 0.0
        count += 1
    _report(3, "10 unwinding markets: general == reduced system to 1e-7, "
               "second trades exactly unwind, first trades follow the flow")


# -- 4: reduced-system cross-validation ------------------------------------------

def _draw_params(rng, config: str) -> MarketParams:
    t1p = float(rng.uniform(0.3, 1.5))
    t2 = float(rng.uniform(0.5, 2.0))
    te = float(rng.uniform(0.0, 1.5))
    if config == "small":
        return MarketParams(theta_1plus=t1p, theta_2=t2, theta_eps=te,
                            j1=int(rng.integers(1, 6)))
    if config == "rt":
        return MarketParams(theta_1plus=t1p, theta_2=t2, theta_eps=te,
                            j2=int(rng.integers(1, 6)))
    if config == "mixed":
        j1 = int(rng.integers(1, 5))
        j2 = int(rng.integers(1, 5))
        return MarketParams(theta_1plus=float(rng.uniform(0.5, 1.5)),
                            theta_2=t2, theta_eps=te, j1=j1, j2=j2)
    return MarketParams(theta_1plus=t1p, theta_2=t2, theta_eps=te,
                        gamma=float(rng.uniform(0.0, 2.0)))


def test_criterion_4_cross_validation():
    t0 = time.time()
    rng = np.random.default_rng(11)
    third_party_sizes = set()
    for config in ("small", "rt", "mixed", "gamma"):
        done = 0
        attempts = 0
        while done < 20:
            attempts += 1
            assert attempts < 200, f"too many inadmissible draws for {config}"
            if config == "small" and done < 2:
                # pin the third-party-sum sizes the reading must cover
                params = replace(_draw_params(rng, config), j1=3 + done)
            else:
                params = _draw_params(rng, config)
            g = detect_regime(params)
            if not g.found:
                continue
            s = solve_specialized(params, regime_hint=g.regime)
            assert s.found and s.regime is g.regime, params
            worst = max(abs(getattr(g.profile, f) - getattr(s.profile, f))
                        for f in COEFFS)
            assert worst <= 1e-7, (params, worst)
            if params.gamma is None:
                third_party_sizes.add(params.j1 + params.j2)
            done += 1
    assert {3, 4} <= third_party_sizes
    _report(4, f"80 admissible points agree to 1e-7 across all four reduced "
               f"systems (populations of 3 and 4 included) "
               f"in {time.time() - t0:.0f}s")


# -- 5: regime claims -------------------------------------------------------------

def test_criterion_5_regime_claims():
    t0 = time.time()
    # (a) few unwinding traders in an active market: always pure
    for j2 in (1, 2, 3):
        warm = None
        for se in np.linspace(0.0, 2.0, 32):
            sol = solve_point(MarketParams(theta_1plus=1.0, theta_2=1.0,
                                           theta_eps=float(se * se), j2=j2),
                              regime_hint=Regime.PURE, init=warm)
            assert sol.found and sol.regime is Regime.PURE, (j2, se * se)
            warm = sol.profile
    # (b) a single zero-aversion trader forces randomization
    sol = detect_regime(MarketParams(theta_1plus=1.0, theta_2=1.0,
                                     theta_eps=0.0, j1=1))
    assert sol.regime is Regime.MIXED and sol.profile.theta_z > 0.0
    # (c) randomization grows with the zero-aversion proportion
    for te in (0.0, 0.25, 1.0, 2.25, 4.0):
        previous = -1.0
        for p in (0.0, 0.2, 0.5, 0.8, 1.0):
            j1 = int(round(10 * p))
            sol = detect_regime(MarketParams(theta_1plus=1.0, theta_2=1.0,
                                             theta_eps=te, j1=j1, j2=10 - j1))
            assert sol.found, (te, j1)
            tz = sol.profile.theta_z
            assert tz >= previous - 1e-9, (te, j1, tz, previous)
            previous = tz
    _report(5, f"regime claims hold: pure for <=3 unwinders at unit fast "
               f"noise (32-point grid), mixed with one zero-aversion trader, "
               f"randomization non-decreasing in the zero-aversion proportion "
               f"({time.time() - t0:.0f}s)")


# -- 6: Monte-Carlo verification of the corpus ------------------------------------

CORPUS = (
    # (j1, j2, gamma, theta_1plus, theta_eps, theta_2)
    (0, 0, None, 1.0, 0.0, 1.0),
    (1, 0, None, 1.0, 0.0, 1.0),
    (1, 0, None, 1.0, 1.0, 1.0),
    (1, 0, None, 0.1, 0.0, 1.0),
    (2, 0, None, 1.0, 0.5, 1.0),
    (3, 0, None, 0.5, 0.0, 1.5),
    (5, 0, None, 1.0, 1.0, 1.0),
    (10, 0, None, 0.3, 0.25, 1.0),
    (2, 0, None, 0.01, 4.0, 1.0),
    (0, 1, None, 1.0, 0.0, 1.0),
    (0, 1, None, 0.05, 0.0, 1.0),
    (0, 2, None, 1.0, 1.0, 1.0),
    (0, 3, None, 0.1, 0.2, 1.0),
    (0, 5, None, 1.0, 0.0, 2.0),
    (0, 5, None, 0.4, 1.0, 1.0),
    (0, 10, None, 1.0, 0.5, 1.0),
    (0, 10, None, 2.0, 0.0, 1.0),
    (1, 9, None, 1.0, 0.0, 1.0),
    (1, 9, None, 0.3, 0.0, 1.0),
    (2, 2, None, 0.8, 0.5, 1.0),
    (5, 5, None, 1.0, 0.0, 1.0),
    (5, 5, None, 1.0, 2.0, 1.0),
    (8, 2, None, 0.9, 0.1, 1.2),
    (3, 7, None, 0.7, 0.8, 1.0),
    (2, 8, None, 1.5, 0.0, 0.8),
    (0, 0, 0.05, 1.0, 0.5, 1.0),
    (0, 0, 0.24, 1.0, 0.0, 1.0),
    (0, 0, 0.7, 1.0, 0.5, 1.0),
    (0, 0, 2.0, 0.5, 0.2, 1.0),
    (0, 0, 0.1, 0.5, 0.0, 2.0),
)


def test_criterion_6_monte_carlo_verification():
    t0 = time.time()
    n = 10 ** 7
    failures = []
    mixed_count = 0
    for i, (j1, j2, gamma, t1p, te, t2) in enumerate(CORPUS):
        params = MarketParams(theta_1plus=t1p, theta_2=t2, theta_eps=te,
                              j1=j1, j2=j2, gamma=gamma)
        sol = detect_regime(params)
        assert sol.found, params
        rep = verify_equilibrium(sol, n=n, seed=1000 + i)
        if sol.regime is Regime.MIXED:
            mixed_count += 1
            assert rep.details["indifference_residuals"]["z1"] < 1e-9
            assert rep.details["indifference_residuals"]["z2"] < 1e-9
        if not (rep.pricing_pass and rep.deviation_pass and rep.zero_sum_pass
                and rep.clearing_pass
                and (rep.indifference_pass in (None, True))):
            failures.append((params, rep))
    assert not failures, failures
    assert rep.deviation_margin < 1e-10
    elapsed = time.time() - t0
    assert elapsed < 600.0
    _report(6, f"30-solution corpus verified at n=1e7 ({mixed_count} mixed) "
               f"in {elapsed:.0f}s")


# -- 7: threshold qualitative suite ------------------------------------------------

def test_criterion_7a_regime_boundary_ordering():
    t0 = time.time()
    # sup of the regime boundary below unit fast noise for J <= 3 ...
    for J in (1, 2, 3):
        res = critical_theta1plus_pure(J, n_grid=8)
        assert res.censored is None and res.value < 1.0, (J, res)
    # ... and above it from four traders on (mixed witness at unit noise
    # lower-bounds the sup)
    for J in range(4, 11):
        sol = detect_regime(MarketParams(theta_1plus=1.0, theta_2=1.0,
                                         theta_eps=0.0, j2=J))
        assert sol.found and sol.regime is Regime.MIXED, J
    _report("7a", f"regime boundary below unit fast noise up to three "
                  f"unwinding traders, above it from four "
                  f"({time.time() - t0:.0f}s)")


def test_criterion_7b_inverse_role_boundary_direction_as_stated():
    """As stated, the role-inversion boundary should decrease with the
    unwinding count at fixed total population.  The measured boundary does
    the opposite (it decreases with the zero-aversion count instead), which
    also matches the companion quantitative claim tested below; both cannot
    hold at once.  This test keeps the stated direction and is expected to
    fail -- see the decisions ledger."""
    t0 = time.time()
    irt = {j2: inverse_rt_boundary(10 - j2, j2, 0.0).value for j2 in (3, 6, 9)}
    try:
        assert irt[3] > irt[6] > irt[9] > 0.0, irt
    except AssertionError:
        print(f"\nACCEPTANCE 7b: FAIL - boundary values {irt} increase with "
              f"the unwinding count; the stated direction contradicts the "
              f"measured one ({time.time() - t0:.0f}s)")
        raise
    _report("7b", f"inversion boundary decreasing in the unwinding count "
                  f"({time.time() - t0:.0f}s)")


def test_criterion_7b_companion_inversion_near_zero_at_many_zero_aversion():
    """Companion quantitative claim: with many zero-aversion traders the
    inversion boundary is close to zero but strictly positive, i.e. the
    boundary falls as the zero-aversion count grows."""
    t0 = time.time()
    irt = {j2: inverse_rt_boundary(10 - j2, j2, 0.0).value for j2 in (3, 9)}
    assert 0.0 < irt[3] < 1e-2, irt
    assert irt[3] < irt[9], irt
    _report("7b-companion",
            f"inversion boundary strictly positive and near zero with many "
            f"zero-aversion traders: {irt[3]:.2e} at nine of ten "
            f"({time.time() - t0:.0f}s)")


def test_criterion_7c_existence_boundary():
    t0 = time.time()
    for j1, j2 in ((1, 9), (5, 5)):
        ex = existence_boundary(j1, j2, 0.0)
        assert 0.0 < ex.value < 1.0, (j1, j2, ex)
    _report("7c", f"existence boundary positive and finite for mixed "
                  f"populations ({time.time() - t0:.0f}s)")


def test_criterion_7d_profit_threshold_ordering():
    t0 = time.time()
    for J, t1p in ((1, 1.0), (5, 0.25)):
        tilde, hat = profit_thresholds(J, t1p)
        assert hat.value >= tilde.value, (J, t1p, tilde, hat)
    _report("7d", f"profit thresholds ordered (decline sets in no earlier "
                  f"than the gain) ({time.time() - t0:.0f}s)")


# -- 8: comparative statics ---------------------------------------------------------

def test_criterion_8_comparative_statics():
    t0 = time.time()
    # informed profit strictly increasing in the fast-noise size
    warm = None
    last = -math.inf
    for t1p in np.geomspace(0.05, 2.0, 16):
        sol = solve_point(MarketParams(theta_1plus=float(t1p), theta_2=1.0,
                                       theta_eps=0.5, j2=2), init=warm)
        assert sol.found, t1p
        warm = sol.profile
        profit = expected_profits(sol).it_profit
        assert profit > last, (t1p, profit, last)
        last = profit
    # faster anticipation widens the mixed region and raises randomization
    for t1p in (0.1, 1.0):
        warm = None
        for se in np.linspace(0.0, 2.0, 17):
            te = float(se * se)
            try:
                lim = limit_small_it(1, te, 1.0, Regime.MIXED)
                bench_tz = lim.theta_z
            except RegimeMismatchError:
                bench_tz = None
            sol = solve_point(MarketParams(theta_1plus=t1p, theta_2=1.0,
                                           theta_eps=te, j1=1), init=warm)
            assert sol.found, (t1p, te)
            warm = sol.profile
            if bench_tz is not None:
                assert sol.regime is Regime.MIXED, (t1p, te)
                assert sol.profile.theta_z >= bench_tz - 1e-9, (t1p, te)
    _report(8, f"comparative statics hold (profit monotone in fast noise, "
               f"mixed region and intensity dominate the vanishing-noise "
               f"benchmark) in {time.time() - t0:.0f}s")


# -- 9: determinism and scale invariance ---------------------------------------------

def test_criterion_9_determinism_and_scale():
    from kyle_eq.sweep import Axis, SweepConfig, run_sweep, rows_to_csv, sweep_columns
    from kyle_eq.svg import line_svg

    config = SweepConfig(j1=1, axis1=Axis("theta_eps", 0.0, 1.0, 4))
    rows1, rows2 = run_sweep(config), run_sweep(config)
    cols = sweep_columns(config)
    assert rows_to_csv(rows1, cols) == rows_to_csv(rows2, cols)
    svg1 = line_svg(rows1, "theta_eps", ["theta_z"])
    svg2 = line_svg(rows2, "theta_eps", ["theta_z"])
    assert svg1 == svg2

    sim_a = simulate_market(detect_regime(config.at()), 10 ** 5, seed=3)
    sim_b = simulate_market(detect_regime(config.at()), 10 ** 5, seed=3)
    assert sim_a.lambda_hat == sim_b.lambda_hat

    base = RawParams(sigma_v=1.0, sigma_1=1.0, sigma_1plus=0.9, sigma_2=1.2,
                     sigma_eps=0.4, gammas=(0.0, math.inf))
    scaled = RawParams(sigma_v=2.0, sigma_1=3.0, sigma_1plus=2.7, sigma_2=3.6,
                       sigma_eps=1.2, gammas=(0.0, math.inf))
    s1 = detect_regime(to_dimensionless(base))
    s2 = detect_regime(to_dimensionless(scaled))
    for f in COEFFS:
        assert abs(getattr(s1.profile, f) - getattr(s2.profile, f)) <= 1e-10, f
    _report(9, "byte-identical reruns; dimensionless solution invariant to "
               "rescaling within 1e-10")
