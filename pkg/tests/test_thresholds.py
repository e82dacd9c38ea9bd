import math

import pytest

from kyle_eq import (MarketParams, Regime, critical_gamma, detect_regime,
                     mixed_pure_boundary)
from kyle_eq.thresholds import second_trade_direction


@pytest.fixture(scope="module")
def gamma_bar():
    return critical_gamma(1.0, 1.0, 0.0)


def test_critical_gamma_bracket(gamma_bar):
    lo, hi = gamma_bar.bracket
    assert 0.0 < lo <= gamma_bar.value <= hi
    assert hi - lo <= 1e-6 * max(1.0, gamma_bar.value)

    def direction(g):
        sol = detect_regime(MarketParams(theta_1plus=1.0, theta_2=1.0,
                                         theta_eps=0.0, gamma=g))
        return second_trade_direction(sol)

    assert direction(lo) > 0.0
    assert direction(hi) < 0.0


def test_roles_flip_across_gamma_bar(gamma_bar):
    below = detect_regime(MarketParams(theta_1plus=1.0, theta_2=1.0,
                                       theta_eps=0.0,
                                       gamma=gamma_bar.value * 0.5))
    assert second_trade_direction(below) > 0.0
    above = detect_regime(MarketParams(theta_1plus=1.0, theta_2=1.0,
                                       theta_eps=0.0,
                                       gamma=gamma_bar.value * 2.0))
    assert second_trade_direction(above) < 0.0


def test_zero_aversion_market_has_no_existence_boundary():
    """Zero-aversion-only markets stay solvable down to vanishing fast
    noise (the limit is analytic), unlike mixed populations."""
    for t in (1e-2, 1e-4, 1e-6):
        sol = detect_regime(MarketParams(theta_1plus=t, theta_2=1.0,
                                         theta_eps=0.0, j1=2))
        assert sol.found, t


def test_profit_gain_anchors():
    """With active fast noise the informed trader gains from a single
    unwinding trader even at perfect prediction; with scarce fast noise the
    gain needs signal noise about four times the time-1 noise variance
    (sigma_eps around twice sigma_1, +/-25%)."""
    from kyle_eq.equilibrium import solve_point
    from kyle_eq.profits import benchmark_it_profit, expected_profits

    bench = benchmark_it_profit(1.0)

    def gain(t1p, te, warm=None):
        sol = solve_point(MarketParams(theta_1plus=t1p, theta_2=1.0,
                                       theta_eps=te, j2=1), init=warm)
        assert sol.found
        return expected_profits(sol).it_profit - bench, sol.profile

    g, _ = gain(1.0, 0.0)
    assert g > 0.0
    g3, warm = gain(0.01, 3.0)
    g5, _ = gain(0.01, 5.0, warm)
    assert g3 < 0.0 < g5


def test_regime_boundary_matches_direct_probes():
    def make(theta):
        return MarketParams(theta_1plus=theta, theta_2=1.0, theta_eps=0.0, j2=1)

    res = mixed_pure_boundary(make, 1e-3, 1.0)
    assert res is not None
    lo, hi = res.bracket
    assert detect_regime(make(max(lo * 0.8, 1e-4))).regime is Regime.MIXED
    assert detect_regime(make(min(hi * 1.2, 1.0))).regime is Regime.PURE
