import math

import numpy as np
import pytest

from kyle_eq import (MarketParams, Regime, detect_regime, solve_specialized)
from kyle_eq.specialized import build_reduced_system

COEFFS = ("a1", "theta_z", "a21", "alpha22", "beta11", "beta21", "beta22",
          "beta23", "beta12")


def _agree(params, tol=1e-7):
    g = detect_regime(params)
    assert g.found, params
    s = solve_specialized(params, regime_hint=g.regime)
    assert s.found, params
    assert s.regime is g.regime
    worst = max(abs(getattr(g.profile, f) - getattr(s.profile, f))
                for f in COEFFS)
    assert worst <= tol, (params, worst)
    return g, s


def test_single_zero_aversion_agreement():
    _agree(MarketParams(theta_1plus=1.0, theta_2=1.0, theta_eps=0.0, j1=1))
    _agree(MarketParams(theta_1plus=1.0, theta_2=1.0, theta_eps=4.0, j1=1))


def test_populations_with_third_parties_agree():
    """Three-or-more traders exercise the third-party projection sums whose
    count is max(J-2, 0); agreement validates that reading."""
    _agree(MarketParams(theta_1plus=0.5, theta_2=1.2, theta_eps=0.3, j1=3))
    _agree(MarketParams(theta_1plus=0.5, theta_2=1.0, theta_eps=0.3, j1=4))
    _agree(MarketParams(theta_1plus=0.8, theta_2=1.0, theta_eps=0.5, j1=2, j2=2))


def test_unwinding_population_agreement():
    g, s = _agree(MarketParams(theta_1plus=1.0, theta_2=1.0, theta_eps=0.0, j2=1))
    assert s.profile.beta12 > 0.0
    _, b21, b22, b23, _ = s.profile.expand(s.params)
    assert b21[0] == 0.0 and b22[0] == 0.0 and b23[0] == -1.0
    _agree(MarketParams(theta_1plus=0.05, theta_2=1.0, theta_eps=0.2, j2=3))


def test_unwinding_mixed_regime_bounds():
    params = MarketParams(theta_1plus=0.05, theta_2=1.0, theta_eps=0.2, j2=3)
    s = solve_specialized(params, regime_hint=Regime.MIXED)
    assert s.regime is Regime.MIXED
    # the indifference system forces the informed first stage plus noise
    # below the prior variance
    assert s.profile.a1 ** 2 + s.profile.theta_z < 1.0


def test_unwinding_pure_regime_fast_impact_positive():
    params = MarketParams(theta_1plus=1.0, theta_2=1.0, theta_eps=0.3, j2=2)
    s = solve_specialized(params, regime_hint=Regime.PURE)
    assert s.regime is Regime.PURE
    assert s.pricing.lambda21 > 0.0


def test_general_aversion_agreement():
    _agree(MarketParams(theta_1plus=1.0, theta_2=1.0, theta_eps=0.5, gamma=0.7))
    _agree(MarketParams(theta_1plus=1.0, theta_2=1.0, theta_eps=0.5, gamma=0.05))


def test_reduced_residual_vanishes_at_general_solution(sol_mixed_pop):
    system = build_reduced_system(sol_mixed_pop.params, sol_mixed_pop.regime)
    x = system.from_profile(sol_mixed_pop.profile)
    res = system.residual(x)
    assert np.max(np.abs(res)) < 1e-8
