import math

import numpy as np
import pytest

from kyle_eq import (MarketParams, Regime, detect_regime, limit_round_tripper,
                     limit_small_it)
from kyle_eq.errors import RegimeMismatchError
from kyle_eq.limits import _rt_mixed_system
from kyle_eq.moments import ShockBasis


def test_two_trader_mixed_limit_values():
    lim = limit_small_it(2, 0.0, 1.0, Regime.MIXED)
    assert lim.theta_z == pytest.approx(0.14, abs=1e-12)
    assert lim.a1 == pytest.approx(0.6, abs=1e-12)
    assert lim.a21 == pytest.approx(1.25, abs=1e-12)
    assert lim.alpha22 == pytest.approx(-0.75, abs=1e-12)
    assert lim.beta21 == pytest.approx(0.75, abs=1e-12)
    assert lim.lambda1 == pytest.approx(0.4, abs=1e-12)


def test_one_trader_mixed_limit_values():
    lim = limit_small_it(1, 0.0, 1.0, Regime.MIXED)
    assert lim.theta_z == pytest.approx(1.0 / 39.0, abs=1e-12)
    assert lim.a1 == pytest.approx(1.0 / math.sqrt(3.25), abs=1e-12)


def test_mixed_limit_requires_positive_intensity():
    # the randomization expression is negative once the signal is noisy
    with pytest.raises(RegimeMismatchError):
        limit_small_it(1, 2.0, 1.0, Regime.MIXED)


def test_pure_limit_root_admissible():
    lim = limit_small_it(1, 2.0, 1.0, Regime.PURE)
    assert lim.a1 > 0.0 and lim.theta_z == 0.0
    assert lim.lambda22 > 0.0


def test_unwinding_limit_consistency():
    lim = limit_round_tripper(1, 0.0, 1.0, Regime.MIXED)
    assert lim.zeta is not None and lim.zeta > 0.0
    res = _rt_mixed_system(np.array([lim.a1, lim.theta_z]), 1, 0.0, 1.0,
                           lim.zeta)
    assert np.max(np.abs(res)) < 1e-6
    assert lim.a1 ** 2 + lim.theta_z < 1.0


def test_unwinding_actions_vanish_along_path():
    """Trade sizes and the whole fast order flow vanish as the fast noise
    does: at theta_1plus = 1e-6 they are under 1% of their active-market
    scale.  (The fast price-impact coefficient diverges at the same rate, so
    the price jump keeps nonvanishing dispersion along the path; only the
    limit market itself has a degenerate fast flow.)"""
    sols = {}
    for t in (1.0, 1e-6):
        sols[t] = detect_regime(MarketParams(theta_1plus=t, theta_2=1.0,
                                             theta_eps=0.0, j2=1))
        assert sols[t].found
    scales = {}
    flows = {}
    for t, sol in sols.items():
        b = ShockBasis(sol.profile, sol.params)
        scales[t] = math.sqrt(b.var(b.x1[0]))
        flows[t] = math.sqrt(b.var(b.y1plus))
    assert scales[1e-6] < 1e-2 * scales[1.0]
    assert flows[1e-6] < 1e-2 * flows[1.0]


def test_limit_matches_small_theta_solve():
    lim = limit_round_tripper(1, 0.0, 1.0, Regime.MIXED)
    sol = detect_regime(MarketParams(theta_1plus=1e-6, theta_2=1.0,
                                     theta_eps=0.0, j2=1))
    assert sol.regime is Regime.MIXED
    assert sol.profile.a1 == pytest.approx(lim.a1, rel=1e-3)
    assert sol.profile.theta_z == pytest.approx(lim.theta_z, rel=1e-2)
    assert sol.profile.beta12 / math.sqrt(1e-6) == pytest.approx(lim.zeta,
                                                                 rel=1e-2)


def test_pure_unwinding_limit():
    lim = limit_round_tripper(2, 0.5, 1.0, Regime.PURE)
    assert lim.theta_z == 0.0 and lim.a1 > 0.0 and lim.lambda22 > 0.0
    sol = detect_regime(MarketParams(theta_1plus=1e-6, theta_2=1.0,
                                     theta_eps=0.5, j2=2))
    assert sol.regime is Regime.PURE
    assert sol.profile.a1 == pytest.approx(lim.a1, rel=1e-3)
    assert sol.pricing.lambda22 == pytest.approx(lim.lambda22, rel=1e-3)
