import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kyle_eq import (MarketParams, Regime, ShockBasis, StrategyProfile,
                     flow_moments, price_impact)
from kyle_eq.errors import CollinearFlowError
from kyle_eq.limits import limit_small_it


def test_classic_first_period_impact():
    p = MarketParams(theta_1plus=1.0, theta_2=1.0, theta_eps=0.0)
    prof = StrategyProfile(a1=1.0, theta_z=0.0, a21=1.0, alpha22=0.0)
    assert price_impact(prof, p).lambda1 == pytest.approx(0.5, abs=1e-15)


def test_pure_noise_fast_flow_has_zero_impact():
    p = MarketParams(theta_1plus=1.0, theta_2=1.0, theta_eps=0.5, j1=2)
    prof = StrategyProfile(a1=0.7, theta_z=0.0, a21=1.0, alpha22=0.0,
                           beta11=0.0, beta21=0.3)
    assert price_impact(prof, p).lambda1plus == 0.0


def test_limit_prices_match_closed_form():
    # two zero-aversion traders at the vanishing-fast-noise mixed limit
    lim = limit_small_it(2, 0.0, 1.0, Regime.MIXED)
    assert lim.lambda1 == pytest.approx(0.4, abs=1e-12)
    assert lim.lambda22 == pytest.approx(0.4, abs=1e-12)


coef = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


@given(a1=st.floats(min_value=0.2, max_value=2.0), b11=coef, b21=coef,
       b22=coef, b23=coef,
       tz=st.floats(min_value=0.0, max_value=0.5))
@settings(max_examples=80, deadline=None)
def test_weak_efficiency_orthogonality(a1, b11, b21, b22, b23, tz):
    """E[(v - p_t) y_t] = 0 for each stage: prices are projections."""
    p = MarketParams(theta_1plus=0.8, theta_2=1.1, theta_eps=0.3, j1=2)
    prof = StrategyProfile(a1=a1, theta_z=tz, a21=1.1, alpha22=-0.4,
                           beta11=b11, beta21=b21, beta22=b22, beta23=b23)
    pr = price_impact(prof, p, flow_moments(prof, p))
    b = ShockBasis(prof, p)
    p1 = pr.lambda1 * b.y1
    p1p = p1 + pr.lambda1plus * b.y1plus
    p2 = p1 + pr.lambda21 * b.y1plus + pr.lambda22 * b.y2
    assert abs(b.cov(b.v - p1, b.y1)) < 1e-12
    assert abs(b.cov(b.v - p1p, b.y1plus)) < 1e-12
    # time-2 weak efficiency is joint in both later flows
    assert abs(b.cov(b.v - p2, b.y1plus)) < 1e-12
    assert abs(b.cov(b.v - p2, b.y2)) < 1e-12


def test_mixed_solutions_have_equal_first_and_last_impacts(sol_small_it_j1):
    pr = sol_small_it_j1.pricing
    assert sol_small_it_j1.regime is Regime.MIXED
    assert abs(pr.lambda22 - pr.lambda1) <= 1e-9


def test_collinear_flows_raise():
    # a single trader with no signal noise and no fast noise would make
    # y_1plus and the informed part of y_2 collinear; force near-collinearity
    # by duplicating y_1plus into y_2 through beta22
    p = MarketParams(theta_1plus=1.0, theta_2=1e-14, theta_eps=0.0, j1=1)
    prof = StrategyProfile(a1=1e-7, theta_z=0.0, a21=1e-9, alpha22=0.0,
                           beta11=1e-7, beta21=0.0, beta22=1.0, beta23=1.0)
    with pytest.raises(CollinearFlowError):
        price_impact(prof, p, flow_moments(prof, p))
