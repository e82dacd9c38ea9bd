"""Bisection finders for the critical parameters: the aversion level that
flips an anticipatory trader's role, the fast-noise sizes bounding the mixed
region, the signal-noise levels bounding the informed trader's profit gains,
and the boundaries of role inversion and equilibrium existence in mixed
populations.  Searches run on square-root-scaled axes, matching how the
quantities enter the noise variances and conditioning the bisection near 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple

import numpy as np

from .equilibrium import EquilibriumSolution, solve_point, solve_regime
from .errors import KyleEqError
from .params import MarketParams, Regime
from .profits import benchmark_it_profit, expected_profits

BRACKET_REL_TOL = 1e-6


class MonotonicityViolation(KyleEqError):
    """A monitored quantity that a stated result requires to change sign
    failed to do so over the search range."""


@dataclass(frozen=True)
class ThresholdResult:
    kind: str
    value: float
    bracket: Tuple[float, float]
    monitored: str
    censored: Optional[str] = None   # None | "left" | "right"

    def ok_bracket(self) -> bool:
        lo, hi = self.bracket
        return hi - lo <= BRACKET_REL_TOL * max(1.0, abs(self.value)) or self.censored


def _sqrt_bisect(f: Callable[[float], float], lo: float, hi: float,
                 f_lo: float, f_hi: float,
                 rel_tol: float = BRACKET_REL_TOL) -> Tuple[float, float]:
    """Bisection on the sqrt-scaled axis; f(lo), f(hi) must differ in sign."""
    if f_lo == 0.0:
        return lo, lo
    if f_hi == 0.0:
        return hi, hi
    if f_lo * f_hi > 0.0:
        raise MonotonicityViolation(
            f"no sign change on [{lo:g}, {hi:g}]: f={f_lo:g}, {f_hi:g}")
    s_lo, s_hi = math.sqrt(lo), math.sqrt(hi)
    for _ in range(80):
        if (s_hi * s_hi - s_lo * s_lo) <= rel_tol * max(1.0, s_hi * s_hi):
            break
        s_mid = 0.5 * (s_lo + s_hi)
        f_mid = f(s_mid * s_mid)
        if f_mid == 0.0:
            return s_mid * s_mid, s_mid * s_mid
        if f_mid * f_lo < 0.0:
            s_hi = s_mid
        else:
            s_lo, f_lo = s_mid, f_mid
    return s_lo * s_lo, s_hi * s_hi


# -- role-flipping aversion ----------------------------------------------------

def second_trade_direction(sol: EquilibriumSolution) -> float:
    """Loading of the single trader's second order on the informed residual."""
    p = sol.profile
    return p.beta21 + p.beta23 * p.beta11


def critical_gamma(theta_1plus: float, theta_2: float, theta_eps: float,
                   gamma_cap: float = 1e6) -> ThresholdResult:
    """Aversion level at which the single trader stops accumulating and
    starts unwinding (sign change of her second-trade direction)."""
    warm: dict = {}

    def direction(gamma: float) -> float:
        params = MarketParams(theta_1plus=theta_1plus, theta_2=theta_2,
                              theta_eps=theta_eps, gamma=gamma)
        sol = solve_point(params, init=warm.get("p"))
        if not sol.found:
            raise KyleEqError(f"no equilibrium at gamma={gamma:g}")
        warm["p"] = sol.profile
        return second_trade_direction(sol)

    d0 = direction(0.0)
    if d0 <= 0.0:
        raise MonotonicityViolation("second trade already unwinds at zero aversion")
    hi, d_hi = 1.0, direction(1.0)
    while d_hi > 0.0 and hi < gamma_cap:
        hi *= 2.0
        d_hi = direction(hi)
    if d_hi > 0.0:
        # by the unwind reduction the direction is negative at infinite
        # aversion, so a finite switch above the cap is right-censored
        return ThresholdResult(kind="gamma_bar", value=hi, bracket=(hi, math.inf),
                               monitored="second-trade direction coefficient",
                               censored="right")
    lo, hi = _sqrt_bisect(direction, hi / 2.0 if hi > 1.0 else 0.0, hi,
                          d0 if hi <= 1.0 else direction(hi / 2.0), d_hi)
    return ThresholdResult(kind="gamma_bar", value=0.5 * (lo + hi),
                           bracket=(lo, hi),
                           monitored="second-trade direction coefficient")


# -- mixed/pure boundary in the fast-noise size --------------------------------

class _RegimeProbe:
    """Warm-started, hint-directed regime classifier along a one-parameter
    family; returns +1 for pure, -1 for mixed."""

    def __init__(self, params_of: Callable[[float], MarketParams]):
        self.params_of = params_of
        self.warm = {Regime.MIXED: None, Regime.PURE: None}
        self.last = None

    def __call__(self, theta: float) -> float:
        params = self.params_of(theta)
        hint = self.last
        init = self.warm.get(hint) if hint is not None else None
        sol = solve_point(params, regime_hint=hint, init=init, n_starts=0)
        if not sol.found:
            sol = solve_point(params)
        if not sol.found:
            if sol.residual_norm < 1e-9:
                # a root converged but sits exactly on the acceptance floors:
                # the probe landed on the regime boundary itself
                return 0.0
            raise KyleEqError(f"no equilibrium while probing at {theta:g}")
        self.warm[sol.regime] = sol.profile
        self.last = sol.regime
        return 1.0 if sol.regime is Regime.PURE else -1.0


def mixed_pure_boundary(params_of: Callable[[float], MarketParams],
                        lo: float, hi: float) -> Optional[ThresholdResult]:
    """Boundary in theta_1plus between the mixed and pure regimes along
    params_of(theta_1plus); None when the whole range is one regime."""
    probe = _RegimeProbe(params_of)
    probe.last = Regime.MIXED
    t_lo = probe(lo)
    probe.last = Regime.PURE
    t_hi = probe(hi)
    if t_lo * t_hi > 0.0:
        return None
    b_lo, b_hi = _sqrt_bisect(probe, lo, hi, t_lo, t_hi)
    return ThresholdResult(kind="mixed_pure_boundary", value=0.5 * (b_lo + b_hi),
                           bracket=(b_lo, b_hi),
                           monitored="regime indicator (pure=+1, mixed=-1)")


def critical_theta1plus_pure(J: int, theta_eps_max: float = 4.0,
                             theta_2: float = 1.0, n_grid: int = 64,
                             lo: float = 1e-3, cap: float = 4.0) -> ThresholdResult:
    """Smallest fast-noise size above which the informed trader plays pure
    for every signal noise level: the sup over signal noise of the per-level
    mixed/pure boundary (J unwinding traders)."""
    sqrt_grid = np.linspace(0.0, math.sqrt(theta_eps_max), n_grid)
    best = 0.0
    bracket = (0.0, 0.0)
    censored = None
    for se in sqrt_grid:
        te = se * se

        def make(theta):
            return MarketParams(theta_1plus=theta, theta_2=theta_2,
                                theta_eps=te, j2=J)

        res = None
        try:
            res = mixed_pure_boundary(make, lo, cap)
        except KyleEqError:
            continue
        if res is None:
            cap_sol = solve_point(make(cap))
            if cap_sol.found and cap_sol.regime is Regime.MIXED:
                best = cap
                bracket = (cap, math.inf)
                censored = "right"
            continue
        if res.value > best:
            best = res.value
            bracket = res.bracket
    return ThresholdResult(kind="theta_bar_1plus", value=best, bracket=bracket,
                           monitored="sup over signal noise of the regime boundary",
                           censored=censored)


# -- informed-profit thresholds in signal noise ---------------------------------

def profit_thresholds(J: int, theta_1plus: float, theta_2: float = 1.0,
                      theta_eps_max: float = 8.0,
                      n_grid: int = 33) -> Tuple[ThresholdResult, ThresholdResult]:
    """(signal noise above which the informed gains vs the no-HFT market,
    signal noise above which her profit decreases) for J unwinding traders."""
    bench = benchmark_it_profit(theta_2)
    warm: dict = {}

    def solve_at(te: float) -> EquilibriumSolution:
        params = MarketParams(theta_1plus=theta_1plus, theta_2=theta_2,
                              theta_eps=te, j2=J)
        sol = solve_point(params, init=warm.get("p"))
        if not sol.found:
            raise KyleEqError(f"no equilibrium at theta_eps={te:g}")
        warm["p"] = sol.profile
        return sol

    def gain(te: float) -> float:
        return expected_profits(solve_at(te)).it_profit - bench

    def dprofit(te: float) -> float:
        s = math.sqrt(te)
        h = 1e-3
        s_lo = max(s - h, 0.0)
        lo_v = expected_profits(solve_at(s_lo * s_lo)).it_profit
        hi_v = expected_profits(solve_at((s + h) ** 2)).it_profit
        return (hi_v - lo_v) / (s + h - s_lo)

    sqrt_grid = np.linspace(0.0, math.sqrt(theta_eps_max), n_grid)
    gains = [gain(s * s) for s in sqrt_grid]

    if gains[0] >= 0.0:
        tilde = ThresholdResult(kind="theta_tilde_eps", value=0.0,
                                bracket=(0.0, 0.0),
                                monitored="informed profit minus no-HFT benchmark")
    else:
        idx = next((i for i in range(len(gains) - 1)
                    if gains[i] < 0.0 <= gains[i + 1]), None)
        if idx is None:
            tilde = ThresholdResult(kind="theta_tilde_eps",
                                    value=theta_eps_max,
                                    bracket=(theta_eps_max, math.inf),
                                    monitored="informed profit minus no-HFT benchmark",
                                    censored="right")
        else:
            lo, hi = _sqrt_bisect(gain, sqrt_grid[idx] ** 2,
                                  sqrt_grid[idx + 1] ** 2,
                                  gains[idx], gains[idx + 1])
            tilde = ThresholdResult(kind="theta_tilde_eps", value=0.5 * (lo + hi),
                                    bracket=(lo, hi),
                                    monitored="informed profit minus no-HFT benchmark")

    derivs = [dprofit(s * s) for s in sqrt_grid[1:]]
    cross = None
    for i in range(len(derivs) - 1, 0, -1):
        if derivs[i - 1] > 0.0 >= derivs[i]:
            cross = i
            break
    if derivs[0] <= 0.0 and cross is None:
        hat = ThresholdResult(kind="theta_hat_eps", value=0.0, bracket=(0.0, 0.0),
                              monitored="derivative of informed profit in signal noise")
    elif cross is None:
        hat = ThresholdResult(kind="theta_hat_eps", value=theta_eps_max,
                              bracket=(theta_eps_max, math.inf),
                              monitored="derivative of informed profit in signal noise",
                              censored="right")
    else:
        lo, hi = _sqrt_bisect(dprofit, sqrt_grid[cross] ** 2,
                              sqrt_grid[cross + 1] ** 2,
                              derivs[cross - 1], derivs[cross])
        hat = ThresholdResult(kind="theta_hat_eps", value=0.5 * (lo + hi),
                              bracket=(lo, hi),
                              monitored="derivative of informed profit in signal noise")
    if hat.value < tilde.value:
        hat = replace(hat, value=tilde.value, bracket=tilde.bracket)
    return tilde, hat


# -- mixed-population boundaries ------------------------------------------------

def inverse_rt_boundary(j1: int, j2: int, theta_eps: float,
                        theta_2: float = 1.0, lo: Optional[float] = None,
                        hi: float = 1.0) -> ThresholdResult:
    """Fast-noise size below which the zero-aversion traders trade against
    the informed order at the fast stage (their first-stage intensity
    changes sign)."""
    warm: dict = {}

    def beta11(theta: float) -> float:
        params = MarketParams(theta_1plus=theta, theta_2=theta_2,
                              theta_eps=theta_eps, j1=j1, j2=j2)
        sol = solve_point(params, init=warm.get("p"))
        if not sol.found:
            raise KyleEqError(f"no equilibrium at theta_1plus={theta:g}")
        warm["p"] = sol.profile
        return sol.profile.beta11

    if lo is None:
        exist = existence_boundary(j1, j2, theta_eps, theta_2=theta_2, hi=hi)
        lo = exist.bracket[1] * 1.05
    b_lo, b_hi = beta11(lo), beta11(hi)
    lo_t, hi_t = _sqrt_bisect(beta11, lo, hi, b_lo, b_hi)
    return ThresholdResult(kind="inverse_rt_boundary", value=0.5 * (lo_t + hi_t),
                           bracket=(lo_t, hi_t),
                           monitored="zero-aversion first-stage intensity")


def existence_boundary(j1: int, j2: int, theta_eps: float,
                       theta_2: float = 1.0, lo: float = 1e-4,
                       hi: float = 1.0) -> ThresholdResult:
    """Fast-noise size below which no equilibrium exists (mixed populations)."""
    warm: dict = {}

    def exists(theta: float) -> float:
        params = MarketParams(theta_1plus=theta, theta_2=theta_2,
                              theta_eps=theta_eps, j1=j1, j2=j2)
        sol = solve_point(params, init=warm.get("p"))
        if sol.found:
            warm["p"] = sol.profile
            return 1.0
        return -1.0

    f_hi = exists(hi)
    if f_hi < 0.0:
        raise KyleEqError(f"no equilibrium even at theta_1plus={hi:g}")
    f_lo = exists(lo)
    if f_lo > 0.0:
        return ThresholdResult(kind="existence_boundary", value=lo,
                               bracket=(0.0, lo),
                               monitored="equilibrium existence indicator",
                               censored="left")
    lo_t, hi_t = _sqrt_bisect(exists, lo, hi, f_lo, f_hi, rel_tol=1e-4)
    return ThresholdResult(kind="existence_boundary", value=0.5 * (lo_t + hi_t),
                           bracket=(lo_t, hi_t),
                           monitored="equilibrium existence indicator")
