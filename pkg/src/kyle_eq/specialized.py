"""Per-configuration reduced equilibrium systems.

Each configuration/regime pair gets a reduced unknown vector; all remaining
coefficients come from the configuration's solved-form displays (the mixed
indifference pins lambda_22 = lambda_1 and alpha_22 = -(1+A_1^2+theta_z)/2,
the second-stage impact pins A_21 = 1/(2 lambda_22), and so on).  The
residuals close the system with the projection consistency of
(lambda_21, lambda_22) and the stage fixed points written in expanded form:
rival reactions decomposed over third-party signal projections (the
sum over l != j,k carries the max(J-2, 0) count) rather than the compact
rival-flow grouping used by the general solver.  Agreement between the two
paths is a regression check, not an accident.

The all-unwinding configuration additionally carries its fully eliminated
polynomial systems, transcribed verbatim.
"""

from __future__ import annotations

import math
from typing import Callable, List, Optional

import numpy as np

from . import best_response as br
from .equilibrium import (EquilibriumSolution, _benchmark_start, _limit_start,
                          _multi_start_bounds_named, solve_point)
from .errors import KyleEqError
from .moments import flow_moments
from .newton import damped_newton, RESIDUAL_TOL
from .params import Config, MarketParams, Regime, StrategyProfile, validate_population
from .pricing import price_impact


# -- expanded-form stage updates ---------------------------------------------

def _expanded_second_stage(profile: StrategyProfile, lam21: float, lam22: float,
                           params: MarketParams, j: int,
                           geom: br.HftSignalGeometry):
    """Second-stage update with rival reactions expanded over third-party
    projections; numerators only (no own-aversion division)."""
    beta1, b21, b22, b23, _ = profile.expand(params)
    J = len(beta1)
    one = 1.0 - lam22 * profile.a21

    s_sum = 0.0
    r_sum = 0.0
    for k in range(J):
        if k == j:
            continue
        direct = b21[k] + b23[k] * beta1[k]
        third_s = sum(beta1[l] * geom.theta21[l] for l in range(J) if l not in (j, k))
        third_r = sum(beta1[l] * geom.theta22[l] for l in range(J) if l not in (j, k))
        s_sum += direct * geom.theta21[k] + b22[k] * (third_s + geom.delta21)
        r_sum += direct * geom.theta22[k] + b22[k] * (third_r + geom.delta22)

    ns = one * geom.eta21 - lam22 * (profile.alpha22 * geom.mu21 + s_sum)
    nr = one * geom.eta22 - lam21 - lam22 * (profile.alpha22 * geom.mu22 + r_sum)
    return ns, nr


def _expanded_rt_first_stage(profile: StrategyProfile, pricing, params: MarketParams,
                             j: int) -> float:
    """Infinite-aversion first stage via the reduced unwind objective, with
    expanded numerators."""
    geom = br.hft_geometry(profile, params, j)
    beta1, _, b22, _, _ = profile.expand(params)
    lam1p, lam21, lam22 = pricing.lambda1plus, pricing.lambda21, pricing.lambda22
    rival_sum = sum(beta1) - beta1[j]
    rival_b22 = sum(b22) - b22[j]
    ns, nr = _expanded_second_stage(profile, lam21, lam22, params, j, geom)
    denom = 2.0 * (lam1p + lam22 - lam21 - lam22 * rival_b22)
    return (geom.eta - lam1p * geom.mu * rival_sum - ns - nr * geom.mu * rival_sum) / denom


def _expanded_finite_first_stage(profile: StrategyProfile, pricing,
                                 params: MarketParams, j: int, gamma: float) -> float:
    geom = br.hft_geometry(profile, params, j)
    beta1, b21, b22, b23, _ = profile.expand(params)
    lam1p, lam22 = pricing.lambda1plus, pricing.lambda22
    rival_sum = sum(beta1) - beta1[j]
    denom = 2.0 * (lam1p + gamma - (lam22 + gamma) * b23[j] ** 2)
    num = (geom.eta - lam1p * geom.mu * rival_sum
           + 2.0 * (lam22 + gamma) * b23[j] * (b21[j] + b22[j] * geom.mu * rival_sum))
    return num / denom


def _projection_lams(profile: StrategyProfile, params: MarketParams):
    m = flow_moments(profile, params)
    pr = price_impact(profile, params, m)
    return pr


# -- reduced systems ----------------------------------------------------------

class ReducedSystem:
    """A named reduced unknown vector with a residual and a profile map."""

    def __init__(self, params: MarketParams, regime: Regime, names: List[str],
                 residual: Callable[[np.ndarray], np.ndarray],
                 to_profile: Callable[[np.ndarray], StrategyProfile],
                 from_profile: Callable[[StrategyProfile], np.ndarray]):
        self.params = params
        self.regime = regime
        self.names = names
        self.n = len(names)
        self.residual = residual
        self.to_profile = to_profile
        self.from_profile = from_profile


def _mixed_closeout(a1: float, tz: float):
    """Mixed-regime solved-out quantities shared by every configuration."""
    D = a1 * a1 + tz + 1.0
    lam1 = a1 / D
    return D, lam1, 1.0 / (2.0 * lam1), -D / 2.0  # D, lam22=lam1, a21, alpha22


def _small_it_system(params: MarketParams, regime: Regime) -> ReducedSystem:
    J = params.j1

    if regime is Regime.MIXED:
        names = ["a1", "theta_z", "beta11", "beta21", "beta22", "beta23"]

        def to_profile(x):
            a1, tz, b11, b21, b22, b23 = x
            _, lam22, a21, alpha22 = _mixed_closeout(a1, tz)
            return StrategyProfile(a1=a1, theta_z=tz, a21=a21, alpha22=alpha22,
                                   beta11=b11, beta21=b21, beta22=b22, beta23=b23)

        def residual(x):
            a1, tz, b11, b21, b22, b23 = x
            if a1 <= 0.0 or tz < 0.0:
                raise KyleEqError("infeasible trial")
            D, lam22, a21, alpha22 = _mixed_closeout(a1, tz)
            profile = to_profile(x)
            # alpha_22 display solved for lambda_21
            lam21 = (a1 - a1 * J * (b11 * (b22 * (J - 1) + b23) + b21) / D) / (b11 * J)
            pr = _projection_lams(profile, params)
            geom = br.hft_geometry(profile, params, 0)
            ns, nr = _expanded_second_stage(profile, lam21, lam22, params, 0, geom)
            pricing_disp = _pricing_like(profile, params, lam21, lam22)
            b11_new = _expanded_finite_first_stage(profile, pricing_disp, params, 0, 0.0)
            return np.array([
                pr.lambda22 - lam22,
                pr.lambda21 - lam21,
                b21 - ns / (2.0 * lam22),
                b22 - nr / (2.0 * lam22),
                b23 - (-(lam21 + lam22 * (J - 1) * b22) / (2.0 * lam22)),
                b11 - b11_new,
            ])

        def from_profile(p):
            return np.array([p.a1, p.theta_z, p.beta11, p.beta21, p.beta22, p.beta23])

        return ReducedSystem(params, regime, names, residual, to_profile, from_profile)

    names = ["lambda21", "lambda22", "a1", "beta11", "beta21", "beta22"]

    def to_profile_pure(x):
        lam21, lam22, a1, b11, b21, b22 = x
        b23 = -(b22 * (J - 1) * lam22 + lam21) / (2.0 * lam22)
        a21 = 1.0 / (2.0 * lam22)
        alpha22 = -(b11 * J * lam21
                    + J * lam22 * (b21 + b23 * b11 + (J - 1) * b22 * b11)) / (2.0 * lam22)
        return StrategyProfile(a1=a1, theta_z=0.0, a21=a21, alpha22=alpha22,
                               beta11=b11, beta21=b21, beta22=b22, beta23=b23)

    def residual_pure(x):
        lam21, lam22, a1, b11, b21, b22 = x
        if a1 <= 0.0 or lam22 <= 0.0:
            raise KyleEqError("infeasible trial")
        profile = to_profile_pure(x)
        pr = _projection_lams(profile, params)
        geom = br.hft_geometry(profile, params, 0)
        ns, nr = _expanded_second_stage(profile, lam21, lam22, params, 0, geom)
        pricing_disp = _pricing_like(profile, params, lam21, lam22)
        b11_new = _expanded_finite_first_stage(profile, pricing_disp, params, 0, 0.0)
        stat = _pure_stationarity(profile, lam22)
        return np.array([
            pr.lambda22 - lam22,
            pr.lambda21 - lam21,
            b21 - ns / (2.0 * lam22),
            b22 - nr / (2.0 * lam22),
            b11 - b11_new,
            stat,
        ])

    def from_profile_pure(p):
        pr = _projection_lams(p, params)
        return np.array([pr.lambda21, pr.lambda22, p.a1, p.beta11, p.beta21, p.beta22])

    return ReducedSystem(params, regime, names, residual_pure, to_profile_pure,
                         from_profile_pure)


def _pricing_like(profile: StrategyProfile, params: MarketParams,
                  lam21: float, lam22: float):
    """Pricing rule carrying the display lambdas and the closed-form
    lambda_1, lambda_1plus."""
    from .pricing import PricingRule
    beta1, _, _, _, _ = profile.expand(params)
    a1, tz = profile.a1, profile.theta_z
    V = a1 * a1 + tz
    D = V + 1.0
    sb = sum(beta1)
    sb2 = sum(b * b for b in beta1)
    lam1p_den = V * (sb * sb + params.theta_eps * sb2 + params.theta_1plus) \
        + params.theta_eps * sb2 + params.theta_1plus
    lam1p = a1 * sb / lam1p_den if lam1p_den > 0 else 0.0
    return PricingRule(lambda1=a1 / D, lambda1plus=lam1p,
                       lambda21=lam21, lambda22=lam22)


def _pure_stationarity(profile: StrategyProfile, lam22: float) -> float:
    """First-stage stationarity residual in product form (no concavity
    division)."""
    a1 = profile.a1
    lam1 = a1 / (a1 * a1 + 1.0)
    G = (profile.alpha22 - profile.a21 * a1) / (a1 * a1 + 1.0)
    quad = lam1 - lam22 * G * G
    lin = 1.0 + 2.0 * lam22 * profile.a21 * G
    return 2.0 * quad * a1 - lin


# -- all-unwinding configuration: transcribed eliminated systems --------------

def _rt_mixed_polys(x: np.ndarray, J: int, te: float, t1p: float, t2: float):
    a1, tz, b12 = x
    A2, A4, A6, A8 = a1 ** 2, a1 ** 4, a1 ** 6, a1 ** 8
    T = tz + 1.0
    eq1 = (b12 ** 3 * J ** 2 * (J * (A4 * (4 * t1p + 4 * t2 - tz)
                                     - 2 * A2 * tz * (-2 * t1p - 2 * t2 + tz + 1) - tz * T ** 2)
                                + te * (A2 + T) * (A6 + A4 * (2 * tz + 1)
                                                   + A2 * (4 * t1p + 4 * t2 + tz ** 2 - 1) - T ** 2))
           + b12 ** 2 * J * (A2 + T) * (4 * A2 * J * (t1p * (2 * A2 + 2 * tz - 1)
                                                      + t2 * (A2 + tz - 1))
                                        + te * (A2 + T) * (A6 + A4 * (2 * tz - 1)
                                                           + A2 * (4 * t1p + 4 * t2 + tz ** 2 - 1) + T ** 2))
           + b12 * J * t1p * (A2 + T) * (5 * A6 + A4 * (10 * tz - 1)
                                         + A2 * (4 * t2 + 5 * tz ** 2 - 5) + T ** 2)
           + t1p * (A2 + T) ** 2 * (A6 + A4 * (2 * tz - 1) + A2 * (4 * t2 + tz ** 2 - 1) + T ** 2))
    eq2 = (4 * A2 * b12 * J * t1p * (A4 + 2 * A2 * tz + A2 + tz ** 2 + tz)
           + b12 ** 2 * J * (J * (A4 * (4 * t1p + 4 * t2 - tz)
                                  - 2 * A2 * tz * (-2 * t1p - 2 * t2 + tz + 1) - tz * T ** 2)
                             + te * (A2 + T) * (A6 + A4 * (2 * tz + 1)
                                                + A2 * (4 * t1p + 4 * t2 + tz ** 2 - 1) - T ** 2))
           + t1p * (A2 + T) * (A6 + A4 * (2 * tz + 1) + A2 * (4 * t2 + tz ** 2 - 1) - T ** 2))
    eq3 = (A4 * t1p * (4 * te + J + 2)
           + 2 * A2 * t1p * (4 * te * T + J * tz + J + 2 * tz + 1)
           + b12 ** 2 * (A4 * J * (te + J) * (4 * te + J + 2)
                         + A2 * J * (8 * te ** 2 * T + 2 * te * (5 * J * tz + J + 2 * tz + 1)
                                     + J * (J + 2) * (2 * tz - 1))
                         + J * (4 * te ** 2 * T ** 2 + te * T * (J * (5 * tz - 3) + 2 * tz)
                                + J * (J + 2) * (tz - 1) * tz))
           + t1p * T * (4 * te * T + J * tz + J + 2 * tz))
    return eq1, eq2, eq3


def _rt_system(params: MarketParams, regime: Regime) -> ReducedSystem:
    J = params.j2
    te, t1p, t2 = params.theta_eps, params.theta_1plus, params.theta_2

    if regime is Regime.MIXED:
        names = ["a1", "theta_z", "beta12"]

        def to_profile(x):
            a1, tz, b12 = x
            _, lam22, a21, alpha22 = _mixed_closeout(a1, tz)
            return StrategyProfile(a1=a1, theta_z=tz, a21=a21, alpha22=alpha22,
                                   beta12=b12)

        def residual(x):
            a1, tz, b12 = x
            if a1 <= 0.0 or tz < 0.0 or b12 == 0.0:
                raise KyleEqError("infeasible trial")
            return np.asarray(_rt_mixed_polys(x, J, te, t1p, t2))

        def from_profile(p):
            return np.array([p.a1, p.theta_z, p.beta12])

        return ReducedSystem(params, regime, names, residual, to_profile, from_profile)

    names = ["lambda21", "lambda22", "a1", "beta12"]

    def to_profile_pure(x):
        lam21, lam22, a1, b12 = x
        a21 = 1.0 / (2.0 * lam22)
        alpha22 = -b12 * J * (lam21 - lam22) / (2.0 * lam22)
        return StrategyProfile(a1=a1, theta_z=0.0, a21=a21, alpha22=alpha22, beta12=b12)

    def residual_pure(x):
        lam21, lam22, a1, b12 = x
        if a1 <= 0.0 or lam22 <= 0.0 or b12 <= 0.0:
            raise KyleEqError("infeasible trial")
        dl = lam21 - lam22
        eq1 = (2 * a1 ** 4 * lam22
               + b12 * (a1 ** 2 * J * (lam22 - lam21) + J * dl)
               - a1 * b12 ** 2 * J ** 2 * dl ** 2 + a1 - 2 * lam22)
        eq2 = (b12 ** 2 * (-a1 ** 3 * J * (3 * te + J + 2) - 3 * a1 * te * J)
               + a1 ** 3 * t1p
               + b12 ** 3 * (a1 ** 4 * J * (te + J) * (4 * te + J + 2) * dl
                             + a1 ** 2 * te * J * (8 * te + 5 * J + 2) * dl
                             + 4 * te ** 2 * J * dl)
               + b12 * (a1 ** 4 * t1p * (4 * te + J + 2) * dl
                        + a1 ** 2 * t1p * (8 * te + J + 2) * dl
                        + 4 * te * t1p * dl)
               + a1 * t1p)
        eq4 = (a1 ** 2 * b12 ** 4 * te * J ** 3 * dl ** 2
               + b12 ** 2 * J * (te * (4 * (a1 ** 2 + 1) * lam22 ** 2 * (t1p + t2) - 1)
                                 + a1 ** 2 * J * (lam21 ** 2 * t1p + 2 * lam21 * lam22 * t1p
                                                  + lam22 ** 2 * (t1p + 4 * t2)))
               + t1p * (4 * (a1 ** 2 + 1) * lam22 ** 2 * t2 - 1))
        profile = to_profile_pure(x)
        pr = _projection_lams(profile, params)
        return np.array([eq1, eq2, eq4, pr.lambda21 - lam21])

    def from_profile_pure(p):
        pr = _projection_lams(p, params)
        return np.array([pr.lambda21, pr.lambda22, p.a1, p.beta12])

    return ReducedSystem(params, regime, names, residual_pure, to_profile_pure,
                         from_profile_pure)


# -- mixed population ---------------------------------------------------------

def _mixed_types_system(params: MarketParams, regime: Regime) -> ReducedSystem:
    J1, J2 = params.j1, params.j2

    if regime is Regime.MIXED:
        names = ["a1", "theta_z", "beta11", "beta21", "beta22", "beta23", "beta12"]

        def to_profile(x):
            a1, tz, b11, b21, b22, b23, b12 = x
            _, lam22, a21, alpha22 = _mixed_closeout(a1, tz)
            return StrategyProfile(a1=a1, theta_z=tz, a21=a21, alpha22=alpha22,
                                   beta11=b11, beta21=b21, beta22=b22, beta23=b23,
                                   beta12=b12)

        def residual(x):
            a1, tz, b11, b21, b22, b23, b12 = x
            if a1 <= 0.0 or tz < 0.0:
                raise KyleEqError("infeasible trial")
            D, lam22, a21, alpha22 = _mixed_closeout(a1, tz)
            lam21 = (a1 * (a1 * a1 - b11 * b22 * J1 * J1 + b11 * b22 * J1
                           - b11 * b23 * J1 - b12 * b22 * J1 * J2 + b12 * J2
                           - b21 * J1 + tz + 1.0)
                     / (D * (b11 * J1 + b12 * J2)))
            profile = to_profile(x)
            pr = _projection_lams(profile, params)
            pricing_disp = _pricing_like(profile, params, lam21, lam22)
            geom = br.hft_geometry(profile, params, 0)
            ns, nr = _expanded_second_stage(profile, lam21, lam22, params, 0, geom)
            b11_new = _expanded_finite_first_stage(profile, pricing_disp, params, 0, 0.0)
            b12_new = _expanded_rt_first_stage(profile, pricing_disp, params, J1)
            return np.array([
                pr.lambda22 - lam22,
                pr.lambda21 - lam21,
                b21 - ns / (2.0 * lam22),
                b22 - nr / (2.0 * lam22),
                b23 - (-(lam21 + lam22 * (J1 - 1) * b22) / (2.0 * lam22)),
                b11 - b11_new,
                b12 - b12_new,
            ])

        def from_profile(p):
            return np.array([p.a1, p.theta_z, p.beta11, p.beta21, p.beta22,
                             p.beta23, p.beta12])

        return ReducedSystem(params, regime, names, residual, to_profile, from_profile)

    names = ["lambda21", "lambda22", "a1", "beta11", "beta21", "beta22", "beta12"]

    def to_profile_pure(x):
        lam21, lam22, a1, b11, b21, b22, b12 = x
        b23 = -(b22 * (J1 - 1) * lam22 + lam21) / (2.0 * lam22)
        a21 = 1.0 / (2.0 * lam22)
        alpha22 = -(b11 * J1 * (b22 * (J1 - 1) * lam22 + lam21)
                    + 2.0 * (b12 * J2 * (b22 * J1 * lam22 + lam21 - lam22)
                             + b21 * J1 * lam22)) / (4.0 * lam22)
        return StrategyProfile(a1=a1, theta_z=0.0, a21=a21, alpha22=alpha22,
                               beta11=b11, beta21=b21, beta22=b22, beta23=b23,
                               beta12=b12)

    def residual_pure(x):
        lam21, lam22, a1, b11, b21, b22, b12 = x
        if a1 <= 0.0 or lam22 <= 0.0:
            raise KyleEqError("infeasible trial")
        profile = to_profile_pure(x)
        pr = _projection_lams(profile, params)
        pricing_disp = _pricing_like(profile, params, lam21, lam22)
        geom = br.hft_geometry(profile, params, 0)
        ns, nr = _expanded_second_stage(profile, lam21, lam22, params, 0, geom)
        b11_new = _expanded_finite_first_stage(profile, pricing_disp, params, 0, 0.0)
        b12_new = _expanded_rt_first_stage(profile, pricing_disp, params, J1)
        stat = _pure_stationarity(profile, lam22)
        return np.array([
            pr.lambda22 - lam22,
            pr.lambda21 - lam21,
            b21 - ns / (2.0 * lam22),
            b22 - nr / (2.0 * lam22),
            b11 - b11_new,
            b12 - b12_new,
            stat,
        ])

    def from_profile_pure(p):
        pr = _projection_lams(p, params)
        return np.array([pr.lambda21, pr.lambda22, p.a1, p.beta11, p.beta21,
                         p.beta22, p.beta12])

    return ReducedSystem(params, regime, names, residual_pure, to_profile_pure,
                         from_profile_pure)


# -- single trader with general aversion --------------------------------------

def _single_gamma_system(params: MarketParams, regime: Regime) -> ReducedSystem:
    gam = params.gamma
    te = params.theta_eps

    if regime is Regime.MIXED:
        names = ["a1", "theta_z", "beta11"]

        def displays(x):
            a1, tz, b11 = x
            D, lam22, a21, alpha22 = _mixed_closeout(a1, tz)
            sig = a1 * a1 * (te + 1.0) + te * tz + te + tz
            lam21 = (a1 * (4 * a1 ** 4 * (te + 1) * gam + a1 ** 3 * (4 * te + 3)
                           + 4 * a1 ** 2 * gam * (b11 * te + b11 + 2 * te * tz + 2 * te + 2 * tz + 1)
                           + a1 * (4 * te * (tz + 1) + 3 * tz - 1)
                           + 4 * gam * (b11 + tz + 1) * (te * tz + te + tz))
                     / (2 * b11 * sig * (2 * a1 ** 2 * gam + a1 + 2 * gam * (tz + 1))))
            b21 = a1 * (a1 * a1 + tz + 1.0) ** 2 \
                / (4.0 * sig * (a1 * a1 * gam + a1 + gam * tz + gam))
            b22 = -lam21 / (2.0 * (gam + lam22))
            b23 = -(2.0 * gam + lam21) / (2.0 * (gam + lam22))
            return D, lam21, lam22, a21, alpha22, b21, b22, b23

        def to_profile(x):
            a1, tz, b11 = x
            _, lam21, lam22, a21, alpha22, b21, b22, b23 = displays(x)
            return StrategyProfile(a1=a1, theta_z=tz, a21=a21, alpha22=alpha22,
                                   beta11=b11, beta21=b21, beta22=b22, beta23=b23)

        def residual(x):
            a1, tz, b11 = x
            if a1 <= 0.0 or tz < 0.0 or b11 == 0.0:
                raise KyleEqError("infeasible trial")
            _, lam21, lam22, _, _, _, _, _ = displays(x)
            profile = to_profile(x)
            pr = _projection_lams(profile, params)
            pricing_disp = _pricing_like(profile, params, lam21, lam22)
            b11_new = _expanded_finite_first_stage(profile, pricing_disp, params, 0, gam)
            return np.array([
                pr.lambda22 - lam22,
                pr.lambda21 - lam21,
                b11 - b11_new,
            ])

        def from_profile(p):
            return np.array([p.a1, p.theta_z, p.beta11])

        return ReducedSystem(params, regime, names, residual, to_profile, from_profile)

    names = ["lambda21", "lambda22", "a1", "beta11"]

    def displays_pure(x):
        lam21, lam22, a1, b11 = x
        core = 2.0 * gam * (lam21 - lam22) + lam21 * lam22
        den = a1 * a1 * (4 * (te + 1) * gam + (4 * te + 3) * lam22) + 4 * te * (gam + lam22)
        alpha22 = -(2 * a1 ** 2 * b11 * (te + 1) * core + a1 * lam22
                    + 2 * b11 * te * core) / (2.0 * lam22 * den)
        b21 = (a1 ** 2 * b11 * core / (2.0 * (gam + lam22)) + a1) / den
        b22 = -lam21 / (2.0 * (gam + lam22))
        b23 = -(2.0 * gam + lam21) / (2.0 * (gam + lam22))
        return alpha22, b21, b22, b23

    def to_profile_pure(x):
        lam21, lam22, a1, b11 = x
        alpha22, b21, b22, b23 = displays_pure(x)
        return StrategyProfile(a1=a1, theta_z=0.0, a21=1.0 / (2.0 * lam22),
                               alpha22=alpha22, beta11=b11, beta21=b21,
                               beta22=b22, beta23=b23)

    def residual_pure(x):
        lam21, lam22, a1, b11 = x
        if a1 <= 0.0 or lam22 <= 0.0 or b11 == 0.0:
            raise KyleEqError("infeasible trial")
        profile = to_profile_pure(x)
        pr = _projection_lams(profile, params)
        pricing_disp = _pricing_like(profile, params, lam21, lam22)
        b11_new = _expanded_finite_first_stage(profile, pricing_disp, params, 0, gam)
        stat = _pure_stationarity(profile, lam22)
        return np.array([
            pr.lambda22 - lam22,
            pr.lambda21 - lam21,
            b11 - b11_new,
            stat,
        ])

    def from_profile_pure(p):
        pr = _projection_lams(p, params)
        return np.array([pr.lambda21, pr.lambda22, p.a1, p.beta11])

    return ReducedSystem(params, regime, names, residual_pure, to_profile_pure,
                         from_profile_pure)


_BUILDERS = {
    Config.ALL_SMALL_IT: _small_it_system,
    Config.ALL_ROUND_TRIPPER: _rt_system,
    Config.MIXED_TYPES: _mixed_types_system,
    Config.SINGLE_GENERAL_GAMMA: _single_gamma_system,
}


def build_reduced_system(params: MarketParams, regime: Regime) -> ReducedSystem:
    config = validate_population(params)
    if config not in _BUILDERS:
        raise KyleEqError(f"no reduced system for configuration {config}")
    return _BUILDERS[config](params, regime)


def solve_specialized(params: MarketParams, regime_hint: Optional[Regime] = None,
                      init: Optional[StrategyProfile] = None,
                      tol: float = RESIDUAL_TOL) -> EquilibriumSolution:
    """Solve the configuration's reduced system; independent oracle against
    the general solver."""
    order = [Regime.MIXED, Regime.PURE]
    if regime_hint is Regime.PURE:
        order = [Regime.PURE, Regime.MIXED]
    best_norm = math.inf
    for regime in order:
        sol = _solve_reduced(params, regime, init, tol)
        if sol.found:
            return sol
        best_norm = min(best_norm, sol.residual_norm)
    return EquilibriumSolution(params=params, regime=Regime.NO_EQUILIBRIUM,
                               profile=None, pricing=None, soc=None,
                               residual_norm=best_norm, provenance="specialized")


def _solve_reduced(params: MarketParams, regime: Regime,
                   init: Optional[StrategyProfile], tol: float) -> EquilibriumSolution:
    system = build_reduced_system(params, regime)

    starts: List[np.ndarray] = []
    for prof in filter(None, [init,
                              _limit_start(params, regime),
                              _benchmark_start(params, regime)]):
        try:
            starts.append(system.from_profile(prof))
        except Exception:
            continue

    def finish(res):
        profile = system.to_profile(res.x)
        m = flow_moments(profile, params)
        pricing = price_impact(profile, params, m)
        soc = br.soc_check(profile, pricing, params, regime)
        ok = profile.a1 > 0.0 and pricing.lambda22 > 0.0 and soc.ok()
        if regime is Regime.MIXED and profile.theta_z <= 1e-8:
            ok = False
        if not ok:
            return None
        return EquilibriumSolution(params=params, regime=regime, profile=profile,
                                   pricing=pricing, soc=soc,
                                   residual_norm=res.residual_norm,
                                   provenance="specialized")

    for x0 in starts:
        res = damped_newton(system.residual, x0, tol=tol)
        if res.converged:
            sol = finish(res)
            if sol is not None:
                return sol

    lo, hi = _multi_start_bounds_named(system.names)
    from scipy.stats import qmc
    pts = lo + (hi - lo) * qmc.Sobol(d=system.n, scramble=True, seed=1).random(32)
    best = math.inf
    for p in pts:
        res = damped_newton(system.residual, p, tol=tol)
        best = min(best, res.residual_norm)
        if res.converged:
            sol = finish(res)
            if sol is not None:
                return sol
    return EquilibriumSolution(params=params, regime=Regime.NO_EQUILIBRIUM,
                               profile=None, pricing=None, soc=None,
                               residual_norm=best, provenance="specialized")
