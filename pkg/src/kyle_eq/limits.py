"""Closed-form limit equilibria as the fast-noise market vanishes
(theta_1plus -> 0), for zero-aversion and infinite-aversion populations.

The zero-aversion limit has fully explicit displays.  The infinite-aversion
limit is a bivariate polynomial system parameterized by
zeta = lim beta_12 / sqrt(theta_1plus), which has no defining equation
independent of the path; zeta is extrapolated from warm-started solves at
theta_1plus in {1e-4, 1e-5, 1e-6}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import KyleEqError, LimitUnresolvedError, RegimeMismatchError
from .newton import damped_newton
from .params import MarketParams, Regime


@dataclass(frozen=True)
class LimitSolution:
    regime: Regime
    a1: float
    theta_z: float
    a21: float
    alpha22: float
    lambda1: float
    lambda22: float
    beta21: float = 0.0          # zero-aversion second-stage coefficient
    zeta: Optional[float] = None  # infinite-aversion: lim beta_12/sqrt(theta_1plus)


def limit_small_it(J: int, theta_eps: float, theta_2: float,
                   regime: Regime) -> LimitSolution:
    """Vanishing-fast-noise equilibrium with J zero-aversion traders.

    Mixed branch is fully explicit; pure branch reduces to one scalar
    equation in the first-stage intensity.
    """
    if J < 1:
        raise KyleEqError("limit requires at least one trader")
    te, t2 = float(theta_eps), float(theta_2)
    c = J + 2.0 + 4.0 * te

    if regime is Regime.MIXED:
        R = 1.0 + 4.0 * te / J + t2 * (c / (J + 1.0)) ** 2
        theta_z = (J - 4.0 * te) / c - 1.0 / R
        if theta_z <= 0.0:
            raise RegimeMismatchError(
                f"mixed limit does not exist here (theta_z formula gives {theta_z:.6g})")
        sqrtR = math.sqrt(R)
        a1 = 1.0 / sqrtR
        a21 = (J + 1.0) / c * sqrtR
        lam = c / (2.0 * (J + 1.0) * sqrtR)
        return LimitSolution(regime=Regime.MIXED, a1=a1, theta_z=theta_z,
                             a21=a21, alpha22=-(J + 1.0) / c,
                             beta21=2.0 * (J + 1.0) / (J * c),
                             lambda1=lam, lambda22=lam)

    if regime is not Regime.PURE:
        raise KyleEqError(f"unsupported regime {regime!r}")

    def pieces(a1: float):
        q = a1 * a1 * c + 4.0 * te
        denom = a1 * a1 * J * (a1 * a1 * (te + 1.0) + te) \
            + (2.0 * (a1 * a1 + 1.0) * te + a1 * a1) ** 2
        a21 = 0.5 * math.sqrt((a1 * a1 + 1.0) * t2 * q * q / denom)
        beta21 = 2.0 * a1 * a21 / q
        alpha22 = -J * beta21 / 2.0
        lam22 = 1.0 / (2.0 * a21)
        lam1 = a1 / (1.0 + a1 * a1)
        G = (alpha22 - a21 * a1) / (a1 * a1 + 1.0)
        return a21, beta21, alpha22, lam1, lam22, G

    def residual(a1: float) -> float:
        a21, _, _, lam1, lam22, G = pieces(a1)
        return 2.0 * a1 * (lam1 - lam22 * G * G) - (1.0 + 2.0 * lam22 * a21 * G)

    roots = []
    grid = np.linspace(1e-3, 4.0, 801)
    vals = [residual(a) for a in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(brentq(residual, grid[i], grid[i + 1], xtol=1e-14))
    admissible = []
    for a1 in roots:
        a21, beta21, alpha22, lam1, lam22, G = pieces(a1)
        if lam1 - lam22 * G * G > 0.0:
            admissible.append((a1, a21, beta21, alpha22, lam1, lam22))
    if not admissible:
        raise KyleEqError("no admissible pure-limit root found")
    a1, a21, beta21, alpha22, lam1, lam22 = max(admissible, key=lambda r: r[0])
    return LimitSolution(regime=Regime.PURE, a1=a1, theta_z=0.0, a21=a21,
                         alpha22=alpha22, beta21=beta21, lambda1=lam1, lambda22=lam22)


# -- infinite-aversion limit systems ----------------------------------------

def _rt_mixed_system(x: np.ndarray, J: int, te: float, t2: float,
                     zeta: float) -> np.ndarray:
    a1, tz = x
    A2, A4, A6, A8 = a1 ** 2, a1 ** 4, a1 ** 6, a1 ** 8
    k = te * J * zeta ** 2 + 1.0
    Jz = J * J * zeta ** 2
    eq1 = (A8 * k + A6 * (3.0 * tz + 2.0) * k
           - (tz + 1.0) ** 2 * (te * J * tz * zeta ** 2 + te * J * zeta ** 2
                                + Jz * tz + tz + 1.0)
           + A4 * (4.0 * t2 * (te * J * zeta ** 2 + Jz + 1.0)
                   + tz * (3.0 * te * J * tz * zeta ** 2 + 3.0 * te * J * zeta ** 2
                           - Jz + 3.0 * tz + 3.0))
           + A2 * (4.0 * t2 * (te * J * tz * zeta ** 2 + te * J * zeta ** 2
                               + Jz * tz + tz + 1.0)
                   + (tz + 1.0) * (-tz * (te * J * zeta ** 2 + 2.0 * Jz + 1.0)
                                   + tz ** 2 * k - 2.0 * k)))
    eq2 = (A8 * k + 3.0 * A6 * (te * J * tz * zeta ** 2 + tz)
           + A4 * (4.0 * t2 * (te * J * zeta ** 2 + Jz + 1.0)
                   + (3.0 * tz ** 2 + tz - 2.0) * k)
           + A2 * (4.0 * t2 * (te * J * tz * zeta ** 2 + te * J * zeta ** 2
                               + Jz * tz - Jz + tz + 1.0)
                   + tz * (tz + 1.0) ** 2 * k)
           + (tz + 1.0) ** 3 * k)
    return np.array([eq1, eq2])


def _rt_pure_system(x: np.ndarray, J: int, te: float, t2: float,
                    zeta: float) -> np.ndarray:
    lam22, a1, a22 = x
    k = te * J * zeta ** 2 + 1.0
    S = a22 ** 2 * te * J * zeta ** 2 + a22 ** 2 + te * J * t2 * zeta ** 2 \
        + J * J * t2 * zeta ** 2 + t2
    eq1 = (2.0 * a1 ** 4 * lam22 + 2.0 * a1 ** 2 * a22 * lam22
           - 4.0 * a1 * a22 ** 2 * lam22 ** 2 + a1 - 2.0 * (a22 + 1.0) * lam22)
    eq2 = 4.0 * a1 ** 2 * lam22 ** 2 * S + (4.0 * lam22 ** 2 * t2 - 1.0) * k
    denom = (4.0 * a1 ** 2 * lam22 ** 2 * S + 4.0 * a1 * a22 * lam22 * k
             + (4.0 * lam22 ** 2 * t2 + 1.0) * k)
    eq3 = a22 + 2.0 * a1 * J * J * lam22 * t2 * zeta ** 2 / denom
    return np.array([eq1, eq2, eq3])


def _aitken(q0: float, q1: float, q2: float) -> float:
    d1, d2 = q1 - q0, q2 - q1
    if d1 == 0.0 and d2 == 0.0:
        return q2
    if d1 == 0.0 or abs(d2) >= abs(d1):
        raise LimitUnresolvedError(
            f"path ratios do not contract: {(q0, q1, q2)!r}")
    rho = d2 / d1
    return q2 + d2 * rho / (1.0 - rho)


def _richardson_limit(values, tol: float = 1e-3):
    """Two geometric extrapolations over four path points; convergence is
    certified by agreement of the successive extrapolants.  (A single
    three-point rule would reject limits approached at a half-order rate
    even though the extrapolant itself is already accurate.)"""
    z1 = _aitken(*values[:3])
    z2 = _aitken(*values[1:])
    if abs(z2 - z1) > tol * max(1.0, abs(z2)):
        raise LimitUnresolvedError(
            f"extrapolants disagree: {z1!r} vs {z2!r}")
    return z2


RT_PATH_THETAS = (1e-3, 1e-4, 1e-5, 1e-6)


def limit_round_tripper(J: int, theta_eps: float, theta_2: float,
                        regime: Regime) -> LimitSolution:
    """Vanishing-fast-noise limit with J infinitely averse traders.

    Solves the displayed limit system jointly with the path-extrapolated
    zeta; the finite solves run on a warm-started descent in theta_1plus.
    """
    from .equilibrium import continue_path

    if J < 1:
        raise KyleEqError("limit requires at least one trader")
    te, t2 = float(theta_eps), float(theta_2)

    descent = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6]
    grid = [MarketParams(theta_1plus=t, theta_2=t2, theta_eps=te, j2=J)
            for t in descent]
    sols, _ = continue_path(grid, warm_start=True, regime_hint=regime)
    by_theta = dict(zip(descent, sols))
    tail = [by_theta[t] for t in RT_PATH_THETAS]
    for t, s in zip(RT_PATH_THETAS, tail):
        if not s.found:
            raise LimitUnresolvedError(f"path solve failed at theta_1plus={t}")
        if s.regime is not regime:
            raise RegimeMismatchError(
                f"path is {s.regime.value} at theta_1plus={t}, requested {regime.value}")

    ratios = [s.profile.beta12 / math.sqrt(t)
              for t, s in zip(RT_PATH_THETAS, tail)]
    zeta = _richardson_limit(ratios)

    last = tail[-1].profile
    if regime is Regime.MIXED:
        res = damped_newton(
            lambda x: _rt_mixed_system(x, J, te, t2, zeta),
            np.array([last.a1, last.theta_z]), tol=1e-13)
        if not res.converged:
            raise LimitUnresolvedError("mixed limit system did not converge")
        a1, tz = res.x
        if a1 <= 0.0 or tz <= 0.0:
            raise RegimeMismatchError(
                f"mixed limit root not admissible: a1={a1:.6g}, theta_z={tz:.6g}")
        lam = a1 / (a1 * a1 + tz + 1.0)
        return LimitSolution(regime=regime, a1=a1, theta_z=tz,
                             a21=1.0 / (2.0 * lam),
                             alpha22=-(a1 * a1 + tz + 1.0) / 2.0,
                             lambda1=lam, lambda22=lam, zeta=zeta)

    res = damped_newton(
        lambda x: _rt_pure_system(x, J, te, t2, zeta),
        np.array([tail[-1].pricing.lambda22, last.a1, last.alpha22]), tol=1e-13)
    if not res.converged:
        raise LimitUnresolvedError("pure limit system did not converge")
    lam22, a1, a22 = res.x
    soc4 = (4.0 * a1 ** 3 * lam22 - a1 ** 2
            + 4.0 * a1 * (a22 + 1.0) * lam22 - 4.0 * a22 ** 2 * lam22 ** 2)
    if lam22 <= 0.0 or a1 <= 0.0 or soc4 <= 0.0:
        raise RegimeMismatchError("pure limit root not admissible")
    return LimitSolution(regime=regime, a1=a1, theta_z=0.0,
                         a21=1.0 / (2.0 * lam22), alpha22=a22,
                         lambda1=a1 / (a1 * a1 + 1.0), lambda22=lam22, zeta=zeta)
