"""Gaussian second moments of order flows under a linear strategy profile.

Everything here is dimensionless (sigma_v = sigma_1 = 1).  The same moments
are computed along two independent paths:

* closed forms in terms of the composite loadings kappa_1..kappa_3, written
  out from the conditional-expectation algebra of the model;
* a generic quadratic-form evaluator over the base shocks
  (v, z, eps_1..eps_J, u_1, u_1plus, u_2), where every random quantity is a
  loading vector and covariances are diagonal-weighted dot products.

The two must agree to machine precision; the test suite enforces 1e-12.
"""

from __future__ import annotations

import math

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMomentError
from .params import MarketParams, StrategyProfile


@dataclass(frozen=True)
class FlowMoments:
    var_y1plus: float
    var_y2: float
    cov_y1plus_y2: float
    cov_v_y1plus: float
    cov_v_y2: float
    kappa1: float
    kappa2: float
    kappa3: float
    rho_y1plus_y2: float
    rho_v_y1plus: float
    rho_v_y2: float


class ShockBasis:
    """Loading-vector world over the base shocks of one market draw.

    Shock order: v (value innovation), z, eps_1..eps_J, u1, u1plus, u2.
    A random variable is a length-(J+5) loading vector; covariances are
    computed against the diagonal shock covariance.

    ``overrides`` plays deviated coefficients for one agent while every
    conditional-expectation map (the y_1 projections behind w and the HFT
    signal residuals) stays at its equilibrium value from ``profile``: that
    is exactly the unilateral-deviation world of the equilibrium definition.
    Keys: "a1", "theta_z", "a21", "alpha22", ("beta1", j), ("b21", j),
    ("b22", j), ("b23", j).
    """

    def __init__(self, profile: StrategyProfile, params: MarketParams,
                 overrides: dict | None = None):
        self.params = params
        self.profile = profile
        ov = overrides or {}
        beta1, b21, b22, b23, gammas = profile.expand(params)
        beta1 = [ov.get(("beta1", j), beta1[j]) for j in range(len(beta1))]
        b21 = [ov.get(("b21", j), b21[j]) for j in range(len(b21))]
        b22 = [ov.get(("b22", j), b22[j]) for j in range(len(b22))]
        b23 = [ov.get(("b23", j), b23[j]) for j in range(len(b23))]
        self.beta1 = np.asarray(beta1, dtype=float)
        self.b21 = np.asarray(b21, dtype=float)
        self.b22 = np.asarray(b22, dtype=float)
        self.b23 = np.asarray(b23, dtype=float)
        self.gammas = gammas
        self.J = len(beta1)
        n = self.J + 5
        self.n = n
        self.iv, self.iz = 0, 1
        self.ieps = 2
        self.iu1 = 2 + self.J
        self.iu1p = 3 + self.J
        self.iu2 = 4 + self.J

        a1 = ov.get("a1", profile.a1)
        theta_z = ov.get("theta_z", profile.theta_z)
        a21 = ov.get("a21", profile.a21)
        alpha22 = ov.get("alpha22", profile.alpha22)

        self.variances = np.empty(n)
        self.variances[self.iv] = 1.0
        self.variances[self.iz] = theta_z
        self.variances[self.ieps:self.iu1] = params.theta_eps
        self.variances[self.iu1] = 1.0
        self.variances[self.iu1p] = params.theta_1plus
        self.variances[self.iu2] = params.theta_2

        # equilibrium projection maps (dealers and observers keep them
        # regardless of deviations)
        eq_a1, eq_tz = profile.a1, profile.theta_z
        self.V = eq_a1 * eq_a1 + eq_tz   # equilibrium Var(i_1)
        self.D = self.V + 1.0            # equilibrium Var(y_1)
        self.lam1 = eq_a1 / self.D       # projection of v on y_1
        self.phi = self.V / self.D       # projection of i_1 on y_1

        # i_1 = a1 v + z ; y_1 = i_1 + u1  (actual play)
        self.i1 = self._unit(self.iv, a1) + self._unit(self.iz)
        self.y1 = self.i1 + self._unit(self.iu1)
        # observed first-order residual: i_1 - E_eq[i_1|y_1]
        self.w = self.i1 - self.phi * self.y1
        self.v = self._unit(self.iv)
        self.v_res = self.v - self.lam1 * self.y1

        # HFT signals and trades
        self.s = [self.w + self._unit(self.ieps + j) for j in range(self.J)]
        self.x1 = [self.beta1[j] * self.s[j] for j in range(self.J)]
        self.y1plus = sum(self.x1, self._unit(self.iu1p))
        # second-period informed trade
        self.i2 = a21 * self.v_res + alpha22 * self.w
        self.x2 = [
            self.b21[j] * self.s[j]
            + self.b22[j] * (self.y1plus - self.x1[j])
            + self.b23[j] * self.x1[j]
            for j in range(self.J)
        ]
        self.y2 = sum(self.x2, self.i2 + self._unit(self.iu2))

    def _unit(self, i: int, c: float = 1.0) -> np.ndarray:
        v = np.zeros(self.n)
        v[i] = c
        return v

    def cov(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.dot(a * self.variances, b))

    def var(self, a: np.ndarray) -> float:
        return self.cov(a, a)

    def project(self, target: np.ndarray, regressors) -> np.ndarray:
        """Coefficients of E[target | regressors] (all zero-mean joint normal)."""
        k = len(regressors)
        G = np.empty((k, k))
        c = np.empty(k)
        for i, r in enumerate(regressors):
            c[i] = self.cov(target, r)
            for j2 in range(i, k):
                G[i, j2] = G[j2, i] = self.cov(r, regressors[j2])
        return np.linalg.solve(G, c)


def flow_moments(profile: StrategyProfile, params: MarketParams) -> FlowMoments:
    """Closed-form flow moments (kappa representation)."""
    beta1, b21, b22, b23, _ = profile.expand(params)
    beta1 = np.asarray(beta1)
    b21 = np.asarray(b21)
    b22 = np.asarray(b22)
    b23 = np.asarray(b23)

    a1, tz = profile.a1, profile.theta_z
    V = a1 * a1 + tz
    D = V + 1.0
    te, t1p, t2 = params.theta_eps, params.theta_1plus, params.theta_2

    sum_b1 = float(beta1.sum())
    sum_b1sq = float((beta1 ** 2).sum())
    sum_b22 = float(b22.sum())
    # x_2j loading on the first-order residual w, and y_2 loading on eps_j
    gw = b21 + b23 * beta1 + b22 * (sum_b1 - beta1)
    B = float(gw.sum())
    e = b21 + b23 * beta1 + beta1 * (sum_b22 - b22)

    a22B = profile.alpha22 + B
    kappa1 = profile.a21 + a1 * (a22B - profile.a21 * a1) / D
    kappa2 = (a22B - profile.a21 * a1) / D  # equals (kappa1 - a21)/a1 when a1 != 0
    kappa3 = (profile.a21 * a1 + V * a22B) / D

    var_y1plus = (V / D) * sum_b1 ** 2 + te * sum_b1sq + t1p
    var_y2 = (
        kappa1 ** 2 + tz * kappa2 ** 2 + kappa3 ** 2
        + te * float((e ** 2).sum()) + t1p * sum_b22 ** 2 + t2
    )
    cov_y1plus_y2 = (
        sum_b1 * (kappa1 * a1 + tz * kappa2 + V * kappa3) / D
        + te * float((beta1 * e).sum()) + t1p * sum_b22
    )
    cov_v_y1plus = a1 * sum_b1 / D
    cov_v_y2 = kappa1

    if var_y1plus <= 0.0 or var_y2 <= 0.0:
        raise DegenerateMomentError(
            f"degenerate flow variance: var_y1plus={var_y1plus!r}, var_y2={var_y2!r}")
    sd1p, sd2 = math.sqrt(var_y1plus), math.sqrt(var_y2)
    return FlowMoments(
        var_y1plus=var_y1plus,
        var_y2=var_y2,
        cov_y1plus_y2=cov_y1plus_y2,
        cov_v_y1plus=cov_v_y1plus,
        cov_v_y2=cov_v_y2,
        kappa1=kappa1,
        kappa2=kappa2,
        kappa3=kappa3,
        rho_y1plus_y2=cov_y1plus_y2 / (sd1p * sd2),
        rho_v_y1plus=cov_v_y1plus / sd1p,
        rho_v_y2=cov_v_y2 / sd2,
    )


def flow_moments_quadratic(profile: StrategyProfile, params: MarketParams) -> FlowMoments:
    """Same moments via the generic loading-vector evaluator (internal oracle)."""
    basis = ShockBasis(profile, params)
    var_y1plus = basis.var(basis.y1plus)
    var_y2 = basis.var(basis.y2)
    if var_y1plus <= 0.0 or var_y2 <= 0.0:
        raise DegenerateMomentError(
            f"degenerate flow variance: var_y1plus={var_y1plus!r}, var_y2={var_y2!r}")
    cov12 = basis.cov(basis.y1plus, basis.y2)
    cov_v1 = basis.cov(basis.v, basis.y1plus)
    cov_v2 = basis.cov(basis.v, basis.y2)
    # kappa's read off the y_2 loadings
    kappa1 = float(basis.y2[basis.iv])
    kappa2 = float(basis.y2[basis.iz])
    kappa3 = float(-basis.y2[basis.iu1])
    sd1p, sd2 = math.sqrt(var_y1plus), math.sqrt(var_y2)
    return FlowMoments(
        var_y1plus=var_y1plus,
        var_y2=var_y2,
        cov_y1plus_y2=cov12,
        cov_v_y1plus=cov_v1,
        cov_v_y2=cov_v2,
        kappa1=kappa1,
        kappa2=kappa2,
        kappa3=kappa3,
        rho_y1plus_y2=cov12 / (sd1p * sd2),
        rho_v_y1plus=cov_v1 / sd1p,
        rho_v_y2=cov_v2 / sd2,
    )
