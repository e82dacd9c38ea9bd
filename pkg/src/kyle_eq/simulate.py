"""Seeded Monte-Carlo market playout: the statistical oracle for pricing,
moments, and profits.

Randomness comes from counter-based Philox4x64 streams (numpy
``np.random.Philox``), one stream per (shock component, fixed-size batch),
derived from ``SeedSequence(seed, spawn_key=(component, batch))``.  The
partition of the draw-index space is therefore deterministic: totals do not
depend on how batches are distributed across workers, and adding traders
does not perturb the other components' draws.  Antithetic pairing is applied
to the value and noise-order components; consecutive draws (2i, 2i+1) form
a pair, so every standard error below is pair-clustered rather than i.i.d.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .equilibrium import EquilibriumSolution
from .errors import KyleEqError
from .params import MarketParams, StrategyProfile

BATCH = 1 << 17  # fixed batch size; part of the reproducibility contract

SERIES = ("y1", "y1plus", "y2", "p1", "p1plus", "p2")
ANTITHETIC = ("v", "u1", "u1plus", "u2")


def _component_names(J: int):
    return ["v", "z"] + [f"eps{j}" for j in range(J)] + ["u1", "u1plus", "u2"]


def _batch_normals(seed: int, comp: int, batch: int, m: int,
                   antithetic: bool) -> np.ndarray:
    ss = np.random.SeedSequence(seed, spawn_key=(comp, batch))
    gen = np.random.Generator(np.random.Philox(ss))
    if not antithetic:
        return gen.standard_normal(m)
    base = gen.standard_normal((m + 1) // 2)
    out = np.empty(2 * len(base))
    out[0::2] = base
    out[1::2] = -base
    return out[:m]


def _pair_reduce(x: np.ndarray) -> np.ndarray:
    """Means over antithetic pairs (2i, 2i+1); a trailing singleton stands
    alone."""
    m = len(x)
    if m % 2 == 0:
        return 0.5 * (x[0::2] + x[1::2])
    head = 0.5 * (x[:-1][0::2] + x[:-1][1::2])
    return np.append(head, x[-1])


@dataclass
class _SeriesStat:
    n: int = 0
    s1: float = 0.0
    s2: float = 0.0
    n_pairs: int = 0
    q1: float = 0.0   # sum of pair means
    q2: float = 0.0   # sum of squared pair means
    r1: float = 0.0   # sum of pair means of x^2
    r2: float = 0.0   # sum of squared pair means of x^2

    def add(self, x: np.ndarray):
        self.n += len(x)
        self.s1 += float(x.sum())
        self.s2 += float((x * x).sum())
        q = _pair_reduce(x)
        r = _pair_reduce(x * x)
        self.n_pairs += len(q)
        self.q1 += float(q.sum())
        self.q2 += float((q * q).sum())
        self.r1 += float(r.sum())
        self.r2 += float((r * r).sum())

    def merge(self, o: "_SeriesStat"):
        self.n += o.n
        self.s1 += o.s1
        self.s2 += o.s2
        self.n_pairs += o.n_pairs
        self.q1 += o.q1
        self.q2 += o.q2
        self.r1 += o.r1
        self.r2 += o.r2

    def mean(self) -> float:
        return self.s1 / self.n

    def mean_se(self) -> float:
        mq = self.q1 / self.n_pairs
        var = max(self.q2 / self.n_pairs - mq * mq, 0.0)
        return float(np.sqrt(var / self.n_pairs))

    def second_moment(self) -> float:
        return self.s2 / self.n

    def second_moment_se(self) -> float:
        mr = self.r1 / self.n_pairs
        var = max(self.r2 / self.n_pairs - mr * mr, 0.0)
        return float(np.sqrt(var / self.n_pairs))


@dataclass
class _OlsStat:
    """Through-origin OLS with a pair-clustered sandwich covariance; the
    meat uses residuals at the reference (analytic) coefficients."""

    k: int
    XtX: np.ndarray = None
    Xty: np.ndarray = None
    meat: np.ndarray = None
    n: int = 0

    def __post_init__(self):
        self.XtX = np.zeros((self.k, self.k))
        self.Xty = np.zeros(self.k)
        self.meat = np.zeros((self.k, self.k))

    def add(self, X: np.ndarray, y: np.ndarray, ref_coef: np.ndarray):
        self.n += len(y)
        self.XtX += X.T @ X
        self.Xty += X.T @ y
        e_ref = y - X @ ref_coef
        g = X * e_ref[:, None]
        gp = np.column_stack([2.0 * _pair_reduce(g[:, i]) for i in range(self.k)])
        self.meat += gp.T @ gp

    def merge(self, o: "_OlsStat"):
        self.n += o.n
        self.XtX += o.XtX
        self.Xty += o.Xty
        self.meat += o.meat

    def fit(self):
        coef = np.linalg.solve(self.XtX, self.Xty)
        bread = np.linalg.inv(self.XtX)
        cov = bread @ self.meat @ bread
        return coef, np.sqrt(np.diag(cov))


@dataclass
class _Accumulator:
    series: Dict[str, _SeriesStat] = field(default_factory=dict)
    ols: Dict[str, _OlsStat] = field(default_factory=dict)
    max_clearing: float = 0.0
    n: int = 0

    def stat(self, name: str) -> _SeriesStat:
        if name not in self.series:
            self.series[name] = _SeriesStat()
        return self.series[name]

    def ols_stat(self, name: str, k: int) -> _OlsStat:
        if name not in self.ols:
            self.ols[name] = _OlsStat(k=k)
        return self.ols[name]

    def merge(self, o: "_Accumulator"):
        self.n += o.n
        for k, v in o.series.items():
            self.stat(k).merge(v)
        for k, v in o.ols.items():
            self.ols_stat(k, v.k).merge(v)
        self.max_clearing = max(self.max_clearing, o.max_clearing)


@dataclass(frozen=True)
class SimStats:
    n: int
    seed: int
    series_mean: Dict[str, float]
    series_mean_se: Dict[str, float]
    series_var: Dict[str, float]
    series_var_se: Dict[str, float]
    profit_mean: Dict[str, float]
    profit_se: Dict[str, float]
    lambda_hat: Dict[str, float]
    lambda_se: Dict[str, float]
    max_clearing_violation: float


def play_arrays(profile: StrategyProfile, params: MarketParams, pricing,
                seed: int, batch: int, m: int, antithetic: bool = True) -> dict:
    """One batch of draws played through the linear strategies; returns the
    per-draw arrays keyed by name."""
    beta1, b21, b22, b23, _ = profile.expand(params)
    J = len(beta1)
    names = _component_names(J)
    sds = {"v": 1.0, "z": np.sqrt(profile.theta_z), "u1": 1.0,
           "u1plus": np.sqrt(params.theta_1plus), "u2": np.sqrt(params.theta_2)}
    eps_sd = np.sqrt(params.theta_eps)
    draws = {}
    for comp, nm in enumerate(names):
        sd = sds.get(nm, eps_sd)
        if sd == 0.0:
            draws[nm] = np.zeros(m)
        else:
            draws[nm] = sd * _batch_normals(seed, comp, batch, m,
                                            antithetic and nm in ANTITHETIC)

    v = draws["v"]
    a1, tz = profile.a1, profile.theta_z
    V = a1 * a1 + tz
    phi = V / (V + 1.0)

    i1 = a1 * v + draws["z"]
    y1 = i1 + draws["u1"]
    p1 = pricing.lambda1 * y1
    w = i1 - phi * y1
    s = [w + draws[f"eps{j}"] for j in range(J)]
    x1 = [beta1[j] * s[j] for j in range(J)]
    y1p = sum(x1) + draws["u1plus"] if J else draws["u1plus"]
    p1p = p1 + pricing.lambda1plus * y1p
    i2 = profile.a21 * (v - p1) + profile.alpha22 * w
    x2 = [b21[j] * s[j] + b22[j] * (y1p - x1[j]) + b23[j] * x1[j] for j in range(J)]
    y2 = (sum(x2) if J else 0.0) + i2 + draws["u2"]
    p2 = p1 + pricing.lambda21 * y1p + pricing.lambda22 * y2
    return {"v": v, "z": draws["z"], "u1": draws["u1"], "u1plus": draws["u1plus"],
            "u2": draws["u2"], "i1": i1, "i2": i2, "y1": y1, "y1plus": y1p,
            "y2": y2, "p1": p1, "p1plus": p1p, "p2": p2, "x1": x1, "x2": x2}


def _play_batch(profile: StrategyProfile, params: MarketParams, pricing,
                seed: int, batch: int, m: int) -> _Accumulator:
    a = play_arrays(profile, params, pricing, seed, batch, m)
    v, i1, i2 = a["v"], a["i1"], a["i2"]
    y1, y1p, y2 = a["y1"], a["y1plus"], a["y2"]
    p1, p1p, p2 = a["p1"], a["p1plus"], a["p2"]
    x1, x2 = a["x1"], a["x2"]
    J = len(x1)

    acc = _Accumulator(n=m)
    for nm, x in (("y1", y1), ("y1plus", y1p), ("y2", y2),
                  ("p1", p1), ("p1plus", p1p), ("p2", p2)):
        acc.stat(nm).add(x)

    acc.stat("pi_it").add(i1 * (v - p1) + i2 * (v - p2))
    if params.gamma is not None or params.j1 > 0:
        acc.stat("pi_small").add(x1[0] * (v - p1p) + x2[0] * (v - p2))
    if params.gamma is None and params.j2 > 0:
        j = params.j1
        acc.stat("pi_rt").add(x1[j] * (v - p1p) + x2[j] * (v - p2))
        acc.max_clearing = max(float(np.max(np.abs(x1[k] + x2[k])))
                               for k in range(params.j1, J))
    acc.stat("pi_noise").add(a["u1"] * (v - p1) + a["u1plus"] * (v - p1p)
                             + a["u2"] * (v - p2))

    acc.ols_stat("lam1", 1).add(y1.reshape(-1, 1), v,
                                np.array([pricing.lambda1]))
    acc.ols_stat("lam1plus", 1).add(y1p.reshape(-1, 1), v - p1,
                                    np.array([pricing.lambda1plus]))
    acc.ols_stat("lam2", 2).add(np.column_stack([y1p, y2]), v - p1,
                                np.array([pricing.lambda21, pricing.lambda22]))
    return acc


def simulate_market(solution: EquilibriumSolution, n: int, seed: int) -> SimStats:
    """Play the solution's strategies over n market draws.

    Deterministic given (n, seed); identical totals for any scheduling of
    the fixed-size batches.
    """
    if not solution.found:
        raise KyleEqError("cannot simulate a NoEquilibrium result")
    if n < 10 ** 4:
        raise KyleEqError("n must be at least 1e4")
    total = _Accumulator()
    nb = (n + BATCH - 1) // BATCH
    for b in range(nb):
        m = min(BATCH, n - b * BATCH)
        total.merge(_play_batch(solution.profile, solution.params,
                                solution.pricing, seed, b, m))

    series_mean, series_mean_se, series_var, series_var_se = {}, {}, {}, {}
    for nm in SERIES:
        st = total.series[nm]
        series_mean[nm] = st.mean()
        series_mean_se[nm] = st.mean_se()
        series_var[nm] = st.second_moment() - st.mean() ** 2
        series_var_se[nm] = st.second_moment_se()
    profit_mean, profit_se = {}, {}
    for nm in ("pi_it", "pi_small", "pi_rt", "pi_noise"):
        if nm in total.series:
            st = total.series[nm]
            profit_mean[nm] = st.mean()
            profit_se[nm] = st.mean_se()

    lam_hat: Dict[str, float] = {}
    lam_se: Dict[str, float] = {}
    c, se = total.ols["lam1"].fit()
    lam_hat["lambda1"], lam_se["lambda1"] = float(c[0]), float(se[0])
    c, se = total.ols["lam1plus"].fit()
    lam_hat["lambda1plus"], lam_se["lambda1plus"] = float(c[0]), float(se[0])
    c, se = total.ols["lam2"].fit()
    lam_hat["lambda21"], lam_se["lambda21"] = float(c[0]), float(se[0])
    lam_hat["lambda22"], lam_se["lambda22"] = float(c[1]), float(se[1])

    return SimStats(n=n, seed=seed, series_mean=series_mean,
                    series_mean_se=series_mean_se,
                    series_var=series_var, series_var_se=series_var_se,
                    profit_mean=profit_mean, profit_se=profit_se,
                    lambda_hat=lam_hat, lambda_se=lam_se,
                    max_clearing_violation=total.max_clearing)
