"""General equilibrium solver: residual assembly, regime selection,
initialization ladder, multi-start, and parameter continuation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np

from . import best_response as br
from .errors import KyleEqError
from .moments import flow_moments
from .newton import damped_newton, RESIDUAL_TOL
from .params import Config, MarketParams, Regime, StrategyProfile, validate_population
from .pricing import PricingRule, price_impact

THETA_Z_MIXED_FLOOR = 1e-8
SOC_FLOOR = br.SOC_SLACK_FLOOR


@dataclass(frozen=True)
class EquilibriumSolution:
    params: MarketParams
    regime: Regime
    profile: Optional[StrategyProfile]
    pricing: Optional[PricingRule]
    soc: Optional[br.SocReport]
    residual_norm: float
    provenance: str = "general"
    multiplicity_flag: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.regime is not Regime.NO_EQUILIBRIUM

    def coeff_dict(self) -> dict:
        p = self.profile
        d = {"regime": self.regime.value, "residual_norm": self.residual_norm}
        if p is not None:
            d.update(a1=p.a1, theta_z=p.theta_z, a21=p.a21, alpha22=p.alpha22,
                     beta11=p.beta11, beta21=p.beta21, beta22=p.beta22,
                     beta23=p.beta23, beta12=p.beta12)
        if self.pricing is not None:
            d.update(lambda1=self.pricing.lambda1, lambda1plus=self.pricing.lambda1plus,
                     lambda21=self.pricing.lambda21, lambda22=self.pricing.lambda22)
        return d


class GeneralSystem:
    """Square fixed-point residual for one configuration and regime.

    Unknowns: (a1, [theta_z], a21, alpha22) plus the strategy coefficients of
    each HFT type present.  The pricing rule is recomputed from the candidate
    profile at every evaluation, so weak-efficiency consistency is built in.
    """

    def __init__(self, params: MarketParams, regime: Regime,
                 allow_negative_theta_z: bool = False):
        self.params = params
        self.regime = regime
        self._allow_neg_tz = allow_negative_theta_z
        self.config = validate_population(params)
        names = ["a1"]
        if regime is Regime.MIXED:
            names.append("theta_z")
        names += ["a21", "alpha22"]
        self.has_type1 = self.config in (Config.ALL_SMALL_IT, Config.MIXED_TYPES,
                                         Config.SINGLE_GENERAL_GAMMA)
        self.has_type2 = self.config in (Config.ALL_ROUND_TRIPPER, Config.MIXED_TYPES)
        if self.has_type1:
            names += ["beta11", "beta21", "beta22", "beta23"]
        if self.has_type2:
            names += ["beta12"]
        self.names = names
        self.n = len(names)
        self._idx = {nm: i for i, nm in enumerate(names)}

    def pack(self, profile: StrategyProfile) -> np.ndarray:
        x = np.zeros(self.n)
        for nm, i in self._idx.items():
            x[i] = getattr(profile, nm)
        return x

    def unpack(self, x: np.ndarray) -> StrategyProfile:
        kw = dict(theta_z=0.0, beta11=0.0, beta21=0.0, beta22=0.0,
                  beta23=0.0, beta12=0.0)
        for nm, i in self._idx.items():
            kw[nm] = float(x[i])
        return StrategyProfile(**kw)

    def residual(self, x: np.ndarray) -> np.ndarray:
        profile = self.unpack(x)
        if profile.a1 <= 0.0:
            raise KyleEqError("infeasible trial: a1 <= 0")
        tz_floor = -0.5 * (profile.a1 ** 2 + 1.0) if self._allow_neg_tz else 0.0
        if self.regime is Regime.MIXED and profile.theta_z < tz_floor:
            raise KyleEqError("infeasible trial: theta_z out of range")
        params = self.params
        pricing = price_impact(profile, params, flow_moments(profile, params))

        res = []
        lam1, lam22 = pricing.lambda1, pricing.lambda22
        G = (profile.alpha22 - profile.a21 * profile.a1) / (profile.a1 ** 2
                                                            + profile.theta_z + 1.0)
        quad = lam1 - lam22 * G * G
        lin = 1.0 + 2.0 * lam22 * profile.a21 * G
        if self.regime is Regime.MIXED:
            res += [quad, lin]
        else:
            # stationarity in product form: smooth through the concavity
            # boundary, same zero set as a1 = lin / (2 quad) where quad != 0
            res.append(2.0 * quad * profile.a1 - lin)

        a21_new, alpha22_new = br.it_second_stage(pricing, profile, params)
        res += [profile.a21 - a21_new, profile.alpha22 - alpha22_new]

        if self.has_type1:
            j = 0
            geom = br.hft_geometry(profile, params, j)
            b21n, b22n, b23n = br.hft_second_stage(profile, pricing, params, j, geom)
            b11n = br.hft_first_stage(profile, pricing, params, j, geom)
            res += [profile.beta11 - b11n, profile.beta21 - b21n,
                    profile.beta22 - b22n, profile.beta23 - b23n]
        if self.has_type2:
            j = self.params.j1
            b12n = br.hft_first_stage(profile, pricing, params, j)
            res.append(profile.beta12 - b12n)
        return np.asarray(res)

    # -- admissibility -----------------------------------------------------

    def admissible(self, x: np.ndarray) -> bool:
        try:
            sol = self.evaluate(x)
        except KyleEqError:
            return False
        return self._accept(sol)

    def evaluate(self, x: np.ndarray):
        profile = self.unpack(x)
        pricing = price_impact(profile, self.params, flow_moments(profile, self.params))
        soc = br.soc_check(profile, pricing, self.params, self.regime)
        return profile, pricing, soc

    def _accept(self, sol) -> bool:
        profile, pricing, soc = sol
        if profile.a1 <= 0.0 or pricing.lambda22 <= 0.0:
            return False
        if self.regime is Regime.MIXED and profile.theta_z <= THETA_Z_MIXED_FLOOR:
            return False
        return soc.ok(SOC_FLOOR)


# -- initialization ---------------------------------------------------------

def solve_no_hft(theta_2: float, theta_1plus: float = 1.0) -> StrategyProfile:
    """Two-period benchmark without anticipatory traders (pure regime)."""
    params = MarketParams(theta_1plus=theta_1plus, theta_2=theta_2, theta_eps=0.0)
    system = GeneralSystem(params, Regime.PURE)
    res = damped_newton(system.residual, np.array([0.7, 1.0, 0.0]))
    if not res.converged:
        raise KyleEqError("no-HFT benchmark solve failed")
    return system.unpack(res.x)


def _limit_start(params: MarketParams, regime: Regime) -> Optional[StrategyProfile]:
    """Closed-form start for tiny theta_1plus in zero-aversion markets.

    The first-stage intensity vanishes at rate theta_1plus; the second-stage
    reaction coefficients have nonzero limits not covered by the closed
    forms, so they get a mild negative guess.
    """
    from .limits import limit_small_it
    from .errors import RegimeMismatchError
    config = validate_population(params)
    if config not in (Config.ALL_SMALL_IT, Config.NO_HFT):
        return None
    J = max(params.j1, 1)
    try:
        lim = limit_small_it(J, params.theta_eps, params.theta_2,
                             regime if config is Config.ALL_SMALL_IT else Regime.PURE)
    except (RegimeMismatchError, KyleEqError):
        return None
    small = config is Config.ALL_SMALL_IT
    return StrategyProfile(
        a1=lim.a1, theta_z=lim.theta_z if regime is Regime.MIXED else 0.0,
        a21=lim.a21, alpha22=lim.alpha22,
        beta11=4.0 * params.theta_1plus if small else 0.0,
        beta21=lim.beta21 if small else 0.0,
        beta22=-0.15 if small else 0.0, beta23=-0.15 if small else 0.0)


def _benchmark_start(params: MarketParams, regime: Regime) -> StrategyProfile:
    base = solve_no_hft(params.theta_2)
    theta_z = 0.05 if regime is Regime.MIXED else 0.0
    return StrategyProfile(
        a1=base.a1, theta_z=theta_z, a21=base.a21, alpha22=base.alpha22,
        beta11=0.1, beta21=0.1, beta22=-0.05, beta23=-0.1, beta12=0.1)


def _start_ladder(params: MarketParams, regime: Regime,
                  init: Optional[StrategyProfile]) -> List[StrategyProfile]:
    starts = []
    if init is not None:
        starts.append(init)
    if params.theta_1plus <= 1e-3:
        lim = _limit_start(params, regime)
        if lim is not None:
            starts.append(lim)
    starts.append(_benchmark_start(params, regime))
    return starts


# affine placement of the quasi-random [0, 2] draws; coefficients with a
# known equilibrium sign are mapped onto it, sign-ambiguous ones straddle 0
_MS_OFFSET = {"alpha22": (-2.0, -0.0), "beta23": (-1.0, 0.0),
              "beta22": (-1.0, 1.0), "beta11": (-0.5, 1.5),
              "theta_z": (0.0, 1.0), "lambda21": (0.0, 1.0),
              "lambda22": (0.01, 1.0)}


def _multi_start_bounds_named(names):
    lo = np.zeros(len(names))
    hi = np.full(len(names), 2.0)
    for i, nm in enumerate(names):
        if nm in _MS_OFFSET:
            a, b = _MS_OFFSET[nm]
            lo[i], hi[i] = min(a, b), max(a, b)
    return lo, hi


def _multi_start_bounds(system: GeneralSystem):
    return _multi_start_bounds_named(system.names)


def solve_regime(params: MarketParams, regime: Regime,
                 init: Optional[StrategyProfile] = None,
                 tol: float = RESIDUAL_TOL,
                 n_starts: int = 32,
                 _allow_descent: bool = True) -> EquilibriumSolution:
    """Solve one regime's system; NoEquilibrium (never an exception) when all
    starts fail or the root violates an acceptance condition."""
    system = GeneralSystem(params, regime)
    best_res = math.inf
    best_diag = {}
    for start in _start_ladder(params, regime, init):
        res = damped_newton(system.residual, system.pack(start), tol=tol)
        if res.converged:
            profile, pricing, soc = system.evaluate(res.x)
            if system._accept((profile, pricing, soc)):
                return EquilibriumSolution(
                    params=params, regime=regime, profile=profile, pricing=pricing,
                    soc=soc, residual_norm=res.residual_norm)
            best_diag = {"rejected": "soc_or_domain", "soc_min": soc.min_slack(),
                         "theta_z": profile.theta_z}
        best_res = min(best_res, res.residual_norm)

    if _allow_descent and params.theta_1plus < 1e-2:
        sol = _descend_theta_1plus(params, regime, tol)
        if sol is not None:
            return sol

    if n_starts <= 0:
        return EquilibriumSolution(
            params=params, regime=Regime.NO_EQUILIBRIUM, profile=None,
            pricing=None, soc=None, residual_norm=best_res,
            diagnostics={"attempted_regime": regime.value,
                         "multi_start_exhausted": 0, **best_diag})

    lo, hi = _multi_start_bounds(system)
    sampler_result, roots = _ms(system, lo, hi, n_starts, tol)
    if sampler_result is not None:
        profile, pricing, soc = system.evaluate(sampler_result.x)
        return EquilibriumSolution(
            params=params, regime=regime, profile=profile, pricing=pricing,
            soc=soc, residual_norm=sampler_result.residual_norm,
            multiplicity_flag=len(roots) > 1,
            diagnostics={"multi_start_roots": len(roots)})
    return EquilibriumSolution(
        params=params, regime=Regime.NO_EQUILIBRIUM, profile=None, pricing=None,
        soc=None, residual_norm=best_res,
        diagnostics={"attempted_regime": regime.value,
                     "multi_start_exhausted": n_starts, **best_diag})


def _descend_theta_1plus(params: MarketParams, regime: Regime,
                         tol: float) -> Optional[EquilibriumSolution]:
    """Warm-started geometric descent from theta_1plus = 1e-2 down to the
    target; used when no direct start converges at extreme fast-noise sizes."""
    from dataclasses import replace
    target = params.theta_1plus
    steps = max(2, int(math.ceil(2.0 * math.log10(1e-2 / target))) + 1)
    thetas = np.geomspace(1e-2, target, steps)
    prev: Optional[StrategyProfile] = None
    sol = None
    for t in thetas:
        p = replace(params, theta_1plus=float(t))
        sol = solve_regime(p, regime, init=prev, tol=tol, _allow_descent=False)
        if not sol.found:
            return None
        prev = sol.profile
    return sol


def _ms(system: GeneralSystem, lo, hi, n_starts, tol):
    from scipy.stats import qmc
    sampler = qmc.Sobol(d=system.n, scramble=True, seed=0)
    pts = lo + (hi - lo) * sampler.random(n_starts)
    best = None
    roots: List[np.ndarray] = []
    for p in pts:
        res = damped_newton(system.residual, p, tol=tol)
        if res.converged and system.admissible(res.x):
            if not any(np.max(np.abs(res.x - r)) < 1e-6 for r in roots):
                roots.append(res.x.copy())
            if best is None or res.residual_norm < best.residual_norm:
                best = res
    return best, roots


def assemble_residual(unknowns: Sequence[float], params: MarketParams,
                      regime: Regime) -> np.ndarray:
    """Full fixed-point residual at an unknown vector (layout per
    GeneralSystem for the configuration)."""
    return GeneralSystem(params, regime).residual(np.asarray(unknowns, dtype=float))


def solve_point(params: MarketParams, regime_hint: Optional[Regime] = None,
                init: Optional[StrategyProfile] = None,
                n_starts: int = 32) -> EquilibriumSolution:
    """Solve one parameter point.  With a hint, that regime is attempted
    first; the other regime is the fallback.  Without one, mixed is
    attempted first (regime detection order)."""
    order = [Regime.MIXED, Regime.PURE]
    if regime_hint is Regime.PURE:
        order = [Regime.PURE, Regime.MIXED]
    failures = []
    for regime in order:
        sol = solve_regime(params, regime, init=init, n_starts=n_starts)
        if sol.found:
            return sol
        failures.append((regime.value, sol.residual_norm, sol.diagnostics))
    return EquilibriumSolution(
        params=params, regime=Regime.NO_EQUILIBRIUM, profile=None, pricing=None,
        soc=None, residual_norm=min(f[1] for f in failures),
        diagnostics={"attempts": failures})


def detect_regime(params: MarketParams,
                  init: Optional[StrategyProfile] = None) -> EquilibriumSolution:
    """Mixed first (indifference equilibrium), then pure with its SOC."""
    return solve_point(params, regime_hint=None, init=init)


def regime_exclusivity(sol: EquilibriumSolution) -> dict:
    """Why a mixed equilibrium excludes the pure candidate: either the pure
    root's first-stage concavity fails, or the pure candidate earns the
    informed trader strictly less.  Returns the reason and the margins."""
    from .profits import ProfitEngine

    if sol.regime is not Regime.MIXED:
        raise KyleEqError("exclusivity is recorded for mixed solutions")
    params = sol.params
    system = GeneralSystem(params, Regime.PURE)
    root = None
    for start in _start_ladder(params, Regime.PURE, sol.profile):
        res = damped_newton(system.residual, system.pack(start))
        if res.converged:
            root = system.unpack(res.x)
            break
    if root is None:
        return {"reason": "no_pure_root", "soc4_slack": None,
                "profit_gap": None}
    pricing = price_impact(root, params, flow_moments(root, params))
    G = (root.alpha22 - root.a21 * root.a1) / (root.a1 ** 2 + 1.0)
    slack = pricing.lambda1 - pricing.lambda22 * G * G
    mixed_profit = ProfitEngine(sol.profile, sol.pricing, params).it_value()
    pure_profit = ProfitEngine(root, pricing, params).it_value()
    out = {"soc4_slack": slack, "profit_gap": pure_profit - mixed_profit}
    if slack <= 0.0:
        out["reason"] = "pure_soc4_violated"
    elif pure_profit < mixed_profit:
        out["reason"] = "pure_lower_profit"
    else:
        out["reason"] = "unresolved"
    return out


# -- continuation ------------------------------------------------------------

PATH_STEP_LIMIT = 0.2
PATH_MAX_REFINE = 10


def _profile_vector(profile: StrategyProfile) -> np.ndarray:
    return np.array([profile.a1, profile.theta_z, profile.a21, profile.alpha22,
                     profile.beta11, profile.beta21, profile.beta22,
                     profile.beta23, profile.beta12])


def _interp_params(a: MarketParams, b: MarketParams, t: float) -> MarketParams:
    def mix(x, y):
        return (1 - t) * x + t * y
    gamma = None
    if a.gamma is not None:
        gamma = mix(a.gamma, b.gamma)
    return MarketParams(theta_1plus=mix(a.theta_1plus, b.theta_1plus),
                        theta_2=mix(a.theta_2, b.theta_2),
                        theta_eps=mix(a.theta_eps, b.theta_eps),
                        j1=a.j1, j2=a.j2, gamma=gamma, scale=a.scale)


@dataclass
class PathEvent:
    index: int
    kind: str          # "regime_switch" | "path_break" | "no_equilibrium"
    detail: str = ""


def continue_path(params_grid: Iterable[MarketParams], warm_start: bool = True,
                  regime_hint: Optional[Regime] = None):
    """Warm-started solves along a parameter path with a continuity guard.

    Adjacent solutions further than PATH_STEP_LIMIT apart (inf-norm over the
    strategy vector) trigger parameter-step bisection; exhaustion is recorded
    as a path break and the point restarts cold.

    Returns (solutions, events).
    """
    grid = list(params_grid)
    solutions: List[EquilibriumSolution] = []
    events: List[PathEvent] = []
    prev: Optional[EquilibriumSolution] = None
    for i, params in enumerate(grid):
        init = prev.profile if (warm_start and prev is not None and prev.found) else None
        sol = solve_point(params, regime_hint=regime_hint, init=init)
        if prev is not None and prev.found and sol.found:
            gap = float(np.max(np.abs(_profile_vector(sol.profile)
                                      - _profile_vector(prev.profile))))
            if gap > PATH_STEP_LIMIT:
                sol, broke = _refine_step(grid[i - 1], params, prev, sol)
                if broke:
                    events.append(PathEvent(i, "path_break", f"gap={gap:.3f}"))
                    sol = solve_point(params, regime_hint=regime_hint)
        if not sol.found:
            events.append(PathEvent(i, "no_equilibrium"))
        elif prev is not None and prev.found and sol.regime is not prev.regime:
            events.append(PathEvent(i, "regime_switch",
                                    f"{prev.regime.value}->{sol.regime.value}"))
        solutions.append(sol)
        prev = sol if sol.found else prev
    return solutions, events


def _refine_step(p_from: MarketParams, p_to: MarketParams,
                 sol_from: EquilibriumSolution, sol_to: EquilibriumSolution):
    """Bisect the parameter step until consecutive solutions move smoothly.

    Returns (solution at p_to, path_broke).
    """

    def gap(a: EquilibriumSolution, b: EquilibriumSolution) -> float:
        return float(np.max(np.abs(_profile_vector(a.profile)
                                   - _profile_vector(b.profile))))

    anchor_params, anchor_sol = p_from, sol_from
    target = p_to
    for _ in range(PATH_MAX_REFINE):
        mid = _interp_params(anchor_params, target, 0.5)
        sol_mid = solve_point(mid, init=anchor_sol.profile)
        if sol_mid.found and gap(sol_mid, anchor_sol) <= PATH_STEP_LIMIT:
            anchor_params, anchor_sol = mid, sol_mid
            target = p_to
            sol_end = solve_point(p_to, init=anchor_sol.profile)
            if sol_end.found and gap(sol_end, anchor_sol) <= PATH_STEP_LIMIT:
                return sol_end, False
        else:
            target = mid
    return sol_to, True
