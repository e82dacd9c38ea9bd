"""Damped Newton iteration with finite-difference Jacobian and Armijo
backtracking.

Residual callables may raise (concavity or degeneracy at an infeasible trial
point); the line search treats such points as infinitely bad and backtracks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

FD_STEP = 1e-7
MAX_ITER = 200
RESIDUAL_TOL = 1e-11


@dataclass
class NewtonResult:
    x: np.ndarray
    residual_norm: float
    converged: bool
    iterations: int
    message: str = ""


def _safe_eval(f: Callable, x: np.ndarray) -> Optional[np.ndarray]:
    try:
        r = np.asarray(f(x), dtype=float)
    except Exception:
        return None
    if not np.all(np.isfinite(r)):
        return None
    return r


def fd_jacobian(f: Callable, x: np.ndarray, fx: np.ndarray) -> Optional[np.ndarray]:
    """Central finite differences, step 1e-7 * max(1, |x_i|)."""
    n = len(x)
    J = np.empty((len(fx), n))
    for i in range(n):
        h = FD_STEP * max(1.0, abs(x[i]))
        xp = x.copy(); xp[i] += h
        xm = x.copy(); xm[i] -= h
        rp = _safe_eval(f, xp)
        rm = _safe_eval(f, xm)
        if rp is None or rm is None:
            # fall back to one-sided difference if a side is infeasible
            if rp is not None:
                J[:, i] = (rp - fx) / h
            elif rm is not None:
                J[:, i] = (fx - rm) / h
            else:
                return None
        else:
            J[:, i] = (rp - rm) / (2.0 * h)
    return J


def damped_newton(f: Callable, x0: np.ndarray, tol: float = RESIDUAL_TOL,
                  max_iter: int = MAX_ITER) -> NewtonResult:
    """Newton iteration on ||f||_inf with Armijo backtracking on ||f||_2^2."""
    x = np.asarray(x0, dtype=float).copy()
    fx = _safe_eval(f, x)
    if fx is None:
        return NewtonResult(x=x, residual_norm=np.inf, converged=False,
                            iterations=0, message="infeasible start")
    for it in range(1, max_iter + 1):
        norm = float(np.max(np.abs(fx)))
        if norm <= tol:
            return NewtonResult(x=x, residual_norm=norm, converged=True, iterations=it - 1)
        J = fd_jacobian(f, x, fx)
        if J is None:
            return NewtonResult(x=x, residual_norm=norm, converged=False,
                                iterations=it, message="jacobian evaluation failed")
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(J, -fx, rcond=None)
        if not np.all(np.isfinite(step)):
            return NewtonResult(x=x, residual_norm=norm, converged=False,
                                iterations=it, message="singular step")

        merit0 = float(np.dot(fx, fx))
        alpha = 1.0
        accepted = False
        for _ in range(40):
            x_trial = x + alpha * step
            f_trial = _safe_eval(f, x_trial)
            if f_trial is not None:
                merit = float(np.dot(f_trial, f_trial))
                if merit <= merit0 * (1.0 - 1e-4 * alpha) or merit < merit0:
                    x, fx = x_trial, f_trial
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            return NewtonResult(x=x, residual_norm=float(np.max(np.abs(fx))),
                                converged=False, iterations=it,
                                message="line search stalled")
    return NewtonResult(x=x, residual_norm=float(np.max(np.abs(fx))),
                        converged=False, iterations=max_iter, message="max iterations")
