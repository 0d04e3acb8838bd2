"""Deterministic derivative-free maximizers.

``maximize_scalar`` scans a uniform grid and refines the best bracket by
golden-section search; ``maximize_simplex`` runs Nelder-Mead (through SciPy)
from ``x0`` and from seeded random restart points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

SCAN_POINTS = 64
INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerResult:
    best_params: tuple[float, ...]
    best_value: float
    evaluations: int
    converged: bool


def maximize_scalar(
    objective: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-9,
    scan_points: int = SCAN_POINTS,
) -> OptimizerResult:
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    xs = np.linspace(lo, hi, scan_points)
    fs = [float(objective(x)) for x in xs]
    evals = scan_points
    i = int(np.argmax(fs))
    best_x, best_f = float(xs[i]), fs[i]

    a, b = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, scan_points - 1)])
    c, d = b - INV_PHI * (b - a), a + INV_PHI * (b - a)
    fc, fd = float(objective(c)), float(objective(d))
    evals += 2
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = float(objective(c))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = float(objective(d))
        evals += 1
    for x, f in ((c, fc), (d, fd)):
        if f > best_f:
            best_x, best_f = x, f
    return OptimizerResult((best_x,), best_f, evals, True)


def maximize_simplex(
    objective: Callable[[Sequence[float]], float],
    x0: Sequence[float],
    restarts: int = 8,
    tol: float = 1e-8,
    seed: int = 0,
    step: float = 0.5,
    spread: float = np.pi,
    max_iter: int = 20_000,
) -> OptimizerResult:
    """Nelder-Mead maximization with ``restarts`` starting points.

    The first start is ``x0``; the others are drawn uniformly from
    ``[-spread, spread]^n`` by ``numpy.random.default_rng(seed)``, so a run with
    more restarts always extends the sequence of a run with fewer.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    if n < 1:
        raise ValueError("need at least one parameter")
    rng = np.random.default_rng(seed)
    evals = 0
    best: tuple[np.ndarray, float, bool] | None = None

    def neg(x):
        nonlocal evals
        evals += 1
        return -float(objective(x))

    for k in range(max(restarts, 1)):
        start = x0 if k == 0 else rng.uniform(-spread, spread, n)
        simplex = np.vstack([start] + [start + step * e for e in np.eye(n)])
        res = minimize(
            neg, start, method="Nelder-Mead",
            options={"initial_simplex": simplex, "xatol": tol, "fatol": 1e-15, "maxiter": max_iter,
                     "maxfev": max_iter},
        )
        diameter = float(np.max(np.abs(res.final_simplex[0] - res.final_simplex[0][0])))
        x = np.asarray(res.x, dtype=float)
        value = float(objective(x))
        evals += 1
        if best is None or value > best[1]:
            best = (x, value, diameter <= tol)
    x, value, converged = best
    return OptimizerResult(tuple(float(v) for v in x), value, evals, converged)


def wrap_angle(theta: float) -> float:
    """Angle reduced to [0, 2*pi)."""
    return float(np.mod(theta, 2.0 * np.pi))
