"""Gallager-A density evolution over the BSC and threshold search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import DegreeDistribution


@dataclass(frozen=True)
class DeConfig:
    """Stopping rule for density evolution.

    The defaults (100 iterations, target 1e-10) are the budget under which the
    recursion reproduces the reference Gallager-A threshold table; use
    :meth:`asymptotic` for the long-run limit.
    """

    max_iter: int = 100
    tol: float = 1e-10
    precision: float = 1e-4

    def __post_init__(self):
        if self.tol <= 0 or self.precision <= 0 or self.max_iter < 0:
            raise ValueError("tol and precision must be positive, max_iter non-negative")

    @classmethod
    def asymptotic(cls) -> DeConfig:
        return cls(max_iter=5000, tol=1e-9)


@dataclass(frozen=True)
class DeTrace:
    epsilon: float
    iterates: tuple[float, ...]
    converged: bool
    iterations_used: int


def ga_step(x: float, epsilon: float, dist: DegreeDistribution) -> float:
    """One Gallager-A update of the variable-to-check error probability."""
    if not (0 <= x <= 1 and 0 <= epsilon <= 1):
        raise ValueError("x and epsilon must lie in [0, 1]")
    q = (1 - dist.rho(1 - 2 * x)) / 2
    out = 0.0
    for d, c in dist.lambda_coeffs:
        out += c * (epsilon * (1 - (1 - q) ** (d - 1)) + (1 - epsilon) * q ** (d - 1))
    return min(max(out, 0.0), 1.0)


def evolve(epsilon: float, dist: DegreeDistribution, max_iter: int = 100, tol: float = 1e-10) -> DeTrace:
    if tol <= 0:
        raise ValueError("tol must be positive")
    xs = [float(epsilon)]
    x = xs[0]
    for it in range(max_iter + 1):
        if x <= tol:
            return DeTrace(epsilon, tuple(xs), True, it)
        if it == max_iter:
            break
        x = ga_step(x, epsilon, dist)
        xs.append(x)
    return DeTrace(epsilon, tuple(xs), False, max_iter)


def _converges(epsilon: float, dist: DegreeDistribution, cfg: DeConfig) -> bool:
    # same recursion as ga_step without storing the trace
    lam = dist.lambda_coeffs
    rho = dist.rho_coeffs
    x = epsilon
    for _ in range(cfg.max_iter):
        if x <= cfg.tol:
            return True
        y = 1 - 2 * x
        q = (1 - sum(c * y ** (d - 1) for d, c in rho)) / 2
        x = sum(c * (epsilon * (1 - (1 - q) ** (d - 1)) + (1 - epsilon) * q ** (d - 1)) for d, c in lam)
    return x <= cfg.tol


def threshold(dist: DegreeDistribution, cfg: DeConfig = DeConfig()) -> float:
    """Largest epsilon in [0, 0.5] (to ``cfg.precision``) for which DE converges."""
    lo, hi = 0.0, 0.5
    if _converges(hi, dist, cfg):
        return hi
    while hi - lo > cfg.precision:
        mid = (lo + hi) / 2
        if _converges(mid, dist, cfg):
            lo = mid
        else:
            hi = mid
    return lo


def convergence_grid(dist: DegreeDistribution, cfg: DeConfig = DeConfig(), points: int = 50) -> np.ndarray:
    """Convergence flags on a uniform epsilon grid over (0, 0.5], for monotonicity checks."""
    eps = np.linspace(0.5 / points, 0.5, points)
    return np.array([_converges(float(e), dist, cfg) for e in eps])
