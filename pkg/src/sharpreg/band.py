"""Inhomogeneous confidence bands with data-driven half-width."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .design import TargetFunction
from .estimator import FittedEstimator, check_points
from .exceptions import NonBracketingError

DC_LOW, DC_HIGH = 1e-3, 1e3


def beta_rule(n: int, s: float, alpha: float, Dc: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if Dc <= 0:
        raise ValueError("Dc must be positive")
    return math.sqrt(math.log(1.0 / alpha) / (Dc * math.log(n) ** (2.0 * s / (2.0 * s + 1.0))))


@dataclass(frozen=True)
class ConfidenceBand:
    estimator: FittedEstimator
    alpha: float
    Dc: float
    beta: float

    @property
    def R(self) -> NDArray[np.float64]:
        """``H(x_j)**s`` per cell."""
        e = self.estimator
        return e.grid.H[: e.grid.cells] ** e.fam.s

    def halfwidth(self, x: ArrayLike) -> NDArray[np.float64] | float:
        e = self.estimator
        j = e.cell_index(np.asarray(x, dtype=float))
        out = (1.0 + self.beta) * e.fam.P * self.R[j]
        return float(out) if np.ndim(out) == 0 else out

    def lower(self, x: ArrayLike):
        return self.estimator.evaluate(x) - self.halfwidth(x)

    def upper(self, x: ArrayLike):
        return self.estimator.evaluate(x) + self.halfwidth(x)


def make_band(e: FittedEstimator, alpha: float, Dc: float) -> ConfidenceBand:
    return ConfidenceBand(e, alpha, Dc, beta_rule(e.n, e.fam.s, alpha, Dc))


def simultaneous_cover(
    b: ConfidenceBand, f: TargetFunction | Callable, grid: int | None = None
) -> bool:
    """True iff ``f`` stays inside the band on the check points.

    ``grid`` is the number of uniform check points (at least ``10 * M``);
    the grid points ``x_j`` are always included.
    """
    e = b.estimator
    per_cell = 10 if grid is None else max(10, math.ceil(grid / e.grid.M))
    xs = check_points(e, per_cell)
    if grid is not None:
        xs = np.union1d(xs, np.linspace(0.0, 1.0, grid + 1))
    fx = np.asarray(f(xs), dtype=float)
    return bool(np.all(np.abs(fx - e.evaluate(xs)) <= b.halfwidth(xs)))


def critical_beta(e: FittedEstimator, f: TargetFunction | Callable, per_cell: int = 10) -> float:
    """Smallest ``beta`` for which the band covers ``f`` on the check points."""
    xs = check_points(e, per_cell)
    j = e.cell_index(xs)
    scale = e.fam.P * e.grid.H[j] ** e.fam.s
    ratio = np.abs(np.asarray(f(xs), dtype=float) - e.evaluate(xs)) / scale
    return float(ratio.max() - 1.0)


def coverage_at(critical: Sequence[float], n: int, s: float, alpha: float, Dc: float) -> float:
    beta = beta_rule(n, s, alpha, Dc)
    crit = np.asarray(critical, dtype=float)
    return float(np.mean(crit <= beta))


@dataclass(frozen=True)
class Calibration:
    Dc: float
    coverage: float
    iterations: int
    history: tuple[tuple[float, float], ...]


def calibrate_from_critical(
    critical: Sequence[float],
    n: int,
    s: float,
    alpha: float,
    target: float,
    tol: float = 0.02,
    max_iter: int = 200,
) -> Calibration:
    """Bisection on ``log Dc`` over ``[1e-3, 1e3]`` given per-replicate critical betas.

    Coverage is non-increasing in ``Dc``; that is asserted along the path.
    """
    if not 0.0 < target < 1.0:
        raise ValueError("target must lie in (0, 1)")
    cov = lambda D: coverage_at(critical, n, s, alpha, D)  # noqa: E731
    lo, hi = math.log(DC_LOW), math.log(DC_HIGH)
    c_lo, c_hi = cov(DC_LOW), cov(DC_HIGH)
    history = [(DC_LOW, c_lo), (DC_HIGH, c_hi)]
    if (c_lo - target) * (c_hi - target) > 0 and abs(c_lo - target) > tol and abs(c_hi - target) > tol:
        raise NonBracketingError(
            f"coverage {c_lo:.3f} at Dc={DC_LOW} and {c_hi:.3f} at Dc={DC_HIGH} "
            f"do not bracket target {target}"
        )
    best = min(history, key=lambda h: abs(h[1] - target))
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        D = math.exp(mid)
        c = cov(D)
        assert c_hi <= c <= c_lo, "coverage must be non-increasing in Dc"
        history.append((D, c))
        if abs(c - target) < abs(best[1] - target):
            best = (D, c)
        if abs(c - target) <= tol:
            return Calibration(D, c, it, tuple(history))
        if c > target:
            lo, c_lo = mid, c
        else:
            hi, c_hi = mid, c
    return Calibration(best[0], best[1], max_iter, tuple(history))
