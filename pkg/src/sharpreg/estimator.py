"""The sup-norm estimator: kernel values on a grid, Taylor steps in between."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .bandwidth import (
    ZONE_INTERIOR,
    Grid,
    deterministic_bandwidths,
    make_grid,
    spatial_rate,
)
from .design import Dataset, DesignDensity, TargetFunction
from .exceptions import UnsupportedSmoothnessError
from .local_poly import boundary_estimate, derivative_estimates
from .optimal_recovery import KernelFamily, is_supported

FloorMode = Literal["density", "unscaled"]


@dataclass(frozen=True)
class FittedEstimator:
    grid: Grid
    fam: KernelFamily
    values: NDArray[np.float64]
    derivs: NDArray[np.float64]
    gamma: NDArray[np.bool_]
    h_n: float
    t_n: float
    n: int
    floored: NDArray[np.bool_]

    @property
    def k(self) -> int:
        return self.fam.k

    def cell_index(self, x: ArrayLike) -> NDArray[np.intp]:
        j = np.searchsorted(self.grid.points, x, side="right") - 1
        return np.clip(j, 0, self.grid.cells - 1)

    def evaluate(self, x: ArrayLike) -> NDArray[np.float64] | float:
        xa = np.asarray(x, dtype=float)
        if np.any((xa < 0.0) | (xa > 1.0)) or np.any(np.isnan(xa)):
            raise ValueError("estimator is defined on [0, 1] only")
        j = self.cell_index(xa)
        out = self.values[j].copy() if xa.ndim else np.float64(self.values[j])
        if self.k:
            off = xa - self.grid.points[j]
            taylor = np.zeros_like(off, dtype=float)
            fact = 1.0
            for m in range(1, self.k + 1):
                fact *= m
                taylor = taylor + self.derivs[j, m - 1] / fact * off**m
            out = out + taylor * self.gamma[j]
        return float(out) if np.ndim(out) == 0 else out

    __call__ = evaluate


def kernel_sums(
    d: Dataset, fam: KernelFamily, x_j: float, H_j: float
) -> tuple[float, float]:
    """``(sum Y_i K_ij, sum K_ij)`` over the points inside the kernel support."""
    scale = fam.c * H_j
    lo = np.searchsorted(d.xs, x_j - fam.T * scale, side="left")
    hi = np.searchsorted(d.xs, x_j + fam.T * scale, side="right")
    w = fam.kernel((d.xs[lo:hi] - x_j) / scale)
    return float(np.dot(w, d.ys[lo:hi])), float(w.sum())


def nw_value(
    num: float, den: float, n: int, fam: KernelFamily, H_j: float, delta_n: float,
    floor: FloorMode = "density",
) -> tuple[float, bool]:
    """Ratio of normalised kernel sums with the denominator floored at ``delta_n``.

    ``"unscaled"`` normalises both sums by ``n H_j``; ``"density"`` by
    ``n c_s H_j``, so the floored quantity estimates the design density.
    """
    norm = n * H_j * (fam.c if floor == "density" else 1.0)
    den_n = den / norm
    floored = den_n < delta_n
    return (num / norm) / max(delta_n, den_n), bool(floored)


def fit(
    d: Dataset, fam: KernelFamily, Q: float | None = None, floor: FloorMode = "density"
) -> FittedEstimator:
    """Fit the estimator.

    ``Q`` (the sup-norm radius of the function class) is accepted for
    interface symmetry but not used by the construction.
    """
    if not is_supported(fam.s):
        raise UnsupportedSmoothnessError(f"s={fam.s} unsupported")
    grid = make_grid(d, fam)
    n = d.n
    det = deterministic_bandwidths(n, fam.s, fam.sigma, fam.L, 1.0, 0.5)
    k = fam.k
    npts = len(grid.points)
    values = np.zeros(npts)
    floored = np.zeros(npts, dtype=bool)
    derivs = np.zeros((npts, k))
    gamma = np.zeros(npts, dtype=bool)
    for j, x_j in enumerate(grid.points):
        x_j = float(x_j)
        if grid.zone[j] == ZONE_INTERIOR:
            num, den = kernel_sums(d, fam, x_j, float(grid.H[j]))
            values[j], floored[j] = nw_value(num, den, n, fam, float(grid.H[j]), grid.delta_n, floor)
        else:
            values[j] = boundary_estimate(d, x_j, det.t_n, k)
        if k:
            derivs[j], gamma[j] = derivative_estimates(d, x_j, det.h_n, k)
    return FittedEstimator(grid, fam, values, derivs, gamma, det.h_n, det.t_n, n, floored)


@dataclass(frozen=True)
class SupRisk:
    full: float
    discretized: float


def check_points(e: FittedEstimator, per_cell: int = 10) -> NDArray[np.float64]:
    """Uniform grid with ``per_cell`` points per grid cell, merged with the grid itself."""
    uniform = np.linspace(0.0, 1.0, per_cell * e.grid.M + 1)
    return np.union1d(uniform, e.grid.points)


def sup_risk(
    e: FittedEstimator,
    f: TargetFunction,
    mu: DesignDensity | None = None,
    normalization: Literal["none", "spatial"] = "none",
    per_cell: int = 10,
) -> SupRisk:
    """Sup-norm error, optionally divided pointwise by the spatial rate.

    The discretised variant runs over the cell anchors only.
    """
    xs = check_points(e, per_cell)
    err = np.abs(np.asarray(e.evaluate(xs)) - f(xs))
    anchors = e.grid.anchors
    err_d = np.abs(e.values[: len(anchors)] - f(anchors))
    if normalization == "spatial":
        if mu is None:
            raise ValueError("spatial normalisation needs the true design density")
        err = err / spatial_rate(e.n, e.fam.s, mu(xs))
        err_d = err_d / spatial_rate(e.n, e.fam.s, mu(anchors))
    elif normalization != "none":
        raise ValueError(f"unknown normalization {normalization!r}")
    return SupRisk(float(err.max()), float(err_d.max()))
