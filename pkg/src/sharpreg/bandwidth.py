"""Data-driven local bandwidths, the discretisation grid and deterministic rates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .design import Dataset, DesignDensity, Interval
from .exceptions import DegenerateSampleError
from .optimal_recovery import KernelFamily

MIN_GRID_SAMPLE = 8

ZONE_LEFT, ZONE_INTERIOR, ZONE_RIGHT = 1, 2, 3


def interval_at(x: float, h: float) -> Interval:
    """``[x, x + h]`` for ``x <= 1/2``, ``[x - h, x]`` otherwise, clipped to ``[0, 1]``."""
    if x <= 0.5:
        return Interval(x, min(x + h, 1.0), x)
    return Interval(max(x - h, 0.0), x, x)


def one_sided_distances(d: Dataset, x: float) -> NDArray[np.float64]:
    """Sorted distances from ``x`` to the design points on the side ``I(x, .)`` grows into."""
    if x <= 0.5:
        a = np.searchsorted(d.xs, x, side="left")
        return d.xs[a:] - x
    b = np.searchsorted(d.xs, x, side="right")
    return (x - d.xs[:b])[::-1]


@dataclass(frozen=True)
class Bandwidth:
    h: float
    count: int
    feasible: bool


def local_bandwidth(d: Dataset, x: float, s: float) -> Bandwidth:
    """Smallest ``h`` in ``[0, 1]`` with ``h**s >= sqrt(log n / (n * mass(I(x, h))))``.

    The empirical mass is a right-continuous step function of ``h`` jumping at
    the one-sided distances ``d_1 <= d_2 <= ...``. Any feasible ``h`` holding
    ``m`` points satisfies ``h >= max(d_m, (log n / m)**(1/(2s)))`` and that
    bound is itself feasible, so the answer is the minimum over ``m``.
    """
    n = d.n
    dist = one_sided_distances(d, x)
    if dist.size == 0:
        return Bandwidth(1.0, 0, False)
    m = np.arange(1, dist.size + 1)
    cand = np.maximum(dist, (math.log(n) / m) ** (1.0 / (2.0 * s)))
    best = int(np.argmin(cand))
    h = float(cand[best])
    if h > 1.0:
        return Bandwidth(1.0, int(dist.size), False)
    count = int(np.searchsorted(dist, h, side="right"))
    return Bandwidth(h, count, True)


def bandwidth(d: Dataset, x: float, s: float) -> float:
    return local_bandwidth(d, x, s).h


def grid_spacing(n: int, s: float) -> float:
    return math.log(n) ** (-2.0 * s / (2.0 * s + 1.0)) * n ** (-1.0 / (2.0 * s + 1.0))


@dataclass(frozen=True)
class Grid:
    """Discretisation points ``x_0 = 0, ..., x_M = 1`` and their bandwidths.

    ``points[:M]`` are the multiples ``j * delta`` (``M = floor(1/delta) + 1``
    of them); ``points[M] = 1`` closes the last, shorter cell. ``zone`` tags
    each point as left boundary (1), interior (2) or right boundary (3).
    """

    points: NDArray[np.float64]
    delta: float
    M: int
    H: NDArray[np.float64]
    feasible: NDArray[np.bool_]
    HM: float
    tau: float
    delta_n: float
    zone: NDArray[np.int8]

    @property
    def cells(self) -> int:
        return len(self.points) - 1

    @property
    def anchors(self) -> NDArray[np.float64]:
        """Left endpoints of the cells, i.e. the index set the discretised risk runs over."""
        return self.points[:-1]

    def indices(self, zone: int) -> NDArray[np.intp]:
        return np.flatnonzero(self.zone == zone)

    @property
    def infeasible_count(self) -> int:
        return int(np.count_nonzero(~self.feasible))


def make_grid(d: Dataset, fam: KernelFamily) -> Grid:
    n = d.n
    if n < MIN_GRID_SAMPLE:
        raise DegenerateSampleError(f"need at least {MIN_GRID_SAMPLE} observations, got {n}")
    s = fam.s
    delta = grid_spacing(n, s)
    last = int(math.floor(1.0 / delta))
    pts = np.arange(last + 1) * delta
    if pts[-1] < 1.0:
        pts = np.append(pts, 1.0)
    bws = [local_bandwidth(d, float(x), s) for x in pts]
    H = np.array([b.h for b in bws])
    feasible = np.array([b.feasible for b in bws])
    HM = float(H[: last + 1].max())
    delta_n = 1.0 / math.log(n)
    tau = min(2.0 * fam.c * fam.T * HM, delta_n)
    # boundary sets are closed, so ties at tau go to the boundary
    zone = np.full(len(pts), ZONE_INTERIOR, dtype=np.int8)
    zone[pts <= tau] = ZONE_LEFT
    zone[pts >= 1.0 - tau] = ZONE_RIGHT
    return Grid(pts, delta, last + 1, H, feasible, HM, tau, delta_n, zone)


@dataclass(frozen=True)
class DeterministicBandwidths:
    h_n: float
    t_n: float
    h_mu: float
    r_mu: float


def deterministic_bandwidths(
    n: int, s: float, sigma: float, L: float, mu: DesignDensity | float, x: float
) -> DeterministicBandwidths:
    expo = 1.0 / (2.0 * s + 1.0)
    scale = (sigma / L) ** (2.0 * expo)
    dens = float(mu(x)) if callable(mu) else float(mu)
    h_mu = (math.log(n) / (n * dens)) ** expo
    return DeterministicBandwidths(
        h_n=scale * (math.log(n) / n) ** expo,
        t_n=scale * n ** (-expo),
        h_mu=h_mu,
        r_mu=h_mu**s,
    )


def spatial_rate(n: int, s: float, density_values: NDArray[np.float64]) -> NDArray[np.float64]:
    """``(log n / (n mu(x)))**(s / (2s + 1))`` evaluated pointwise."""
    return (math.log(n) / (n * np.asarray(density_values, dtype=float))) ** (s / (2.0 * s + 1.0))
