"""Hardest cubical subfamily: disjoint optimal-recovery bumps scaled to the local rate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .bandwidth import deterministic_bandwidths
from .design import DesignDensity, Interval, holder_check
from .exceptions import TooSmallIntervalError
from .optimal_recovery import KernelFamily


@dataclass(frozen=True)
class CubicalFamily:
    fam: KernelFamily
    interval: Interval
    n: int
    eps: float
    Xi: float
    h_I: float
    centers: NDArray[np.float64]
    h: NDArray[np.float64]

    @property
    def M(self) -> int:
        return len(self.centers)

    @property
    def half_widths(self) -> NDArray[np.float64]:
        """Support half-width ``c_s T_s h_j`` of each bump."""
        return self.fam.c * self.fam.T * self.h

    @property
    def amplitudes(self) -> NDArray[np.float64]:
        """Bump heights ``L c_s^s h_j^s phi_s(0)`` at the centres."""
        f = self.fam
        return f.L * f.c**f.s * self.h**f.s * f.phi0

    def bump(self, j: int, x: ArrayLike) -> NDArray[np.float64]:
        f = self.fam
        scale = f.c * self.h[j]
        return f.L * scale**f.s * f.phi((np.asarray(x, dtype=float) - self.centers[j]) / scale)

    def member(self, theta: ArrayLike) -> Callable[[ArrayLike], NDArray[np.float64]]:
        th = np.asarray(theta, dtype=float)
        if th.shape != (self.M,):
            raise ValueError(f"theta must have length {self.M}")
        if np.any(np.abs(th) > 1.0):
            raise ValueError("theta must lie in [-1, 1]^M")

        def f(x: ArrayLike) -> NDArray[np.float64]:
            xa = np.asarray(x, dtype=float)
            out = np.zeros_like(xa)
            for j in np.flatnonzero(th):
                out = out + th[j] * self.bump(j, xa)
            return out

        return f

    def random_vertex(self, rng: np.random.Generator) -> NDArray[np.float64]:
        return (1.0 - self.eps) * rng.choice([-1.0, 1.0], size=self.M)

    def min_gap(self) -> float:
        """Smallest distance between adjacent bump supports (inf with one bump)."""
        if self.M < 2:
            return math.inf
        hw = self.half_widths
        return float(np.min(np.diff(self.centers) - hw[:-1] - hw[1:]))

    @property
    def interval_condition(self) -> float:
        """``|I_n| * n**(eps / (2s + 1))``, recorded only."""
        return self.interval.length * self.n ** (self.eps / (2.0 * self.fam.s + 1.0))


def build_family(
    fam: KernelFamily,
    mu: DesignDensity,
    n: int,
    I_n: tuple[float, float] | Interval = (0.0, 1.0),
    eps: float = 0.1,
    search_points: int = 1000,
) -> CubicalFamily:
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    I = I_n if isinstance(I_n, Interval) else Interval(float(I_n[0]), float(I_n[1]), float(I_n[0]))
    s, k = fam.s, fam.k
    h_of = lambda x: deterministic_bandwidths(n, s, fam.sigma, fam.L, mu, x).h_mu  # noqa: E731
    probe = np.linspace(I.lo, I.hi, search_points)
    h_I = max(h_of(float(x)) for x in probe)
    Xi = 2.0 * fam.T * fam.c * (2.0 ** (1.0 / (s - k)) + 1.0) * h_I
    M = int(math.floor(I.length / Xi))
    if M == 0:
        raise TooSmallIntervalError(f"interval of length {I.length:.4g} holds no bump of spacing {Xi:.4g}")
    centers = I.lo + Xi * np.arange(1, M + 1)
    h = np.array([h_of(float(x)) for x in centers])
    return CubicalFamily(fam, I, n, eps, Xi, h_I, centers, h)


@dataclass(frozen=True)
class MembershipReport:
    worst_ratio: float
    trials: int
    all_passed: bool
    min_gap: float


def verify_membership(
    c: CubicalFamily, trials: int = 50, seed: int = 0, grid: int = 20_000
) -> MembershipReport:
    if trials < 10:
        raise ValueError("at least 10 trials")
    rng = np.random.default_rng(seed)
    worst = 0.0
    ok = True
    for _ in range(trials):
        rep = holder_check(c.member(c.random_vertex(rng)), c.fam.s, c.fam.L, grid)
        worst = max(worst, rep.worst_ratio)
        ok &= rep.passed
    return MembershipReport(worst, trials, ok, c.min_gap())
