"""Optimal recovery functions, kernels and sharp constants.

The extremal function ``phi_s`` (largest value at 0 among functions in the
Hölder ball of radius 1 with unit L2 norm) is available in closed form only
for ``s`` in ``(0, 1]`` and for ``s = 2``. Everything downstream (the kernel
``K_s = phi_s / int phi_s``, the sharp constant ``P``, the bandwidth
multiplier ``c_s``) is computed here once and cached on a frozen
:class:`KernelFamily`.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import UnsupportedSmoothnessError

BREAKPOINT_CUTOFF = 1e-14


def is_supported(s: float) -> bool:
    return (0.0 < s <= 1.0) or s == 2.0


def holder_degree(s: float) -> int:
    """Largest integer strictly smaller than ``s``."""
    return int(math.ceil(s)) - 1


@dataclass(frozen=True)
class QuadraticPieces:
    """The even, piecewise quadratic function ``g_2`` on the half line.

    Piece ``j`` lives on ``[lo[j], hi[j]]`` and equals
    ``level[j] + curv[j] * (t - center[j])**2``.
    """

    q: float
    lo: NDArray[np.float64]
    hi: NDArray[np.float64]
    center: NDArray[np.float64]
    level: NDArray[np.float64]
    curv: NDArray[np.float64]
    t_inf: float

    @classmethod
    def build(cls, q: float, cutoff: float = BREAKPOINT_CUTOFF) -> "QuadraticPieces":
        r = math.sqrt(1.0 + q)
        rq = math.sqrt(q)
        lo, hi, center, level, curv = [], [], [], [], []
        t_even = 0.0
        t_odd_prev = 0.0
        j = 0
        while rq**j * r >= cutoff:
            width = rq**j * r
            lo.append(t_odd_prev)
            center.append(t_even)
            hi.append(t_even + width)
            level.append((-1.0) ** j * q**j)
            curv.append(0.5 * (-1.0) ** (j + 1))
            t_odd_prev = t_even + width
            t_even += 2.0 * width
            j += 1
        arr = lambda v: np.asarray(v, dtype=float)  # noqa: E731
        return cls(
            q=q,
            lo=arr(lo),
            hi=arr(hi),
            center=arr(center),
            level=arr(level),
            curv=arr(curv),
            t_inf=2.0 * r / (1.0 - rq),
        )

    @property
    def breakpoints(self) -> NDArray[np.float64]:
        """``t_0, t_1, t_2, ...`` merged and sorted (even centers and odd knots)."""
        return np.unique(np.concatenate([self.lo, self.center, self.hi]))

    def __call__(self, t: ArrayLike) -> NDArray[np.float64]:
        a = np.abs(np.asarray(t, dtype=float))
        j = np.searchsorted(self.hi, a, side="left")
        inside = j < len(self.hi)
        jj = np.where(inside, j, 0)
        val = self.level[jj] + self.curv[jj] * (a - self.center[jj]) ** 2
        return np.where(inside, val, 0.0)

    def value(self, t: float) -> float:
        """Scalar evaluation without array overhead (quadrature integrands)."""
        a = abs(t)
        hi = self._hi_list
        j = bisect.bisect_left(hi, a)
        if j == len(hi):
            return 0.0
        return self._level_list[j] + self._curv_list[j] * (a - self._center_list[j]) ** 2

    def __post_init__(self) -> None:
        for name in ("hi", "level", "curv", "center"):
            object.__setattr__(self, f"_{name}_list", getattr(self, name).tolist())

    def integral(self, power: int = 1) -> float:
        """Exact ``int_R g^power`` for power 1 or 2 by summing polynomial pieces."""
        u_hi = self.hi - self.center
        u_lo = self.lo - self.center
        a, b = self.level, self.curv
        if power == 1:
            half = a * (self.hi - self.lo) + b * (u_hi**3 - u_lo**3) / 3.0
        elif power == 2:
            half = (
                a * a * (self.hi - self.lo)
                + 2.0 * a * b * (u_hi**3 - u_lo**3) / 3.0
                + b * b * (u_hi**5 - u_lo**5) / 5.0
            )
        else:
            raise ValueError("power must be 1 or 2")
        return 2.0 * math.fsum(half)


def s2_radicals() -> tuple[float, float]:
    """Return ``(q, theta)`` for ``s = 2``."""
    r33 = math.sqrt(33.0)
    q = (3.0 + r33 - math.sqrt(26.0 + 6.0 * r33)) ** 2 / 16.0
    theta = 2.0 * (23.0 * q * q - 14.0 * q + 23.0) * math.sqrt(1.0 + q) / (30.0 * (1.0 - q**2.5))
    return q, theta


@dataclass(frozen=True)
class KernelFamily:
    """Optimal recovery data for smoothness ``s`` and model scale ``(sigma, L)``.

    ``phi0``, ``T``, ``integral``, ``B1`` and ``normK2`` describe the
    standard problem and depend on ``s`` only; ``c`` and ``P`` carry the
    ``(sigma, L)`` scaling.
    """

    s: float
    sigma: float
    L: float
    phi0: float
    T: float
    integral: float
    c: float
    P: float
    B1: float
    normK2: float
    q: float | None = None
    theta: float | None = None
    pieces: QuadraticPieces | None = field(default=None, repr=False, compare=False)

    @property
    def k(self) -> int:
        return holder_degree(self.s)

    @property
    def knots(self) -> NDArray[np.float64]:
        """Points where ``phi_s`` fails to be smooth, inside ``[-T, T]``."""
        if self.pieces is None:
            return np.array([-self.T, 0.0, self.T])
        half = self.pieces.breakpoints / self.theta ** 0.2
        half = np.append(half[half < self.T], self.T)
        return np.concatenate([-half[::-1], half])

    def phi(self, t: ArrayLike) -> NDArray[np.float64]:
        a = np.abs(np.asarray(t, dtype=float))
        if self.pieces is None:
            out = np.maximum(self.phi0 - a**self.s, 0.0)
        else:
            out = self.theta ** -0.4 * self.pieces(self.theta ** 0.2 * a)
        return np.where(a > self.T, 0.0, out)

    def kernel(self, t: ArrayLike) -> NDArray[np.float64]:
        return self.phi(t) / self.integral

    def phi_at(self, t: float) -> float:
        """Scalar ``phi_s(t)``; same values as :meth:`phi`, cheaper per call."""
        a = abs(t)
        if a > self.T:
            return 0.0
        if self.pieces is None:
            return max(self.phi0 - a**self.s, 0.0)
        return self.theta ** -0.4 * self.pieces.value(self.theta ** 0.2 * a)

    def kernel_at(self, t: float) -> float:
        return self.phi_at(t) / self.integral

    def breakpoints_s2(self) -> NDArray[np.float64] | None:
        """Sequence ``t_0 <= t_1 <= ...`` of the unscaled ``g_2`` (None for s <= 1)."""
        if self.pieces is None:
            return None
        return self.pieces.breakpoints


def make_family(s: float, sigma: float = 1.0, L: float = 1.0) -> KernelFamily:
    """Build the kernel family for smoothness ``s``.

    Raises
    ------
    UnsupportedSmoothnessError
        Unless ``s`` lies in ``(0, 1]`` or equals 2, the only values for
        which the optimal recovery function is known in closed form.
    """
    s = float(s)
    if not is_supported(s):
        raise UnsupportedSmoothnessError(
            f"s={s!r} unsupported: optimal recovery kernel is only available for s in (0, 1] or s = 2"
        )
    if sigma <= 0 or L <= 0:
        raise ValueError("sigma and L must be positive")

    expo = 1.0 / (2.0 * s + 1.0)
    c = (sigma / L) ** (2.0 * expo) * (2.0 * expo) ** expo
    q = theta = None
    pieces = None
    if s <= 1.0:
        phi0 = ((2.0 * s + 1.0) * (s + 1.0) / (4.0 * s * s)) ** (s * expo)
        T = phi0 ** (1.0 / s)
        integral = 2.0 * s / (s + 1.0) * phi0 ** ((s + 1.0) / s)
        normK2 = 1.0 / integral
        B1 = 1.0 / (2.0 * s) / integral
    else:
        q, theta = s2_radicals()
        pieces = QuadraticPieces.build(q)
        phi0 = theta ** -0.4
        T = theta ** -0.2 * pieces.t_inf
        integral = theta ** -0.6 * pieces.integral(1)
        normK2 = math.sqrt(pieces.integral(2) / theta) / integral
        B1 = phi0 - normK2
    P = sigma ** (2.0 * s * expo) * L**expo * phi0 * (2.0 * expo) ** (s * expo)
    return KernelFamily(
        s=s,
        sigma=float(sigma),
        L=float(L),
        phi0=phi0,
        T=T,
        integral=integral,
        c=c,
        P=P,
        B1=B1,
        normK2=normK2,
        q=q,
        theta=theta,
        pieces=pieces,
    )


def phi_value(fam: KernelFamily, t: ArrayLike) -> NDArray[np.float64] | float:
    out = fam.phi(t)
    return float(out) if np.ndim(out) == 0 else out


def kernel_value(fam: KernelFamily, t: ArrayLike) -> NDArray[np.float64] | float:
    out = fam.kernel(t)
    return float(out) if np.ndim(out) == 0 else out


def minimax_error(fam: KernelFamily, eps: float) -> float:
    """Optimal recovery error at 0 for noise level ``eps`` and radius ``fam.L``."""
    s = fam.s
    return fam.phi0 * fam.L ** (1.0 / (2.0 * s + 1.0)) * eps ** (2.0 * s / (2.0 * s + 1.0))
