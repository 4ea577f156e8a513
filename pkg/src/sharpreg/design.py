"""Design densities, data generation and empirical-measure primitives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import ConfigError, EmptyIntervalError
from .optimal_recovery import holder_degree

CDF_RESOLUTION = 2**14

Func = Callable[[NDArray[np.float64]], NDArray[np.float64]]


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]``; ``anchor`` is the point the interval was built from."""

    lo: float
    hi: float
    anchor: float

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class DesignDensity:
    """Positive density on ``[0, 1]`` with an inverse-CDF lookup table.

    ``nu`` and ``rho`` (Hölder smoothness of the density) are kept as
    metadata only; no algorithm consumes them.
    """

    density: Func
    lower_bound: float
    label: str
    grid: NDArray[np.float64] = field(repr=False)
    cdf_table: NDArray[np.float64] = field(repr=False)
    nu: float | None = None
    rho: float | None = None

    def __call__(self, x: ArrayLike) -> NDArray[np.float64]:
        return self.density(np.asarray(x, dtype=float))

    def cdf(self, x: ArrayLike) -> NDArray[np.float64]:
        return np.interp(x, self.grid, self.cdf_table)

    def quantile(self, u: ArrayLike) -> NDArray[np.float64]:
        return np.interp(u, self.cdf_table, self.grid)


def make_density(
    density: Func,
    label: str,
    lower_bound: float | None = None,
    resolution: int = CDF_RESOLUTION,
    nu: float | None = None,
    rho: float | None = None,
) -> DesignDensity:
    grid = np.linspace(0.0, 1.0, resolution + 1)
    vals = np.asarray(density(grid), dtype=float)
    if np.any(vals <= 0):
        raise ConfigError(f"density {label!r} must be bounded away from 0 on [0, 1]")
    q = float(vals.min()) if lower_bound is None else lower_bound
    # Simpson on pairs of cells keeps the table exact for quadratic densities
    mid = np.asarray(density(0.5 * (grid[:-1] + grid[1:])), dtype=float)
    cells = (vals[:-1] + 4.0 * mid + vals[1:]) / (6.0 * resolution)
    cdf = np.concatenate([[0.0], np.cumsum(cells)])
    total = cdf[-1]
    if abs(total - 1.0) > 1e-6:
        raise ConfigError(f"density {label!r} integrates to {total!r}, not 1")
    cdf = cdf / total
    return DesignDensity(density, q, label, grid, cdf, nu, rho)


def uniform_density() -> DesignDensity:
    return make_density(lambda x: np.ones_like(x), "uniform", 1.0, nu=1.0, rho=0.0)


def edge_quadratic_density() -> DesignDensity:
    """``0.05 + 11.4 |x - 0.5|^2``: mass pushed toward both edges."""
    return make_density(
        lambda x: 0.05 + 11.4 * (x - 0.5) ** 2, "edge-quadratic", 0.05, nu=1.0, rho=11.4
    )


def table_density(path: str | Path) -> DesignDensity:
    """Density from a two-column CSV (x, density); interpolated linearly and renormalised.

    A non-numeric first row is taken as a header.
    """
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    try:
        float(lines[0].split(",")[0])
        skip = 0
    except (ValueError, IndexError):
        skip = 1
    data = np.loadtxt(lines[skip:], delimiter=",", ndmin=2)
    if data.shape[1] < 2:
        raise ConfigError(f"{path}: expected two columns x,density")
    xs, ms = data[:, 0], data[:, 1]
    order = np.argsort(xs)
    xs, ms = xs[order], ms[order]
    if xs[0] > 0 or xs[-1] < 1:
        raise ConfigError(f"{path}: table must cover [0, 1]")
    trap = getattr(np, "trapezoid", None) or np.trapz
    mass = float(trap(ms, xs))
    return make_density(lambda x: np.interp(x, xs, ms) / mass, f"file:{path}")


def resolve_density(label: str) -> DesignDensity:
    if label == "uniform":
        return uniform_density()
    if label == "edge-quadratic":
        return edge_quadratic_density()
    if label.startswith("file:"):
        return table_density(label[5:])
    raise ConfigError(f"unknown density label {label!r}")


@dataclass(frozen=True)
class TargetFunction:
    eval: Func
    s: float
    L: float
    Q: float
    label: str

    def __call__(self, x: ArrayLike) -> NDArray[np.float64]:
        return self.eval(np.asarray(x, dtype=float))

    def l2_norm(self, points: int = 200_001) -> float:
        x = np.linspace(0.0, 1.0, points)
        v = self(x) ** 2
        # composite Simpson; exact enough for piecewise smooth targets
        w = np.ones(points)
        w[1:-1:2], w[2:-1:2] = 4.0, 2.0
        return math.sqrt(float(np.dot(w, v)) / (3.0 * (points - 1)))


def triangle() -> TargetFunction:
    return TargetFunction(
        lambda x: 0.3 * np.maximum(1.0 - np.abs(x - 0.5) / 0.3, 0.0), 1.0, 1.0, 0.3, "triangle"
    )


_TARGETS: dict[str, Callable[[], TargetFunction]] = {
    "triangle": triangle,
    "zero": lambda: TargetFunction(lambda x: np.zeros_like(x), 1.0, 1.0, 0.0, "zero"),
    "constant": lambda: TargetFunction(lambda x: np.full_like(x, 0.5), 1.0, 1.0, 0.5, "constant"),
    "parabola": lambda: TargetFunction(
        lambda x: 0.5 * (x - 0.5) ** 2, 2.0, 1.0, 0.125, "parabola"
    ),
    "sine": lambda: TargetFunction(
        lambda x: np.sin(2 * np.pi * x) / (4 * np.pi**2), 2.0, 1.0, 1 / (4 * np.pi**2), "sine"
    ),
    "root": lambda: TargetFunction(
        lambda x: 0.5 * np.abs(x - 0.5) ** 0.5, 0.5, 0.5, 0.5 * 0.5**0.5, "root"
    ),
}


def resolve_target(label: str) -> TargetFunction:
    try:
        return _TARGETS[label]()
    except KeyError:
        raise ConfigError(f"unknown target function {label!r}") from None


def target_labels() -> list[str]:
    return sorted(_TARGETS)


@dataclass(frozen=True)
class Dataset:
    """Immutable sample ``(x_i, y_i)`` with its sorting permutation."""

    x: NDArray[np.float64]
    y: NDArray[np.float64]
    sort_index: NDArray[np.intp]
    meta: dict = field(default_factory=dict, compare=False)
    xs: NDArray[np.float64] = field(init=False, repr=False, compare=False)
    ys: NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.x.shape != self.y.shape:
            raise ValueError("x and y lengths differ")
        object.__setattr__(self, "xs", self.x[self.sort_index])
        object.__setattr__(self, "ys", self.y[self.sort_index])
        for arr in (self.x, self.y, self.sort_index, self.xs, self.ys):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @classmethod
    def from_arrays(cls, x: ArrayLike, y: ArrayLike, meta: dict | None = None) -> "Dataset":
        x = np.array(x, dtype=float)
        y = np.array(y, dtype=float)
        if x.size and (x.min() < 0.0 or x.max() > 1.0):
            raise ValueError("design points must lie in [0, 1]")
        return cls(x, y, np.argsort(x, kind="stable"), dict(meta or {}))


def seed_sequence(seed: int | np.random.SeedSequence, *key: int) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + key)
    return np.random.SeedSequence(int(seed), spawn_key=key)


STREAM_DESIGN = 0
STREAM_NOISE = 1
STREAM_CALIBRATION = 2


def sample_design(mu: DesignDensity, n: int, seed: int | np.random.SeedSequence) -> NDArray[np.float64]:
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed_sequence(seed, STREAM_DESIGN))
    return np.clip(mu.quantile(rng.random(n)), 0.0, 1.0)


def generate_dataset(
    f: TargetFunction,
    mu: DesignDensity,
    sigma: float,
    n: int,
    seed: int | np.random.SeedSequence,
) -> Dataset:
    """Draw ``Y = f(X) + sigma * g`` with design and noise on separate seed streams."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    x = sample_design(mu, n, seed)
    noise = np.random.default_rng(seed_sequence(seed, STREAM_NOISE)).standard_normal(n)
    y = f(x) + sigma * noise
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    meta = {
        "seed": int(ss.entropy),
        "spawn_key": list(ss.spawn_key),
        "sigma": float(sigma),
        "density": mu.label,
        "function": f.label,
    }
    return Dataset.from_arrays(x, y, meta)


def count_in(d: Dataset, lo: float, hi: float) -> int:
    """Number of design points in the closed interval ``[lo, hi]``."""
    return int(np.searchsorted(d.xs, hi, side="right") - np.searchsorted(d.xs, lo, side="left"))


def empirical_mass(d: Dataset, I: Interval | tuple[float, float]) -> float:
    lo, hi = (I.lo, I.hi) if isinstance(I, Interval) else I
    if hi < lo:
        return 0.0
    return count_in(d, lo, hi) / d.n


def points_in(d: Dataset, I: Interval) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Sorted design points and matching responses inside ``I``."""
    a = np.searchsorted(d.xs, I.lo, side="left")
    b = np.searchsorted(d.xs, I.hi, side="right")
    return d.xs[a:b], d.ys[a:b]


def emp_inner_product(d: Dataset, I: Interval | tuple[float, float], g1: Func, g2: Func) -> float:
    """Average of ``g1 * g2`` over the design points falling in ``I``."""
    lo, hi = (I.lo, I.hi) if isinstance(I, Interval) else I
    a = np.searchsorted(d.xs, lo, side="left")
    b = np.searchsorted(d.xs, hi, side="right")
    if b <= a:
        raise EmptyIntervalError(f"no design points in [{lo}, {hi}]")
    pts = d.xs[a:b]
    return float(np.mean(np.asarray(g1(pts)) * np.asarray(g2(pts))))


@dataclass(frozen=True)
class HolderReport:
    passed: bool
    worst_ratio: float
    k: int


def holder_check(
    f: Func,
    s: float,
    L: float,
    grid: int = 2000,
    slack: float = 1.0 + 1e-6,
    max_pairs: int = 10**6,
    lags: int = 32,
) -> HolderReport:
    """Numerical Hölder-ball membership test on ``[0, 1]``.

    The ``k``-th derivative (``k`` the largest integer below ``s``) is
    approximated by repeated central differences. Ratios
    ``|g(x) - g(y)| / |x - y|**(s - k)`` are taken over every pair of a
    subsample of at most ``max_pairs`` pairs, plus all short-lag pairs on
    the full grid. Returns the worst ratio divided by ``L``.
    """
    if grid < 100:
        raise ValueError("grid must be at least 100")
    k = holder_degree(s)
    x = np.linspace(0.0, 1.0, grid + 1)
    g = np.asarray(f(x), dtype=float)
    step = x[1] - x[0]
    for _ in range(k):
        # central differences average the derivative over a window, so they
        # never inflate a Lipschitz constant; endpoints are dropped
        g = (g[2:] - g[:-2]) / (2.0 * step)
        x = x[1:-1]
    alpha = s - k
    worst = 0.0
    m = x.size
    for lag in range(1, min(lags, m - 1) + 1):
        r = np.abs(g[lag:] - g[:-lag]) / (lag * step) ** alpha
        worst = max(worst, float(r.max()))
    size = min(m, int(math.isqrt(2 * max_pairs)))
    idx = np.unique(np.linspace(0, m - 1, size).round().astype(int))
    xs, gs = x[idx], g[idx]
    for i in range(len(idx) - 1):
        dx = xs[i + 1 :] - xs[i]
        r = np.abs(gs[i + 1 :] - gs[i]) / dx**alpha
        worst = max(worst, float(r.max()))
    ratio = worst / L if L > 0 else (0.0 if worst == 0 else math.inf)
    return HolderReport(ratio <= slack, ratio, k)


def write_dataset_csv(d: Dataset, path: str | Path) -> None:
    from .io import write_csv

    meta = {k: v for k, v in sorted(d.meta.items())}
    meta["n"] = d.n
    write_csv(path, ["x", "y"], zip(d.x.tolist(), d.y.tolist()), meta)


def read_dataset_csv(path: str | Path) -> Dataset:
    from .io import read_csv

    meta, header, rows = read_csv(path)
    try:
        ix, iy = header.index("x"), header.index("y")
    except ValueError:
        raise ConfigError(f"{path}: dataset CSV needs x and y columns") from None
    x = [float(r[ix]) for r in rows]
    y = [float(r[iy]) for r in rows]
    return Dataset.from_arrays(x, y, meta)
