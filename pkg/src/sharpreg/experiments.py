"""Monte Carlo studies: sup risk, band coverage, rate slope, figure reproduction.

Every replicate draws its data from ``SeedSequence(master, spawn_key=(n, i))``
(calibration replicates add a distinct stream tag), so results depend only
on the config and are independent of the worker-pool schedule.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .band import beta_rule, calibrate_from_critical, critical_beta, make_band
from .bandwidth import spatial_rate
from .design import (
    STREAM_CALIBRATION,
    Dataset,
    DesignDensity,
    TargetFunction,
    generate_dataset,
    resolve_density,
    resolve_target,
    seed_sequence,
    write_dataset_csv,
)
from .estimator import FittedEstimator, fit, sup_risk
from .exceptions import ConfigError
from .io import write_csv
from .optimal_recovery import KernelFamily, make_family

BAND_PROBES = (0.1, 0.5, 0.9)
QUANTILES = (0.1, 0.5, 0.9)
MIN_N = 8


@dataclass
class ExperimentConfig:
    function: str = "triangle"
    density: str = "uniform"
    n: list[int] = field(default_factory=lambda: [1024])
    s: float | None = None
    L: float | None = None
    Q: float | None = None
    sigma: float | None = None
    root_snr: float | None = 7.0
    estimator_sigma: float | None = None
    alpha: float = 0.05
    Dc: float | str = "calibrate"
    calibration_target: float = 0.95
    calibration_seeds: int = 200
    replications: int = 50
    seed: int = 20_070_101
    floor: str = "density"
    output_dir: str = "results"
    notes: dict[str, Any] = field(default_factory=dict)

    # not part of the experiment identity
    _UNHASHED = ("output_dir", "notes")

    def __post_init__(self) -> None:
        if isinstance(self.n, int):
            self.n = [self.n]
        self.n = [int(v) for v in self.n]
        if not self.n or min(self.n) < MIN_N:
            raise ConfigError(f"every n must be at least {MIN_N}")
        if self.replications < 1:
            raise ConfigError("replications must be at least 1")
        if self.sigma is None and self.root_snr is None:
            raise ConfigError("give either sigma or root_snr")
        if self.floor not in ("density", "unscaled"):
            raise ConfigError("floor must be 'density' or 'unscaled'")
        if isinstance(self.Dc, str) and self.Dc != "calibrate":
            raise ConfigError("Dc must be a positive number or 'calibrate'")
        resolve_target(self.function)
        resolve_density(self.density)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def config_hash(self) -> str:
        ident = {k: v for k, v in self.to_dict().items() if k not in self._UNHASHED}
        blob = json.dumps(ident, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    # resolved model pieces

    def target(self) -> TargetFunction:
        t = resolve_target(self.function)
        return dataclasses.replace(
            t,
            s=t.s if self.s is None else float(self.s),
            L=t.L if self.L is None else float(self.L),
            Q=t.Q if self.Q is None else float(self.Q),
        )

    def design(self) -> DesignDensity:
        return resolve_density(self.density)

    def noise_sigma(self) -> float:
        if self.sigma is not None:
            return float(self.sigma)
        return self.target().l2_norm() / float(self.root_snr)

    def family(self) -> KernelFamily:
        t = self.target()
        sig = self.estimator_sigma
        if sig is None:
            sig = self.noise_sigma()
            if sig == 0 and self.root_snr is not None:
                sig = t.l2_norm() / float(self.root_snr)
        if sig <= 0:
            raise ConfigError("zero-noise data needs a positive estimator_sigma (or root_snr)")
        return make_family(t.s, sig, t.L)

    def metadata(self) -> dict:
        fam = self.family()
        return {
            "config_hash": self.config_hash(),
            "master_seed": self.seed,
            "config": {k: v for k, v in self.to_dict().items() if k != "output_dir"},
            "noise_sigma": self.noise_sigma(),
            "estimator_sigma": fam.sigma,
            "P": fam.P,
            "loss": "identity",
        }


def replicate_seed(cfg: ExperimentConfig, n: int, index: int, calibration: bool = False):
    key = (n, index, STREAM_CALIBRATION) if calibration else (n, index)
    return seed_sequence(cfg.seed, *key)


def replicate_dataset(cfg: ExperimentConfig, n: int, index: int, calibration: bool = False) -> Dataset:
    return generate_dataset(
        cfg.target(), cfg.design(), cfg.noise_sigma(), n, replicate_seed(cfg, n, index, calibration)
    )


def _replicate(args: tuple[dict, int, int, bool]) -> dict:
    cfg_dict, n, index, calibration = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    f, mu, fam = cfg.target(), cfg.design(), cfg.family()
    d = replicate_dataset(cfg, n, index, calibration)
    e = fit(d, fam, cfg.Q, cfg.floor)
    norm = sup_risk(e, f, mu, "spatial")
    raw = sup_risk(e, f)
    out = {
        "n": n,
        "replicate": index,
        "risk_norm": norm.full,
        "risk_norm_disc": norm.discretized,
        "risk_abs": raw.full,
        "risk_abs_disc": raw.discretized,
        "infeasible": e.grid.infeasible_count,
        "floored": int(e.floored.sum()),
        "critical_beta": critical_beta(e, f),
    }
    probes = np.array(BAND_PROBES)
    j = e.cell_index(probes)
    R = e.grid.H[j] ** fam.s
    rate = spatial_rate(n, fam.s, mu(probes))
    for x, Rx, rx in zip(BAND_PROBES, R, rate):
        out[f"R_{x}"] = float(Rx)
        out[f"rate_{x}"] = float(rx)
    return out


def run_replicates(
    cfg: ExperimentConfig,
    jobs: Sequence[tuple[int, int]],
    workers: int = 1,
    calibration: bool = False,
) -> list[dict]:
    """Run ``(n, index)`` jobs; output order follows ``jobs`` regardless of ``workers``."""
    payload = [(cfg.to_dict(), n, i, calibration) for n, i in jobs]
    if workers <= 1 or len(payload) < 2:
        results = [_replicate(p) for p in payload]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate, payload, chunksize=max(1, len(payload) // (4 * workers))))
    return sorted(results, key=lambda r: (r["n"], r["replicate"]))


@dataclass
class RiskReport:
    kind: str
    rows: list[dict]
    summary: list[dict]
    meta: dict
    extra: dict = field(default_factory=dict)

    def column(self, name: str, n: int | None = None) -> np.ndarray:
        return np.array([r[name] for r in self.rows if n is None or r["n"] == n])

    def summary_for(self, n: int) -> dict:
        return next(s for s in self.summary if s["n"] == n)

    def write(self, out_dir: str | Path) -> list[Path]:
        out_dir = Path(out_dir)
        meta = dict(self.meta)
        meta.update({k: v for k, v in self.extra.items() if k != "calibration_history"})
        paths = []
        if self.rows:
            header = list(self.rows[0])
            paths.append(
                write_csv(out_dir / f"{self.kind}_replicates.csv", header,
                          ([r[h] for h in header] for r in self.rows), meta)
            )
        if self.summary:
            header = list(self.summary[0])
            paths.append(
                write_csv(out_dir / f"{self.kind}_summary.csv", header,
                          ([r[h] for h in header] for r in self.summary), meta)
            )
        return paths


def _quantiles(values: np.ndarray) -> list[float]:
    return [float(v) for v in np.quantile(values, QUANTILES)]


def _risk_summary(rows: list[dict], ns: Sequence[int]) -> list[dict]:
    out = []
    for n in ns:
        sel = [r for r in rows if r["n"] == n]
        entry: dict[str, Any] = {"n": n, "replicates": len(sel)}
        for col in ("risk_norm", "risk_norm_disc", "risk_abs", "risk_abs_disc"):
            vals = np.array([r[col] for r in sel])
            for q, v in zip(QUANTILES, _quantiles(vals)):
                entry[f"{col}_q{int(q * 100)}"] = v
        entry["infeasible_replicates"] = sum(1 for r in sel if r["infeasible"])
        out.append(entry)
    return out


def mc_risk(cfg: ExperimentConfig, workers: int = 1) -> RiskReport:
    jobs = [(n, i) for n in cfg.n for i in range(cfg.replications)]
    rows = run_replicates(cfg, jobs, workers)
    return RiskReport("risk", rows, _risk_summary(rows, cfg.n), cfg.metadata())


def rate_regression(ns: Sequence[int], risks: Sequence[float]) -> tuple[float, float]:
    """OLS slope (and its standard error) of ``log risk`` on ``log(log n / n)``."""
    x = np.log(np.log(np.asarray(ns, dtype=float)) / np.asarray(ns, dtype=float))
    y = np.log(np.asarray(risks, dtype=float))
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = len(x) - 2
    if dof <= 0:
        return float(coef[1]), math.nan
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    return float(coef[1]), float(math.sqrt(cov[1, 1]))


def rate_study(cfg: ExperimentConfig, workers: int = 1) -> RiskReport:
    """Rate slope from median unnormalised sup risk (normalising would flatten it)."""
    ns = sorted(set(cfg.n))
    if len(ns) < 4 or ns[-1] < 4 * ns[0]:
        raise ConfigError("rate study needs at least 4 distinct n spanning two octaves")
    rep = mc_risk(cfg, workers)
    med = [rep.summary_for(n)["risk_abs_q50"] for n in ns]
    slope, se = rate_regression(ns, med)
    s = cfg.target().s
    rep.kind = "rate"
    rep.extra = {
        "slope": slope,
        "slope_se": se,
        "target_slope": s / (2 * s + 1),
        "regression": "log(median unnormalised sup risk) ~ log(log n / n)",
    }
    return rep


def calibrate_Dc(
    cfg: ExperimentConfig,
    alpha: float | None = None,
    target: float | None = None,
    seeds: int | None = None,
    workers: int = 1,
) -> dict:
    """Calibrate ``Dc`` on the calibration seed stream, pooling all ``n`` of the config."""
    alpha = cfg.alpha if alpha is None else alpha
    target = cfg.calibration_target if target is None else target
    seeds = cfg.calibration_seeds if seeds is None else seeds
    if seeds < 100:
        raise ConfigError("calibration needs at least 100 seeds")
    jobs = [(n, i) for n in cfg.n for i in range(seeds)]
    rows = run_replicates(cfg, jobs, workers, calibration=True)
    s = cfg.target().s
    # beta depends on n; pool by mapping each replicate's critical beta onto a common n
    n_ref = cfg.n[0]
    scale = lambda n: (math.log(n_ref) / math.log(n)) ** (s / (2 * s + 1))  # noqa: E731
    crit = [r["critical_beta"] / scale(r["n"]) for r in rows]
    cal = calibrate_from_critical(crit, n_ref, s, alpha, target)
    return {
        "Dc": cal.Dc,
        "calibration_coverage": cal.coverage,
        "calibration_iterations": cal.iterations,
        "calibration_seeds": seeds,
        "calibration_target": target,
        "calibration_history": cal.history,
    }


def resolve_Dc(cfg: ExperimentConfig, workers: int = 1) -> tuple[float, dict]:
    if cfg.Dc == "calibrate":
        info = calibrate_Dc(cfg, workers=workers)
        return info["Dc"], info
    return float(cfg.Dc), {"Dc": float(cfg.Dc), "Dc_source": "config"}


def mc_coverage(cfg: ExperimentConfig, workers: int = 1, Dc: float | None = None) -> RiskReport:
    if Dc is None:
        Dc, info = resolve_Dc(cfg, workers)
    else:
        info = {"Dc": Dc, "Dc_source": "argument"}
    fam = cfg.family()
    s = fam.s
    jobs = [(n, i) for n in cfg.n for i in range(cfg.replications)]
    rows = run_replicates(cfg, jobs, workers)
    summary = []
    for n in cfg.n:
        beta = beta_rule(n, s, cfg.alpha, Dc)
        sel = [r for r in rows if r["n"] == n]
        for r in sel:
            r["beta"] = beta
            r["covered"] = bool(r["critical_beta"] <= beta)
            for x in BAND_PROBES:
                r[f"halfwidth_{x}"] = (1.0 + beta) * fam.P * r[f"R_{x}"]
        entry: dict[str, Any] = {
            "n": n,
            "replicates": len(sel),
            "beta": beta,
            "coverage": float(np.mean([r["covered"] for r in sel])),
        }
        for x in BAND_PROBES:
            hw = np.array([r[f"halfwidth_{x}"] for r in sel])
            rate = np.array([r[f"rate_{x}"] for r in sel])
            entry[f"mean_halfwidth_{x}"] = float(hw.mean())
            entry[f"mean_width_over_rate_{x}"] = float(np.mean(2.0 * hw / rate))
        entry["frac_mid_wider_than_edge"] = float(
            np.mean([r["halfwidth_0.5"] > r["halfwidth_0.1"] for r in sel])
        )
        summary.append(entry)
    meta = cfg.metadata()
    meta["alpha"] = cfg.alpha
    return RiskReport("coverage", rows, summary, meta, info)


PLOT_TEMPLATE = '''"""Band over scatter for the {label} design (generated file)."""
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent


def load(name):
    with open(HERE / name, newline="") as fh:
        rows = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(rows)
    return [{{k: float(v) for k, v in r.items()}} for r in reader]


data = load("{data}")
band = load("{band}")
fig, ax = plt.subplots(figsize=(6, 4))
ax.scatter([r["x"] for r in data], [r["y"] for r in data], s=4, color="0.6")
xs = [r["x"] for r in band]
ax.fill_between(xs, [r["lower"] for r in band], [r["upper"] for r in band], alpha=0.3)
ax.plot(xs, [r["center"] for r in band], lw=1.2)
ax.plot(xs, [r["truth"] for r in band], "k--", lw=0.8)
ax.set_title("{label} design, n = {n}")
fig.tight_layout()
fig.savefig(HERE / "{png}", dpi=150)
'''


def band_rows(e: FittedEstimator, band, f: TargetFunction | None, points: int):
    xs = np.linspace(0.0, 1.0, points)
    center = np.asarray(e.evaluate(xs))
    hw = np.asarray(band.halfwidth(xs))
    truth = f(xs) if f is not None else np.full_like(xs, math.nan)
    return [
        (float(x), float(c - h), float(c), float(c + h), float(t))
        for x, c, h, t in zip(xs, center, hw, truth)
    ]


def write_band_outputs(
    out_dir: Path,
    tag: str,
    d: Dataset,
    e: FittedEstimator,
    band,
    f: TargetFunction | None,
    meta: dict,
    points: int = 1001,
) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    data_p = out_dir / f"data_{tag}.csv"
    curve_p = out_dir / f"curve_{tag}.csv"
    band_p = out_dir / f"band_{tag}.csv"
    plot_p = out_dir / f"plot_{tag}.py"
    write_dataset_csv(d, data_p)
    xs = np.linspace(0.0, 1.0, points)
    write_csv(curve_p, ["x", "fhat"], zip(xs.tolist(), np.asarray(e.evaluate(xs)).tolist()), meta)
    band_meta = dict(meta, alpha=band.alpha, Dc=band.Dc, beta=band.beta)
    write_csv(band_p, ["x", "lower", "center", "upper", "truth"], band_rows(e, band, f, points), band_meta)
    plot_p.write_text(
        PLOT_TEMPLATE.format(label=tag, data=data_p.name, band=band_p.name, n=d.n, png=f"band_{tag}.png"),
        encoding="utf-8",
    )
    return [data_p, curve_p, band_p, plot_p]


def figure_repro(cfg: ExperimentConfig, out_dir: str | Path, workers: int = 1) -> list[Path]:
    """Band illustrations for the uniform and edge-quadratic designs at ``cfg.n[0]``."""
    out_dir = Path(out_dir)
    paths: list[Path] = []
    Dc, info = resolve_Dc(cfg.replace(density="uniform"), workers)
    for index, density in enumerate(("uniform", "edge-quadratic")):
        sub = cfg.replace(density=density)
        n = sub.n[0]
        d = replicate_dataset(sub, n, index)
        e = fit(d, sub.family(), sub.Q, sub.floor)
        band = make_band(e, sub.alpha, Dc)
        meta = sub.metadata()
        meta["Dc_info"] = {k: v for k, v in info.items() if k != "calibration_history"}
        paths += write_band_outputs(out_dir, density, d, e, band, sub.target(), meta)
    return paths
