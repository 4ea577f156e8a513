"""Command-line harness.

Exit status is 0 on success; failures print one JSON line prefixed with
``error:`` on stderr and exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .band import make_band
from .design import generate_dataset, read_dataset_csv, resolve_density, resolve_target, write_dataset_csv
from .estimator import fit
from .exceptions import SharpRegError
from .experiments import (
    ExperimentConfig,
    figure_repro,
    mc_coverage,
    mc_risk,
    rate_study,
    write_band_outputs,
)
from .io import write_csv
from .lower_bound import build_family, verify_membership
from .optimal_recovery import make_family

OUTPUT_ENV = "SHARPREG_OUTPUT_DIR"


def _out_dir(args, cfg: ExperimentConfig | None = None) -> Path:
    if getattr(args, "out_dir", None):
        return Path(args.out_dir)
    if OUTPUT_ENV in os.environ:
        return Path(os.environ[OUTPUT_ENV])
    return Path(cfg.output_dir if cfg is not None else "results")


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "replications", None) is not None:
        changes["replications"] = args.replications
    if getattr(args, "n", None):
        changes["n"] = list(args.n)
    return cfg.replace(**changes) if changes else cfg


def _family_from(args, cfg: ExperimentConfig | None):
    if cfg is not None and args.s is None:
        return cfg.family(), cfg
    s = 1.0 if args.s is None else args.s
    return make_family(s, args.sigma, args.L), cfg


def cmd_kernels(args) -> None:
    fam = make_family(args.s, args.sigma, args.L)
    t = np.linspace(-1.05 * fam.T, 1.05 * fam.T, args.points)
    out = Path(args.out) if args.out else _out_dir(args) / f"kernels_s{args.s:g}.csv"
    meta = {"s": fam.s, "phi0": fam.phi0, "T": fam.T, "P": fam.P, "c": fam.c,
            "B1": fam.B1, "normK2": fam.normK2}
    write_csv(out, ["t", "phi", "K"], zip(t.tolist(), fam.phi(t).tolist(), fam.kernel(t).tolist()), meta)
    print(out)


def cmd_simulate(args) -> None:
    cfg = _load_config(args)
    f, mu = resolve_target(args.function or cfg.function), resolve_density(args.density or cfg.density)
    sub = cfg.replace(function=f.label, density=args.density or cfg.density)
    sigma = args.sigma if args.sigma is not None else sub.noise_sigma()
    n = args.n[0] if args.n else cfg.n[0]
    d = generate_dataset(f, mu, sigma, n, cfg.seed)
    out = Path(args.out) if args.out else _out_dir(args, cfg) / f"data_{f.label}_{n}.csv"
    write_dataset_csv(d, out)
    print(out)


def _fit_from_args(args):
    cfg = ExperimentConfig.from_json(args.config) if args.config else None
    fam, cfg = _family_from(args, cfg)
    d = read_dataset_csv(args.data)
    floor = cfg.floor if cfg is not None else "density"
    return d, fit(d, fam, None, floor), fam, cfg


def cmd_fit(args) -> None:
    d, e, fam, cfg = _fit_from_args(args)
    out = Path(args.out) if args.out else _out_dir(args, cfg) / "curve.csv"
    xs = np.linspace(0.0, 1.0, args.eval_points)
    meta = {"s": fam.s, "sigma": fam.sigma, "L": fam.L, "n": d.n}
    write_csv(out, ["x", "fhat"], zip(xs.tolist(), np.asarray(e.evaluate(xs)).tolist()), meta)
    grid_out = Path(args.grid_out) if args.grid_out else out.with_name(out.stem + "_grid.csv")
    g = e.grid
    rows = [
        (j, float(x), float(h), int(z), float(v))
        for j, (x, h, z, v) in enumerate(zip(g.points, g.H, g.zone, e.values))
    ]
    write_csv(grid_out, ["j", "x_j", "H_j", "zone", "fhat_j"], rows,
              dict(meta, delta=g.delta, M=g.M, tau=g.tau, HM=g.HM))
    print(out)
    print(grid_out)


def cmd_band(args) -> None:
    d, e, fam, cfg = _fit_from_args(args)
    alpha = args.alpha if args.alpha is not None else (cfg.alpha if cfg else 0.05)
    if args.Dc is not None:
        Dc = args.Dc
    elif cfg is not None and not isinstance(cfg.Dc, str):
        Dc = float(cfg.Dc)
    else:
        raise SharpRegError("band needs a numeric Dc (--Dc or in the config)")
    band = make_band(e, alpha, Dc)
    out_dir = _out_dir(args, cfg)
    f = None
    if cfg is not None and d.meta.get("function") == cfg.function:
        f = cfg.target()
    meta = {"s": fam.s, "sigma": fam.sigma, "L": fam.L, "n": d.n}
    for p in write_band_outputs(out_dir, args.tag, d, e, band, f, meta, args.eval_points):
        print(p)


def _report_cmd(runner):
    def run(args) -> None:
        cfg = _load_config(args)
        rep = runner(cfg, workers=args.workers)
        for p in rep.write(_out_dir(args, cfg)):
            print(p)
        if rep.extra:
            printable = {k: v for k, v in rep.extra.items() if k != "calibration_history"}
            print(json.dumps(printable, sort_keys=True))

    return run


def cmd_lowerbound(args) -> None:
    cfg = _load_config(args)
    fam = cfg.family() if args.s is None else make_family(args.s, cfg.family().sigma, cfg.target().L)
    n = args.n[0] if args.n else cfg.n[0]
    fam_c = build_family(fam, cfg.design(), n, (args.a, args.b), args.eps)
    rep = verify_membership(fam_c, args.members, cfg.seed)
    out_dir = _out_dir(args, cfg)
    meta = {
        "s": fam.s, "sigma": fam.sigma, "L": fam.L, "n": n, "eps": args.eps,
        "Xi": fam_c.Xi, "h_I": fam_c.h_I, "M": fam_c.M, "min_gap": rep.min_gap,
        "worst_holder_ratio": rep.worst_ratio, "interval_condition": fam_c.interval_condition,
    }
    p1 = write_csv(out_dir / "lowerbound_family.csv", ["j", "center", "h_j", "half_width", "amplitude"],
                   ((j + 1, float(c), float(h), float(w), float(a)) for j, (c, h, w, a) in
                    enumerate(zip(fam_c.centers, fam_c.h, fam_c.half_widths, fam_c.amplitudes))), meta)
    rng = np.random.default_rng(cfg.seed)
    xs = np.linspace(0.0, 1.0, 2001)
    curves = [fam_c.member(fam_c.random_vertex(rng))(xs) for _ in range(args.curves)]
    p2 = write_csv(out_dir / "lowerbound_members.csv", ["x"] + [f"member_{i}" for i in range(args.curves)],
                   (tuple([float(x)] + [float(c[i]) for c in curves]) for i, x in enumerate(xs)), meta)
    print(p1)
    print(p2)


def cmd_figures(args) -> None:
    cfg = _load_config(args)
    for p in figure_repro(cfg, _out_dir(args, cfg), workers=args.workers):
        print(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sharpreg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help="experiment config (JSON)")
            p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--out-dir", help=f"output directory (default ${OUTPUT_ENV} or config)")

    def model(p):
        p.add_argument("--s", type=float, help="smoothness; overrides the config target")
        p.add_argument("--sigma", type=float, default=1.0)
        p.add_argument("--L", type=float, default=1.0)

    p = sub.add_parser("kernels", help="tabulate phi_s and K_s")
    model(p)
    p.set_defaults(s=1.0)
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--out")
    common(p, config=False)
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser("simulate", help="generate a dataset CSV")
    common(p)
    p.add_argument("--function")
    p.add_argument("--density")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--sigma", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    for name, func, helptext in (("fit", cmd_fit, "fit the estimator to a dataset CSV"),
                                  ("band", cmd_band, "confidence band for a dataset CSV")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        model(p)
        p.add_argument("--data", required=True)
        p.add_argument("--eval-points", type=int, default=1001)
        if name == "fit":
            p.add_argument("--out")
            p.add_argument("--grid-out")
        else:
            p.add_argument("--alpha", type=float)
            p.add_argument("--Dc", type=float)
            p.add_argument("--tag", default="band")
        p.set_defaults(func=func)

    for name, runner in (("risk", mc_risk), ("coverage", mc_coverage), ("rate", rate_study)):
        p = sub.add_parser(name, help=f"Monte Carlo {name} study")
        common(p)
        p.add_argument("--n", type=int, nargs="+")
        p.add_argument("--replications", type=int)
        p.add_argument("--workers", type=int, default=1)
        p.set_defaults(func=_report_cmd(runner))

    p = sub.add_parser("lowerbound", help="cubical lower-bound family and membership check")
    common(p)
    p.add_argument("--s", type=float)
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--members", type=int, default=50)
    p.add_argument("--curves", type=int, default=5)
    p.set_defaults(func=cmd_lowerbound)

    p = sub.add_parser("figures", help="band illustrations for uniform and edge-quadratic designs")
    common(p)
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (SharpRegError, ValueError, OSError) as exc:
        kind = getattr(exc, "kind", type(exc).__name__)
        print("error: " + json.dumps({"kind": kind, "message": str(exc)}), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
