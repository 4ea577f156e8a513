"""Rate-slope study: median unnormalised sup risk against log(log n / n).

    python scripts/run_rate_study.py configs/rate_triangle_uniform.json
"""

import argparse

from sharpreg.experiments import ExperimentConfig, rate_study


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("config")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out-dir")
    args = parser.parse_args()

    cfg = ExperimentConfig.from_json(args.config)
    rep = rate_study(cfg, workers=args.workers)
    P = rep.meta["P"]
    print(f"{'n':>7} {'median |err|':>13} {'median norm/P':>14} {'median disc/P':>14}")
    for row in rep.summary:
        print(f"{row['n']:>7} {row['risk_abs_q50']:>13.5f} {row['risk_norm_q50'] / P:>14.3f} "
              f"{row['risk_norm_disc_q50'] / P:>14.3f}")
    print(f"slope {rep.extra['slope']:.4f} +/- {rep.extra['slope_se']:.4f} "
          f"(target {rep.extra['target_slope']:.4f})")
    for p in rep.write(args.out_dir or cfg.output_dir):
        print(p)


if __name__ == "__main__":
    main()
