"""Band-over-scatter illustrations for uniform and edge-quadratic designs, then render them.

    python scripts/reproduce_figures.py configs/figures.json --render
"""

import argparse
import runpy

from sharpreg.experiments import ExperimentConfig, figure_repro


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("config")
    parser.add_argument("--out-dir", default="results/figures")
    parser.add_argument("--render", action="store_true", help="run the generated plot scripts")
    args = parser.parse_args()

    paths = figure_repro(ExperimentConfig.from_json(args.config), args.out_dir)
    for p in paths:
        print(p)
        if args.render and p.suffix == ".py":
            runpy.run_path(str(p))


if __name__ == "__main__":
    main()
