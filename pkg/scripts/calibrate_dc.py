"""Calibrate Dc for a config and optionally store it (with provenance) back into the file.

    python scripts/calibrate_dc.py configs/coverage_triangle_uniform.json --write
"""

import argparse
import json
from pathlib import Path

from sharpreg.experiments import ExperimentConfig, calibrate_Dc


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("config")
    parser.add_argument("--seeds", type=int)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--write", action="store_true", help="write Dc into the config")
    parser.add_argument("--also", nargs="*", default=[], help="other configs to receive the same Dc")
    args = parser.parse_args()

    cfg = ExperimentConfig.from_json(args.config)
    info = calibrate_Dc(cfg, seeds=args.seeds, workers=args.workers)
    info.pop("calibration_history")
    print(json.dumps(info, indent=2, sort_keys=True))
    if not args.write:
        return
    provenance = {
        "calibrated_on": args.config,
        "config_hash": cfg.replace(Dc="calibrate").config_hash(),
        **info,
    }
    for path in [args.config, *args.also]:
        raw = json.loads(Path(path).read_text())
        raw["Dc"] = info["Dc"]
        raw.setdefault("notes", {})["Dc_provenance"] = provenance
        Path(path).write_text(json.dumps(raw, indent=2, sort_keys=True) + "\n")
        print(f"updated {path}")


if __name__ == "__main__":
    main()
