#!/usr/bin/env python3
"""Run every config under scenarios/ and collect CSVs (and plots) in
results/.

The subcommand for each file is the part of its name before the first
underscore, e.g. fieldsweep_pumped.yaml runs the fieldsweep scenario.
"""

import argparse
import sys
from pathlib import Path

from eprsim.cli import main as eprsim_main

ROOT = Path(__file__).resolve().parent.parent


def run(out_dir: Path, with_plots: bool) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for cfg in sorted((ROOT / "scenarios").glob("*.yaml")):
        scenario = cfg.stem.split("_")[0]
        argv = [scenario, "--config", str(cfg),
                "--csv", str(out_dir / f"{cfg.stem}.csv")]
        if with_plots:
            argv += ["--plot", str(out_dir / f"{cfg.stem}.svg")]
        print(f"$ eprsim {' '.join(argv)}")
        rc = eprsim_main(argv)
        if rc != 0:
            print(f"  -> exit {rc}", file=sys.stderr)
            failures += 1
    return failures


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=ROOT / "results")
    parser.add_argument("--plots", action="store_true",
                        help="also write an SVG per scenario")
    args = parser.parse_args()
    sys.exit(1 if run(args.out, args.plots) else 0)
