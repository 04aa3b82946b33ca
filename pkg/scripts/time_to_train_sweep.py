#!/usr/bin/env python3
"""Reproduce the time-to-train vs system-size experiment.

Sweeps a model across cluster sizes under the baseline and optimized
resilience strategies, writes the CSV and a chart, and prints where the
baseline stops scaling.

Usage:
    python scripts/time_to_train_sweep.py [--config cfg.yaml] [--outdir results]
"""

import argparse
import math
import os
import sys

from traincost.cli import cmd_sweep, parse_range_spec, sweep_chart
from traincost.config import ConfigFile, load_config


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", help="YAML config (defaults otherwise)")
    parser.add_argument("--gpus", default="1024:262144:17:geometric")
    parser.add_argument("--outdir", default="results")
    args = parser.parse_args()

    config = load_config(args.config) if args.config else ConfigFile()
    gpus_list = parse_range_spec(args.gpus)
    table, all_no_progress = cmd_sweep(config, gpus_list)

    os.makedirs(args.outdir, exist_ok=True)
    csv_path = os.path.join(args.outdir, "time_to_train.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as handle:
        handle.write(table.to_csv())
    svg_path = os.path.join(args.outdir, "time_to_train.svg")
    with open(svg_path, "w", encoding="utf-8", newline="") as handle:
        handle.write(sweep_chart(table))
    print(f"wrote {csv_path} and {svg_path}")

    if all_no_progress:
        print("every cell is in the NoProgress regime; nothing scales here")
        return 2

    by_config = {}
    for row in table.rows:
        n_gpus, name, wall, status = row[0], row[1], row[10], row[13]
        by_config.setdefault(name, []).append((n_gpus, wall, status))
    for name, cells in sorted(by_config.items()):
        finite = [(n, w) for n, w, _ in cells if w is not None and math.isfinite(w)]
        stalled = [n for n, _, status in cells if status != "OK"]
        best_n, best_wall = min(finite, key=lambda c: c[1])
        msg = f"{name}: fastest at {best_n} GPUs ({best_wall:.0f} h wall-clock)"
        if stalled:
            msg += f"; NoProgress from {min(stalled)} GPUs"
        print(msg)
    return 0


if __name__ == "__main__":
    sys.exit(main())
