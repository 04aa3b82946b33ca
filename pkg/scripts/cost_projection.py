#!/usr/bin/env python3
"""Project single-run training cost against market-size curves.

Evaluates the three canonical scenarios over a year range, writes the CSV
and a chart, and prints the market-crossing years and the spread between
scenarios.

Usage:
    python scripts/cost_projection.py [--config cfg.yaml] [--years 2023:2040]
"""

import argparse
import os
import sys

from traincost.cli import cmd_project, parse_years_spec, project_chart
from traincost.config import ConfigFile, load_config
from traincost.projection import SCENARIOS


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", help="YAML config (defaults otherwise)")
    parser.add_argument("--years", default="2023:2040")
    parser.add_argument("--outdir", default="results")
    args = parser.parse_args()

    config = load_config(args.config) if args.config else ConfigFile()
    years = parse_years_spec(args.years)
    scenarios = [SCENARIOS[name] for name in ("best_case", "best_guess", "worst_case")]
    table, summary = cmd_project(config, years, scenarios)

    os.makedirs(args.outdir, exist_ok=True)
    csv_path = os.path.join(args.outdir, "cost_projection.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as handle:
        handle.write(table.to_csv())
    svg_path = os.path.join(args.outdir, "cost_projection.svg")
    with open(svg_path, "w", encoding="utf-8", newline="") as handle:
        handle.write(project_chart(table))

    print(f"wrote {csv_path} and {svg_path}")
    print(summary, end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
