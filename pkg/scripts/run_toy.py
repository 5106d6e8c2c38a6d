"""Run the whole pipeline on the bundled toy corpus and print the summary table."""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from colexforge.export import NetworkStats
from colexforge.pipeline import PipelineConfig, run_all

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=ROOT / "data" / "toy-config.json", type=Path)
    parser.add_argument("--out", default=ROOT / "out" / "toy", type=Path)
    args = parser.parse_args()

    config = PipelineConfig.from_json(args.config)
    config.output_dir = args.out
    manifest = run_all(config)
    for stage in manifest["stages"]:
        print(f"{stage['stage']:<12} {stage['seconds']:8.4f}s  {stage['counts']}")
    stats = NetworkStats(**json.loads((args.out / "stats.json").read_text()))
    print()
    for name, value in stats.table_rows():
        print(f"{name:<24} {value}")
    print()
    print((args.out / "edges.csv").read_text(), end="")


if __name__ == "__main__":
    main()
