"""Build two networks from the same datasets under different settings and diff them.

By default, version A skips concept expansion and version B uses the bundled
replacement table, which shows how much of the network rests on derived forms.
Any setting can be changed per side with --a-* / --b-* options.
"""

from __future__ import annotations

import argparse
import json
import tempfile
from pathlib import Path

from colexforge.export import diff_networks, read_gml
from colexforge.pipeline import GML_FILE, STATS_FILE, PipelineConfig, run_all
from colexforge.selection import SelectionConfig

ROOT = Path(__file__).resolve().parent.parent


def side_config(args, side: str, dataset_dir: Path, out: Path, empty_table: Path) -> PipelineConfig:
    get = lambda name: getattr(args, f"{side}_{name}")  # noqa: E731
    table = get("table")
    return PipelineConfig(
        dataset_dir=dataset_dir,
        output_dir=out,
        replacement_table=empty_table if table == "none" else (Path(table) if table else None),
        selection=SelectionConfig(get("concept_cap") or None, get("min_concepts")),
        min_families=get("min_families"),
        seed=args.seed,
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--datasets", type=Path, default=ROOT / "data" / "toy")
    parser.add_argument("--seed", type=int, default=42)
    for side, table in (("a", "none"), ("b", "")):
        parser.add_argument(f"--{side}-table", default=table, help="CSV path, 'none', or empty for the bundled table")
        parser.add_argument(f"--{side}-concept-cap", type=int, default=10, help="0 keeps all")
        parser.add_argument(f"--{side}-min-concepts", type=int, default=5)
        parser.add_argument(f"--{side}-min-families", type=int, default=3)
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        empty = tmp / "empty.csv"
        empty.write_text("source,targets\n")
        nets, stats = {}, {}
        for side in ("a", "b"):
            config = side_config(args, side, args.datasets, tmp / side, empty)
            run_all(config)
            nets[side] = read_gml(tmp / side / GML_FILE)
            stats[side] = json.loads((tmp / side / STATS_FILE).read_text())

    print(f"{'':<24} {'A':>10} {'B':>10}")
    for key in stats["a"]:
        print(f"{key:<24} {stats['a'][key]:>10} {stats['b'][key]:>10}")
    print()
    for key, value in diff_networks(nets["a"], nets["b"]).as_dict().items():
        print(f"{key:<24} {value}")
    only_b = sorted(set(nets["b"].edges) - set(nets["a"].edges))
    if only_b:
        print("edges only in B:", ", ".join(f"{a}/{b}" for a, b in only_b))


if __name__ == "__main__":
    main()
