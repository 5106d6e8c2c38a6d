"""Generate a synthetic multi-dataset corpus and time the pipeline on it.

Words are random strings from a small syllable inventory, so accidental
homophones appear at a realistic-looking rate; a few concept pairs are
colexified on purpose in a chosen share of families to give the network
some structure.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import time
from pathlib import Path

from colexforge.pipeline import PipelineConfig, run_all
from colexforge.selection import SelectionConfig

SYLLABLES = [c + v for c in "ptkmnslrw" for v in "aiu"]


def write_dataset(root: Path, name: str, rng: random.Random, n_varieties: int, n_concepts: int,
                  n_families: int, planted: list[tuple[int, int]], rate: float) -> None:
    root.mkdir(parents=True, exist_ok=True)
    meta = {
        "id": name,
        "tables": {
            "forms": {"file": "forms.csv", "columns": {"id": "ID", "variety": "Language_ID",
                                                        "concept": "Parameter_ID", "segments": "Segments"}},
            "languages": {"file": "languages.csv", "columns": {"id": "ID", "glottocode": "Glottocode",
                                                                "family": "Family"}},
            "parameters": {"file": "parameters.csv", "columns": {"id": "ID", "gloss": "Gloss"}},
        },
    }
    (root / "cldf-metadata.json").write_text(json.dumps(meta, indent=2))
    with (root / "parameters.csv").open("w", newline="") as h:
        w = csv.writer(h)
        w.writerow(["ID", "Gloss"])
        w.writerows([f"c{i}", f"CONCEPT {i:04d}"] for i in range(n_concepts))
    with (root / "languages.csv").open("w", newline="") as h:
        w = csv.writer(h)
        w.writerow(["ID", "Glottocode", "Family"])
        w.writerows([f"l{v}", f"{name[:4]}{v:04d}", f"Family{rng.randrange(n_families)}"] for v in range(n_varieties))
    with (root / "forms.csv").open("w", newline="") as h:
        w = csv.writer(h)
        w.writerow(["ID", "Language_ID", "Parameter_ID", "Segments"])
        fid = 0
        for v in range(n_varieties):
            words = {}
            for c in range(n_concepts):
                if rng.random() < 0.85:
                    words[c] = " ".join(rng.choice(SYLLABLES) for _ in range(rng.randint(2, 3)))
            for a, b in planted:
                if a in words and b in words and rng.random() < rate:
                    words[b] = words[a]
            for c, word in words.items():
                fid += 1
                w.writerow([fid, f"l{v}", f"c{c}", word])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--datasets", type=int, default=4)
    parser.add_argument("--varieties", type=int, default=60, help="per dataset")
    parser.add_argument("--concepts", type=int, default=400)
    parser.add_argument("--families", type=int, default=25)
    parser.add_argument("--planted", type=int, default=60, help="number of planted concept pairs")
    parser.add_argument("--rate", type=float, default=0.3)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out", type=Path, default=Path("out/synthetic"))
    args = parser.parse_args()

    rng = random.Random(args.seed)
    planted = [tuple(rng.sample(range(args.concepts), 2)) for _ in range(args.planted)]
    data = args.out / "datasets"
    for d in range(args.datasets):
        write_dataset(data / f"syn{d}", f"syn{d}", rng, args.varieties, args.concepts, args.families, planted, args.rate)

    config = PipelineConfig(
        dataset_dir=data, output_dir=args.out / "run",
        replacement_table=None, min_families=3, seed=args.seed, threads=args.threads,
        selection=SelectionConfig(args.concepts, min(180, args.concepts // 2)),
    )
    start = time.perf_counter()
    manifest = run_all(config)
    total = time.perf_counter() - start
    for stage in manifest["stages"]:
        print(f"{stage['stage']:<12} {stage['seconds']:8.3f}s  {stage['counts']}")
    print(f"total {total:.2f}s")
    stats = json.loads((args.out / "run" / "stats.json").read_text())
    print(json.dumps(stats, indent=2))


if __name__ == "__main__":
    main()
