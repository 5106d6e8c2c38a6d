"""Time hash-table colexification against all-pairs comparison.

Builds one synthetic variety per size, checks that both methods agree and
prints the timings.  The hash table grows linearly with the number of forms;
the pairwise scan grows quadratically.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

from colexforge.colexify import extract_variety
from colexforge.ingest import WordForm

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from oracles import brute_force_pairs  # noqa: E402


def variety(rng: random.Random, n_forms: int, n_concepts: int) -> list[WordForm]:
    return [
        WordForm(str(i), "v", f"C{rng.randrange(n_concepts)}",
                 tuple(rng.choice("ptkaiu") for _ in range(rng.randint(2, 4))))
        for i in range(n_forms)
    ]


def clock(fn, *args):
    start = time.perf_counter()
    result = fn(*args)
    return result, time.perf_counter() - start


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[250, 500, 1000, 2000, 4000])
    parser.add_argument("--concepts", type=int, default=1800)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    print(f"{'forms':>6} {'pairs':>7} {'hash s':>9} {'pairwise s':>11} {'ratio':>7}")
    for n in args.sizes:
        forms = variety(rng, n, args.concepts)
        events, t_hash = clock(extract_variety, forms)
        expected, t_pair = clock(brute_force_pairs, forms)
        got = {p for e in events for p in e.pairs()}
        if got != expected:
            raise SystemExit(f"mismatch at n={n}")
        print(f"{n:>6} {len(got):>7} {t_hash:>9.4f} {t_pair:>11.4f} {t_pair / t_hash:>7.1f}")


if __name__ == "__main__":
    main()
