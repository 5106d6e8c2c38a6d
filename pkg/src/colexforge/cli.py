"""Command line entry point: ``colexforge <command> ...``.

Each stage reads and writes plain files, so stages can be rerun one at a time;
``run-all`` chains them with a JSON config.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from colexforge import pipeline
from colexforge.colexify import build_store, read_store, write_store
from colexforge.community import DEFAULT_TRIALS, detect_communities
from colexforge.errors import ColexforgeError, StageError
from colexforge.expand import expand_corpus, load_replacement_table
from colexforge.export import (
    build_structural,
    compute_stats,
    diff_networks,
    read_gml,
    read_partition,
    write_gml,
    write_partition,
    write_structural,
    write_tables,
)
from colexforge.ingest import load_datasets, read_corpus, save_corpus
from colexforge.network import DEFAULT_MIN_FAMILIES, build_network
from colexforge.selection import SelectionConfig, apply_selection

logger = logging.getLogger("colexforge")


def _emit(data: dict, path: str | None) -> None:
    if path:
        pipeline.write_json(data, path)
    else:
        json.dump(data, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")


def _network(args) -> tuple:
    corpus = read_corpus(args.corpus)
    store = read_store(args.store, corpus)
    network = build_network(store, args.min_families)
    partition = None
    if getattr(args, "partition", None):
        partition = read_partition(args.partition)
        network = network.with_communities(partition.assignment)
    return corpus, store, network, partition


def cmd_ingest(args) -> None:
    corpus = load_datasets(args.datasets, threads=args.threads)
    save_corpus(corpus, args.out)
    logger.info("wrote %d forms of %d varieties to %s", len(corpus.forms), len(corpus.varieties), args.out)


def cmd_expand(args) -> None:
    table_path = args.table or pipeline.default_replacement_table()
    expanded, report = expand_corpus(read_corpus(args.corpus), load_replacement_table(table_path))
    save_corpus(expanded, args.out)
    _emit(report.as_dict(), args.report)


def cmd_select(args) -> None:
    cap = None if args.concept_cap <= 0 else args.concept_cap
    config = SelectionConfig(concept_cap=cap, variety_min_concepts=args.min_concepts)
    selected, report = apply_selection(read_corpus(args.corpus), config)
    save_corpus(selected, args.out)
    _emit(report.as_dict(), args.report)


def cmd_colexify(args) -> None:
    store = build_store(read_corpus(args.corpus), threads=args.threads)
    write_store(store, args.out)


def cmd_communities(args) -> None:
    _, _, network, _ = _network(args)
    partition, codelength = detect_communities(network, seed=args.seed, trials=args.trials)
    write_partition(partition, args.out)
    logger.info("%d communities, codelength %.6f bits", partition.num_communities, codelength.total_bits)


def cmd_export(args) -> None:
    corpus, store, network, _ = _network(args)
    if args.gml:
        write_gml(network, args.gml)
    if args.nodes or args.edges:
        if not (args.nodes and args.edges):
            raise SystemExit("--nodes and --edges go together")
        write_tables(network, args.nodes, args.edges)
    if args.structural:
        write_structural(build_structural(corpus, store, network), args.structural)


def cmd_stats(args) -> None:
    corpus, _, network, partition = _network(args)
    stats = compute_stats(corpus, network, partition)
    if args.table:
        for name, value in stats.table_rows():
            print(f"{name:<24} {value}")
    else:
        _emit(stats.as_dict(), args.out)


def cmd_diff(args) -> None:
    _emit(diff_networks(read_gml(args.a), read_gml(args.b)).as_dict(), args.out)


def cmd_run_all(args) -> None:
    config = pipeline.PipelineConfig.from_json(args.config)
    if args.output_dir:
        config.output_dir = Path(args.output_dir)
    if args.seed is not None:
        config.seed = args.seed
    if args.threads_given:
        config.threads = args.threads
    manifest = pipeline.run_all(config)
    logger.info("run-all finished: %d stages, output in %s", len(manifest["stages"]), config.output_dir)


def _network_inputs(p: argparse.ArgumentParser, partition: bool = True) -> None:
    p.add_argument("--corpus", required=True, help="selected corpus bundle")
    p.add_argument("--store", required=True, help="colexification store CSV")
    p.add_argument("--min-families", type=int, default=DEFAULT_MIN_FAMILIES)
    if partition:
        p.add_argument("--partition", help="community partition CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="colexforge", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=None, help="worker threads (output does not depend on it)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and merge datasets into a corpus bundle")
    p.add_argument("--datasets", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("expand", help="expand underspecified concepts")
    p.add_argument("--corpus", required=True)
    p.add_argument("--table", help="replacement table CSV (default: bundled sample)")
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="write the expansion report here instead of stdout")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("select", help="concept cap and variety coverage threshold")
    p.add_argument("--corpus", required=True)
    p.add_argument("--concept-cap", type=int, default=1800, help="0 keeps all concepts")
    p.add_argument("--min-concepts", type=int, default=180)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("colexify", help="extract colexifications")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_colexify)

    p = sub.add_parser("communities", help="detect communities")
    _network_inputs(p, partition=False)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("export", help="write GML, tables and the structural dataset")
    _network_inputs(p)
    p.add_argument("--gml")
    p.add_argument("--nodes")
    p.add_argument("--edges")
    p.add_argument("--structural", help="output directory")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("stats", help="summary statistics")
    _network_inputs(p)
    p.add_argument("--out")
    p.add_argument("--table", action="store_true", help="print rounded summary rows")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("diff", help="compare two networks written as GML")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("run-all", help="run the whole pipeline")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_run_all)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    args.threads_given = args.threads is not None
    if args.threads is None:
        args.threads = 1
    try:
        args.func(args)
    except StageError as exc:
        print(f"colexforge: error in stage {exc.stage!r}: {exc.cause}", file=sys.stderr)
        return 1
    except (ColexforgeError, ValueError, OSError) as exc:
        print(f"colexforge {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
