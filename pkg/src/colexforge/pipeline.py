"""End-to-end run: ingest, expand, select, colexify, network, communities, export."""

from __future__ import annotations

import json
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterator

from colexforge.colexify import build_store, write_store
from colexforge.community import DEFAULT_TRIALS, detect_communities
from colexforge.errors import StageError
from colexforge.expand import count_derived, expand_corpus, load_replacement_table
from colexforge.export import (
    build_structural,
    compute_stats,
    write_gml,
    write_partition,
    write_structural,
    write_tables,
)
from colexforge.ingest import load_datasets, save_corpus
from colexforge.network import DEFAULT_MIN_FAMILIES, build_network
from colexforge.selection import SelectionConfig, apply_selection

logger = logging.getLogger(__name__)

STAGES = ("ingest", "expand", "select", "colexify", "network", "communities", "export")

# file names inside the output directory
CORPUS_DIR = "corpus"
EXPANDED_DIR = "expanded"
SELECTED_DIR = "selected"
EXPANSION_REPORT = "expansion.json"
SELECTION_REPORT = "selection.json"
STORE_FILE = "store.csv"
PARTITION_FILE = "partition.csv"
GML_FILE = "network.gml"
NODES_FILE = "nodes.csv"
EDGES_FILE = "edges.csv"
STRUCTURAL_DIR = "structural"
STATS_FILE = "stats.json"
MANIFEST_FILE = "manifest.json"


def default_replacement_table() -> Path:
    """Small illustrative table shipped with the package (not the full published list)."""
    return Path(str(resources.files("colexforge") / "data" / "replacements.csv"))


@dataclass
class PipelineConfig:
    dataset_dir: Path
    output_dir: Path
    replacement_table: Path | None = None
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    min_families: int = DEFAULT_MIN_FAMILIES
    seed: int = 42
    trials: int = DEFAULT_TRIALS
    threads: int = 1

    @property
    def table_path(self) -> Path:
        return self.replacement_table or default_replacement_table()

    @classmethod
    def from_dict(cls, data: dict[str, Any], base: Path | None = None) -> "PipelineConfig":
        """Build from a JSON-style mapping; relative paths resolve against ``base``."""
        base = base or Path.cwd()

        def path(value: str | None) -> Path | None:
            if value is None:
                return None
            p = Path(value)
            return p if p.is_absolute() else base / p

        known = {"dataset_dir", "output_dir", "replacement_table", "concept_cap",
                 "variety_min_concepts", "min_families", "seed", "trials", "threads"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        defaults = SelectionConfig()
        return cls(
            dataset_dir=path(data["dataset_dir"]),
            output_dir=path(data.get("output_dir", "out")),
            replacement_table=path(data.get("replacement_table")),
            selection=SelectionConfig(
                concept_cap=data.get("concept_cap", defaults.concept_cap),
                variety_min_concepts=data.get("variety_min_concepts", defaults.variety_min_concepts),
            ),
            min_families=data.get("min_families", DEFAULT_MIN_FAMILIES),
            seed=data.get("seed", 42),
            trials=data.get("trials", DEFAULT_TRIALS),
            threads=data.get("threads", 1),
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")), base=path.parent)


def write_json(data: Any, path: str | Path) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


@contextmanager
def _stage(name: str, log: list[dict]) -> Iterator[dict]:
    counts: dict[str, Any] = {}
    start = time.perf_counter()
    try:
        yield counts
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc
    log.append({"stage": name, "seconds": round(time.perf_counter() - start, 6), "counts": counts})
    logger.info("stage %s done: %s", name, counts)


def run_all(config: PipelineConfig) -> dict[str, Any]:
    """Run every stage, write all artifacts to ``config.output_dir``; return the manifest."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    stages: list[dict] = []

    with _stage("ingest", stages) as counts:
        corpus = load_datasets(config.dataset_dir, threads=config.threads)
        save_corpus(corpus, out / CORPUS_DIR)
        counts.update(datasets=len(corpus.provenance), varieties=len(corpus.varieties),
                      concepts=len(corpus.concepts), forms=len(corpus.forms))

    with _stage("expand", stages) as counts:
        table = load_replacement_table(config.table_path)
        expanded, exp_report = expand_corpus(corpus, table)
        save_corpus(expanded, out / EXPANDED_DIR)
        write_json(exp_report.as_dict(), out / EXPANSION_REPORT)
        counts.update(forms_in=exp_report.input_forms, forms_out=exp_report.output_forms,
                      derived_forms=count_derived(expanded))

    with _stage("select", stages) as counts:
        selected, sel_report = apply_selection(expanded, config.selection)
        save_corpus(selected, out / SELECTED_DIR)
        write_json(sel_report.as_dict(), out / SELECTION_REPORT)
        counts.update(forms_in=len(expanded.forms), forms_out=len(selected.forms),
                      kept_concepts=len(sel_report.kept_concepts),
                      dropped_varieties=len(sel_report.dropped_varieties),
                      effective_concepts=len(sel_report.effective_concepts))

    with _stage("colexify", stages) as counts:
        store = build_store(selected, threads=config.threads)
        write_store(store, out / STORE_FILE)
        counts.update(events=len(store.events), pairs=len(store.index))

    with _stage("network", stages) as counts:
        network = build_network(store, config.min_families)
        counts.update(nodes=len(network.nodes), edges_before_threshold=len(store.index),
                      edges_after_threshold=len(network.edges))

    with _stage("communities", stages) as counts:
        partition, codelength = detect_communities(network, seed=config.seed, trials=config.trials)
        network = network.with_communities(partition.assignment)
        write_partition(partition, out / PARTITION_FILE)
        counts.update(communities=partition.num_communities, codelength=codelength.total_bits)

    with _stage("export", stages) as counts:
        write_gml(network, out / GML_FILE)
        write_tables(network, out / NODES_FILE, out / EDGES_FILE)
        structural = build_structural(selected, store, network)
        write_structural(structural, out / STRUCTURAL_DIR)
        stats = compute_stats(selected, network, partition)
        write_json(stats.as_dict(), out / STATS_FILE)
        counts.update(parameters=len(structural.parameters), values=len(structural.values))

    manifest = {
        "config": {
            "dataset_dir": str(config.dataset_dir),
            "replacement_table": str(config.table_path),
            "concept_cap": config.selection.concept_cap,
            "variety_min_concepts": config.selection.variety_min_concepts,
            "min_families": config.min_families,
            "seed": config.seed,
            "trials": config.trials,
        },
        "stages": stages,
        "artifacts": sorted(
            str(p.relative_to(out)) for p in out.rglob("*") if p.is_file() and p.name != MANIFEST_FILE
        ),
    }
    write_json(manifest, out / MANIFEST_FILE)
    return manifest
