"""colexforge: build cross-linguistic colexification networks from CLDF word lists."""

from colexforge.colexify import ColexStore, build_store, normalize_form
from colexforge.community import Partition, detect_communities, map_equation
from colexforge.expand import ReplacementTable, expand_corpus, load_replacement_table
from colexforge.ingest import Corpus, load_dataset, load_datasets, merge_corpora
from colexforge.network import ColexNetwork, build_network
from colexforge.selection import SelectionConfig, apply_selection

__version__ = "0.1.0"

__all__ = [
    "ColexNetwork",
    "ColexStore",
    "Corpus",
    "Partition",
    "ReplacementTable",
    "SelectionConfig",
    "apply_selection",
    "build_network",
    "build_store",
    "detect_communities",
    "expand_corpus",
    "load_dataset",
    "load_datasets",
    "load_replacement_table",
    "map_equation",
    "merge_corpora",
    "normalize_form",
]
