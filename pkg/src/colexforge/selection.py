"""Concept ranking and per-variety coverage filtering."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from colexforge.errors import EmptySelection
from colexforge.ingest import Corpus

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelectionConfig:
    concept_cap: int | None = 1800  # None keeps every attested concept
    variety_min_concepts: int = 180

    def __post_init__(self) -> None:
        if self.variety_min_concepts < 1:
            raise ValueError("variety_min_concepts must be at least 1")
        if self.concept_cap is not None and self.concept_cap < self.variety_min_concepts:
            raise ValueError("concept_cap must not be smaller than variety_min_concepts")


@dataclass
class SelectionReport:
    ranked_concepts: list[tuple[str, int]] = field(default_factory=list)
    kept_concepts: set[str] = field(default_factory=set)
    dropped_varieties: list[tuple[str, int]] = field(default_factory=list)
    effective_concepts: set[str] = field(default_factory=set)

    def as_dict(self) -> dict:
        return {
            "ranked_concepts": [list(item) for item in self.ranked_concepts],
            "kept_concepts": sorted(self.kept_concepts),
            "dropped_varieties": [list(item) for item in self.dropped_varieties],
            "effective_concepts": sorted(self.effective_concepts),
        }


def rank_concepts(corpus: Corpus, cap: int | None) -> list[tuple[str, int]]:
    """Concepts by number of attesting varieties, most frequent first.

    Ties are broken by concept id; the list is cut after ``cap`` entries.
    """
    counts = [(cid, len(vids)) for cid, vids in corpus.concept_varieties().items()]
    counts.sort(key=lambda item: (-item[1], item[0]))
    return counts if cap is None else counts[:cap]


def apply_selection(corpus: Corpus, config: SelectionConfig) -> tuple[Corpus, SelectionReport]:
    """Restrict to the top concepts, then drop varieties with too little coverage.

    The two filters run once each, in that order.  A concept that loses all
    its varieties in the second step disappears from the effective inventory
    but does not trigger another round of variety filtering.
    """
    ranked = rank_concepts(corpus, config.concept_cap)
    kept = {cid for cid, _ in ranked}
    forms = [f for f in corpus.forms if f.concept_id in kept]

    coverage: dict[str, set[str]] = {vid: set() for vid in corpus.varieties}
    for form in forms:
        coverage[form.variety_id].add(form.concept_id)
    dropped = sorted(
        (vid, len(cs)) for vid, cs in coverage.items() if len(cs) < config.variety_min_concepts
    )
    dropped_ids = {vid for vid, _ in dropped}
    survivors = {vid: v for vid, v in corpus.varieties.items() if vid not in dropped_ids}
    if not survivors:
        raise EmptySelection(
            f"no variety covers {config.variety_min_concepts} of the {len(kept)} kept concepts"
        )

    forms = [f for f in forms if f.variety_id not in dropped_ids]
    effective = {f.concept_id for f in forms}
    concepts = {cid: c for cid, c in corpus.concepts.items() if cid in effective}

    report = SelectionReport(ranked, kept, dropped, effective)
    logger.info(
        "selection: kept %d concepts, dropped %d of %d varieties, %d effective concepts",
        len(kept), len(dropped), len(corpus.varieties), len(effective),
    )
    return Corpus(survivors, concepts, tuple(forms), corpus.provenance), report
