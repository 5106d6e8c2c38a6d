"""Colexification extraction.

Within one variety, two concepts colexify when some form of each has the same
normalized segment string.  Forms are bucketed by that string in a single pass
over the variety, so no pair of forms is ever compared directly.
"""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from colexforge.errors import EmptyAfterNormalization, InconsistentInputs
from colexforge.ingest import Corpus, WordForm

logger = logging.getLogger(__name__)

BOUNDARY_TOKENS = frozenset({"+", "_"})

Pair = tuple[str, str]


def normalize_form(segments: Sequence[str]) -> str:
    """Canonical key of a segmented form: boundary markers dropped, tokens space-joined.

    Case and diacritics are kept as they are.
    """
    tokens = [s for s in segments if s and s not in BOUNDARY_TOKENS]
    if not tokens:
        raise EmptyAfterNormalization(f"nothing left of segments {list(segments)!r}")
    return " ".join(tokens)


def pair_key(a: str, b: str) -> Pair:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class ColexEvent:
    variety_id: str
    form_key: str
    concepts: tuple[str, ...]  # sorted, at least two
    derived: frozenset[str] = frozenset()  # concepts whose form came from expansion

    @property
    def derived_flags(self) -> dict[str, bool]:
        return {c: c in self.derived for c in self.concepts}

    def pairs(self) -> Iterable[Pair]:
        return combinations(self.concepts, 2)


@dataclass
class PairRecord:
    varieties: set[str] = field(default_factory=set)
    families: set[str] = field(default_factory=set)
    words: int = 0


@dataclass
class ColexStore:
    events: list[ColexEvent] = field(default_factory=list)
    index: dict[Pair, PairRecord] = field(default_factory=dict)
    # concept -> (number of varieties, number of families) with a form for it
    coverage: dict[str, tuple[int, int]] = field(default_factory=dict)

    def pairs(self) -> set[Pair]:
        return set(self.index)


def extract_variety(
    forms: Iterable[WordForm],
    normalize: Callable[[Sequence[str]], str] = normalize_form,
) -> list[ColexEvent]:
    """Colexification events of one variety, ordered by form key."""
    buckets: dict[str, dict[str, bool]] = defaultdict(dict)
    variety_id = None
    for form in forms:
        if variety_id is None:
            variety_id = form.variety_id
        elif form.variety_id != variety_id:
            raise InconsistentInputs(
                f"forms of {variety_id} and {form.variety_id} passed together"
            )
        try:
            key = normalize(form.segments)
        except EmptyAfterNormalization:
            logger.warning("form %s has only boundary markers, skipped", form.id)
            continue
        bucket = buckets[key]
        # a concept attested both directly and derived under one key counts as direct
        derived = form.derived_from is not None
        bucket[form.concept_id] = bucket.get(form.concept_id, True) and derived

    events = []
    for key in sorted(buckets):
        bucket = buckets[key]
        if len(bucket) < 2:
            continue
        events.append(
            ColexEvent(
                variety_id=variety_id,
                form_key=key,
                concepts=tuple(sorted(bucket)),
                derived=frozenset(c for c, d in bucket.items() if d),
            )
        )
    return events


def index_events(
    events: Iterable[ColexEvent], family_of: Mapping[str, str] | Callable[[str], str]
) -> dict[Pair, PairRecord]:
    lookup = family_of if callable(family_of) else family_of.__getitem__
    index: dict[Pair, PairRecord] = {}
    for event in events:
        family = lookup(event.variety_id)
        for pair in event.pairs():
            record = index.get(pair)
            if record is None:
                record = index[pair] = PairRecord()
            record.varieties.add(event.variety_id)
            record.families.add(family)
            record.words += 1
    return index


def concept_coverage(corpus: Corpus) -> dict[str, tuple[int, int]]:
    attested = corpus.concept_varieties()
    coverage = {}
    for cid in corpus.concepts:
        vids = attested.get(cid, set())
        coverage[cid] = (len(vids), len({corpus.family_of(v) for v in vids}))
    return coverage


def build_store(
    corpus: Corpus,
    threads: int = 1,
    normalize: Callable[[Sequence[str]], str] = normalize_form,
) -> ColexStore:
    grouped = corpus.forms_by_variety()
    order = sorted(grouped)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_variety = list(pool.map(lambda v: extract_variety(grouped[v], normalize), order))
    else:
        per_variety = [extract_variety(grouped[v], normalize) for v in order]
    events = [event for chunk in per_variety for event in chunk]
    store = ColexStore(
        events=events,
        index=index_events(events, corpus.family_of),
        coverage=concept_coverage(corpus),
    )
    logger.info("colexify: %d events, %d concept pairs", len(events), len(store.index))
    return store


# serialization -------------------------------------------------------------

STORE_HEADER = ["concept_a", "concept_b", "variety_id", "form_key", "derived"]


def write_store(store: ColexStore, path: str | Path) -> None:
    """One row per (event, concept pair).

    ``derived`` names the endpoints whose form is an expansion copy: empty,
    ``a``, ``b`` or ``ab``.
    """
    rows = []
    for event in store.events:
        for a, b in event.pairs():
            flag = ("a" if a in event.derived else "") + ("b" if b in event.derived else "")
            rows.append([a, b, event.variety_id, event.form_key, flag])
    rows.sort()
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(STORE_HEADER)
        writer.writerows(rows)


def read_store(path: str | Path, corpus: Corpus) -> ColexStore:
    """Rebuild a store from :func:`write_store` output and the corpus it came from."""
    concepts: dict[tuple[str, str], set[str]] = defaultdict(set)
    derived: dict[tuple[str, str], set[str]] = defaultdict(set)
    with Path(path).open(encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            key = (row["variety_id"], row["form_key"])
            a, b = row["concept_a"], row["concept_b"]
            if row["variety_id"] not in corpus.varieties:
                raise InconsistentInputs(f"store mentions unknown variety {row['variety_id']!r}")
            concepts[key].update((a, b))
            if "a" in row["derived"]:
                derived[key].add(a)
            if "b" in row["derived"]:
                derived[key].add(b)
    events = [
        ColexEvent(vid, form_key, tuple(sorted(cs)), frozenset(derived[(vid, form_key)]))
        for (vid, form_key), cs in sorted(concepts.items())
    ]
    return ColexStore(events, index_events(events, corpus.family_of), concept_coverage(corpus))
