"""Replace underspecified concepts by the specific concepts they cover.

A replacement table has two kinds of rows.  An *expansion* maps one broad
concept (``ARM OR HAND``) to two or more specific ones; every form of the
broad concept is copied once per target.  A *rename* maps a concept to a
single other concept.  Either way the new forms remember the concept they
came from in ``derived_from``.

Table file format: CSV with header ``source,targets``; targets are separated
by ``;``.  A row with a single target and no ``;`` is a rename.
"""

from __future__ import annotations

import csv
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from colexforge.errors import (
    ChainedExpansion,
    DuplicateSource,
    MalformedMetadata,
    MissingFile,
    SingletonExpansionWithExpansionSyntax,
)
from colexforge.ingest import Concept, Corpus, WordForm

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReplacementTable:
    expansions: dict[str, tuple[str, ...]] = field(default_factory=dict)
    renames: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        both = set(self.expansions) & set(self.renames)
        if both:
            raise DuplicateSource(f"sources both expanded and renamed: {sorted(both)}")
        for source, targets in self.expansions.items():
            if len(set(targets)) < 2:
                raise SingletonExpansionWithExpansionSyntax(
                    f"{source!r} expands to fewer than two distinct targets"
                )
        # any target that is itself a source would make expansion order-dependent
        sources = set(self.expansions) | set(self.renames)
        for source, targets in self.expansions.items():
            for target in targets:
                if target in sources:
                    raise ChainedExpansion(f"{source!r} -> {target!r}, which is itself replaced")
        for source, target in self.renames.items():
            if target in sources:
                raise ChainedExpansion(f"{source!r} -> {target!r}, which is itself replaced")

    @property
    def sources(self) -> set[str]:
        return set(self.expansions) | set(self.renames)

    def targets(self) -> set[str]:
        out = set(self.renames.values())
        for targets in self.expansions.values():
            out.update(targets)
        return out


def parse_targets(field_text: str, source: str) -> tuple[tuple[str, ...], bool]:
    """Split a targets cell; returns (targets, written with expansion syntax)."""
    expansion_syntax = ";" in field_text
    targets: list[str] = []
    for part in field_text.split(";"):
        part = part.strip()
        if part and part not in targets:
            targets.append(part)
    if not targets:
        raise MalformedMetadata(f"replacement row {source!r} has no targets")
    return tuple(targets), expansion_syntax


def load_replacement_table(path: str | Path) -> ReplacementTable:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"replacement table not found: {path}")
    expansions: dict[str, tuple[str, ...]] = {}
    renames: dict[str, str] = {}
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if not reader.fieldnames or {"source", "targets"} - set(reader.fieldnames):
            raise MalformedMetadata(f"{path}: header must contain 'source' and 'targets'")
        for row in reader:
            source = (row["source"] or "").strip()
            if not source:
                continue
            if source in expansions or source in renames:
                raise DuplicateSource(f"{path} line {reader.line_num}: {source!r} listed twice")
            targets, expansion_syntax = parse_targets(row["targets"] or "", source)
            if len(targets) == 1:
                if expansion_syntax:
                    raise SingletonExpansionWithExpansionSyntax(
                        f"{path} line {reader.line_num}: {source!r} uses ';' but has one target"
                    )
                renames[source] = targets[0]
            else:
                expansions[source] = targets
    return ReplacementTable(expansions, renames)


@dataclass
class ExpansionReport:
    input_forms: int = 0
    derived_forms: int = 0
    renamed_forms: int = 0
    output_forms: int = 0
    removed_duplicates: int = 0
    per_source: dict[str, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "input_forms": self.input_forms,
            "output_forms": self.output_forms,
            "derived_forms": self.derived_forms,
            "renamed_forms": self.renamed_forms,
            "removed_duplicates": self.removed_duplicates,
            "per_source": dict(sorted(self.per_source.items())),
        }


def expand_corpus(corpus: Corpus, table: ReplacementTable) -> tuple[Corpus, ExpansionReport]:
    """Apply ``table`` to every form of ``corpus``.

    Forms of replaced concepts are removed and their copies take their place.
    If a copy collides with a form already present for the same variety,
    concept and segments, only one survives, and a directly attested form wins
    over a derived one.
    """
    candidates: list[WordForm] = []
    fresh: set[int] = set()  # indices of candidates created here
    for form in corpus.forms:
        source = form.concept_id
        if source in table.expansions:
            for target in table.expansions[source]:
                fresh.add(len(candidates))
                candidates.append(
                    WordForm(
                        id=f"{form.id}:{target}",
                        variety_id=form.variety_id,
                        concept_id=target,
                        segments=form.segments,
                        value=form.value,
                        derived_from=source,
                    )
                )
        elif source in table.renames:
            target = table.renames[source]
            fresh.add(len(candidates))
            candidates.append(
                WordForm(
                    id=form.id,
                    variety_id=form.variety_id,
                    concept_id=target,
                    segments=form.segments,
                    value=form.value,
                    derived_from=source,
                )
            )
        else:
            candidates.append(form)

    direct = {f.key for f in candidates if f.derived_from is None}
    seen: set[tuple] = set()
    kept: list[WordForm] = []
    kept_fresh: list[WordForm] = []
    for i, form in enumerate(candidates):
        if form.key in seen or (form.derived_from is not None and form.key in direct):
            continue
        seen.add(form.key)
        kept.append(form)
        if i in fresh:
            kept_fresh.append(form)

    concepts = {cid: c for cid, c in corpus.concepts.items() if cid not in table.sources}
    for form in kept:
        if form.concept_id not in concepts:
            concepts[form.concept_id] = Concept(form.concept_id)

    per_source = Counter(f.derived_from for f in kept_fresh if f.derived_from in table.expansions)
    report = ExpansionReport(
        input_forms=len(corpus.forms),
        derived_forms=sum(per_source.values()),
        renamed_forms=sum(1 for f in kept_fresh if f.derived_from in table.renames),
        output_forms=len(kept),
        removed_duplicates=len(candidates) - len(kept),
        per_source=dict(per_source),
    )
    logger.info(
        "expansion: %d -> %d forms (%d derived, %d renamed)",
        report.input_forms, report.output_forms, report.derived_forms, report.renamed_forms,
    )
    return Corpus(corpus.varieties, concepts, tuple(kept), corpus.provenance), report


def count_derived(corpus: Corpus) -> int:
    """Number of forms that were produced by expansion or renaming."""
    return sum(1 for f in corpus.forms if f.derived_from is not None)
