"""Read CLDF-style word lists and merge them into one corpus.

A dataset is a directory holding one ``*metadata.json`` file that names three
CSV tables and maps their columns onto the fields colexforge needs::

    {
      "id": "ds1",
      "tables": {
        "forms": {"file": "forms.csv",
                  "columns": {"id": "ID", "variety": "Language_ID",
                              "concept": "Parameter_ID", "segments": "Segments",
                              "value": "Form"}},
        "languages": {"file": "languages.csv",
                      "columns": {"id": "ID", "name": "Name",
                                  "glottocode": "Glottocode", "family": "Family"}},
        "parameters": {"file": "parameters.csv",
                       "columns": {"id": "ID", "gloss": "Concepticon_Gloss",
                                   "concepticon_id": "Concepticon_ID"}}
      }
    }

Forms point at parameter rows through the local parameter id; the concept a
form ends up attached to is the parameter's ``gloss`` (or its id when no gloss
column is mapped).  Parameter rows with an empty gloss are not linked to the
reference catalog, and forms attached to them are skipped.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from colexforge.errors import (
    DanglingReference,
    DuplicateId,
    MalformedMetadata,
    MissingFile,
)

logger = logging.getLogger(__name__)

TABLE_KEYS = ("forms", "languages", "parameters")
REQUIRED_COLUMNS = {
    "forms": ("id", "variety", "concept", "segments"),
    "languages": ("id",),
    "parameters": ("id",),
}


@dataclass(frozen=True)
class TableSpec:
    file: str
    columns: Mapping[str, str]

    def column(self, key: str) -> str | None:
        return self.columns.get(key)


@dataclass(frozen=True)
class DatasetDescriptor:
    id: str
    path: Path
    metadata_file: str
    form_table: TableSpec
    language_table: TableSpec
    parameter_table: TableSpec

    @classmethod
    def from_metadata(cls, metadata_path: str | Path) -> "DatasetDescriptor":
        """Parse and check a metadata file; every declared table must exist."""
        metadata_path = Path(metadata_path)
        if not metadata_path.is_file():
            raise MissingFile(f"metadata file not found: {metadata_path}")
        try:
            meta = json.loads(metadata_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedMetadata(f"{metadata_path}: invalid JSON ({exc})") from exc
        if not isinstance(meta, dict) or not isinstance(meta.get("id"), str) or not meta["id"]:
            raise MalformedMetadata(f"{metadata_path}: missing string key 'id'")
        if "/" in meta["id"]:
            raise MalformedMetadata(f"{metadata_path}: dataset id may not contain '/'")
        tables = meta.get("tables")
        if not isinstance(tables, dict):
            raise MalformedMetadata(f"{metadata_path}: missing object key 'tables'")

        base = metadata_path.parent
        specs = {}
        for key in TABLE_KEYS:
            entry = tables.get(key)
            if not isinstance(entry, dict) or not isinstance(entry.get("file"), str):
                raise MalformedMetadata(f"{metadata_path}: table {key!r} needs a 'file'")
            columns = entry.get("columns", {})
            if not isinstance(columns, dict) or not all(
                isinstance(v, str) for v in columns.values()
            ):
                raise MalformedMetadata(f"{metadata_path}: table {key!r} has a bad column map")
            missing = [c for c in REQUIRED_COLUMNS[key] if c not in columns]
            if missing:
                raise MalformedMetadata(
                    f"{metadata_path}: table {key!r} column map lacks {missing}"
                )
            if not (base / entry["file"]).is_file():
                raise MissingFile(f"{metadata_path}: declared table file {entry['file']!r} not found")
            specs[key] = TableSpec(entry["file"], dict(columns))

        return cls(
            id=meta["id"],
            path=base,
            metadata_file=metadata_path.name,
            form_table=specs["forms"],
            language_table=specs["languages"],
            parameter_table=specs["parameters"],
        )


@dataclass(frozen=True)
class Variety:
    id: str
    name: str
    dataset_id: str
    glottocode: str | None = None
    family: str | None = None

    @property
    def family_key(self) -> str:
        # unclassified varieties count as a family of their own
        return self.family if self.family else self.id


@dataclass(frozen=True)
class Concept:
    id: str
    concepticon_id: str | None = None


@dataclass(frozen=True)
class WordForm:
    id: str
    variety_id: str
    concept_id: str
    segments: tuple[str, ...]
    value: str = ""
    derived_from: str | None = None

    @property
    def key(self) -> tuple[str, str, tuple[str, ...]]:
        return (self.variety_id, self.concept_id, self.segments)


@dataclass(frozen=True)
class Corpus:
    varieties: dict[str, Variety] = field(default_factory=dict)
    concepts: dict[str, Concept] = field(default_factory=dict)
    forms: tuple[WordForm, ...] = ()
    provenance: tuple[str, ...] = ()

    def forms_by_variety(self) -> dict[str, list[WordForm]]:
        grouped: dict[str, list[WordForm]] = defaultdict(list)
        for form in self.forms:
            grouped[form.variety_id].append(form)
        return dict(grouped)

    def concept_varieties(self) -> dict[str, set[str]]:
        """Concept id -> ids of the varieties with at least one form for it."""
        attested: dict[str, set[str]] = defaultdict(set)
        for form in self.forms:
            attested[form.concept_id].add(form.variety_id)
        return dict(attested)

    def family_of(self, variety_id: str) -> str:
        return self.varieties[variety_id].family_key


def dedup_forms(forms: Iterable[WordForm]) -> tuple[WordForm, ...]:
    """Drop forms repeating an earlier (variety, concept, segments) triple."""
    seen: set[tuple] = set()
    kept = []
    for form in forms:
        if form.key in seen:
            continue
        seen.add(form.key)
        kept.append(form)
    return tuple(kept)


def split_segments(text: str) -> tuple[str, ...]:
    return tuple(text.split())


def _read_rows(path: Path) -> Iterable[tuple[int, dict[str, str]]]:
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            return
        for row in reader:
            yield reader.line_num, row


def _cell(row: dict[str, str], spec: TableSpec, key: str, path: Path) -> str:
    column = spec.column(key)
    if column is None:
        return ""
    if column not in row:
        raise MalformedMetadata(f"{path}: column {column!r} not in header")
    return (row[column] or "").strip()


def load_dataset(descriptor: DatasetDescriptor) -> Corpus:
    """Load one dataset, resolving its cross references.

    Variety and form ids are namespaced as ``<dataset id>/<local id>``.
    """
    ds = descriptor.id
    base = descriptor.path

    varieties: dict[str, Variety] = {}
    lang_spec = descriptor.language_table
    lang_path = base / lang_spec.file
    for line, row in _read_rows(lang_path):
        local = _cell(row, lang_spec, "id", lang_path)
        vid = f"{ds}/{local}"
        if vid in varieties:
            raise DuplicateId(lang_spec.file, line, local)
        varieties[vid] = Variety(
            id=vid,
            name=_cell(row, lang_spec, "name", lang_path) or local,
            dataset_id=ds,
            glottocode=_cell(row, lang_spec, "glottocode", lang_path) or None,
            family=_cell(row, lang_spec, "family", lang_path) or None,
        )

    # local parameter id -> concept id, or None for unlinked parameters
    parameters: dict[str, str | None] = {}
    concepts: dict[str, Concept] = {}
    par_spec = descriptor.parameter_table
    par_path = base / par_spec.file
    for line, row in _read_rows(par_path):
        local = _cell(row, par_spec, "id", par_path)
        if local in parameters:
            raise DuplicateId(par_spec.file, line, local)
        if par_spec.column("gloss") is not None:
            concept_id = _cell(row, par_spec, "gloss", par_path)
        else:
            concept_id = local
        if not concept_id:
            parameters[local] = None
            continue
        parameters[local] = concept_id
        if concept_id not in concepts:
            cid = _cell(row, par_spec, "concepticon_id", par_path) or None
            concepts[concept_id] = Concept(concept_id, cid)

    forms = []
    seen_ids: set[str] = set()
    form_spec = descriptor.form_table
    form_path = base / form_spec.file
    unlinked = 0
    for line, row in _read_rows(form_path):
        local = _cell(row, form_spec, "id", form_path)
        if local in seen_ids:
            raise DuplicateId(form_spec.file, line, local)
        seen_ids.add(local)
        variety_local = _cell(row, form_spec, "variety", form_path)
        vid = f"{ds}/{variety_local}"
        if vid not in varieties:
            raise DanglingReference(form_spec.file, line, form_spec.columns["variety"], variety_local)
        param = _cell(row, form_spec, "concept", form_path)
        if param not in parameters:
            raise DanglingReference(form_spec.file, line, form_spec.columns["concept"], param)
        concept_id = parameters[param]
        if concept_id is None:
            unlinked += 1
            continue
        segments = split_segments(_cell(row, form_spec, "segments", form_path))
        if not segments:
            logger.warning("%s: %s line %d has no segments, dropped", ds, form_spec.file, line)
            continue
        forms.append(
            WordForm(
                id=f"{ds}/{local}",
                variety_id=vid,
                concept_id=concept_id,
                segments=segments,
                value=_cell(row, form_spec, "value", form_path) or " ".join(segments),
            )
        )
    if unlinked:
        logger.info("%s: skipped %d forms of unlinked parameters", ds, unlinked)

    return Corpus(varieties, concepts, dedup_forms(forms), (ds,))


def find_metadata(directory: Path) -> Path | None:
    candidates = sorted(directory.glob("*metadata.json"))
    return candidates[0] if candidates else None


def discover_datasets(directory: str | Path) -> list[DatasetDescriptor]:
    """Descriptors for every dataset directory below ``directory``, sorted by path.

    ``directory`` may itself be a dataset.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingFile(f"dataset directory not found: {directory}")
    own = find_metadata(directory)
    if own is not None:
        return [DatasetDescriptor.from_metadata(own)]
    found = []
    for sub in sorted(p for p in directory.iterdir() if p.is_dir()):
        meta = find_metadata(sub)
        if meta is not None:
            found.append(DatasetDescriptor.from_metadata(meta))
    return found


def merge_corpora(parts: Iterable[Corpus]) -> Corpus:
    varieties: dict[str, Variety] = {}
    concepts: dict[str, Concept] = {}
    forms: list[WordForm] = []
    provenance: list[str] = []
    for part in parts:
        varieties.update(part.varieties)
        for cid, concept in part.concepts.items():
            known = concepts.get(cid)
            if known is None or (known.concepticon_id is None and concept.concepticon_id):
                concepts[cid] = concept
        forms.extend(part.forms)
        provenance.extend(p for p in part.provenance if p not in provenance)
    return Corpus(varieties, concepts, dedup_forms(forms), tuple(provenance))


def load_datasets(directory: str | Path, threads: int = 1) -> Corpus:
    """Discover, load and merge all datasets below ``directory``."""
    descriptors = discover_datasets(directory)
    if not descriptors:
        raise MissingFile(f"no dataset metadata found under {directory}")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        parts = list(pool.map(load_dataset, descriptors))
    return merge_corpora(parts)


@dataclass(frozen=True)
class Issue:
    kind: str
    detail: str


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __len__(self) -> int:
        return len(self.issues)

    def of_kind(self, kind: str) -> list[Issue]:
        return [i for i in self.issues if i.kind == kind]


def validate_corpus(corpus: Corpus) -> ValidationReport:
    report = ValidationReport()
    seen_ids: set[str] = set()
    used_varieties: set[str] = set()
    for form in corpus.forms:
        if form.id in seen_ids:
            report.issues.append(Issue("DuplicateId", f"form {form.id}"))
        seen_ids.add(form.id)
        if form.variety_id not in corpus.varieties:
            report.issues.append(
                Issue("DanglingReference", f"form {form.id}: variety {form.variety_id}")
            )
        if form.concept_id not in corpus.concepts:
            report.issues.append(
                Issue("DanglingReference", f"form {form.id}: concept {form.concept_id}")
            )
        if not form.segments:
            report.issues.append(Issue("EmptySegments", f"form {form.id}"))
        used_varieties.add(form.variety_id)
    for vid in sorted(set(corpus.varieties) - used_varieties):
        report.issues.append(Issue("EmptyVariety", vid))
    return report


# cache bundle ------------------------------------------------------------

CORPUS_METADATA = "corpus-metadata.json"
_VARIETY_HEADER = ["ID", "Name", "Dataset_ID", "Glottocode", "Family"]
_CONCEPT_HEADER = ["ID", "Concepticon_ID"]
_FORM_HEADER = ["ID", "Variety_ID", "Concept_ID", "Value", "Segments", "Derived_From"]


def _write_csv(path: Path, header: list[str], rows: Iterable[list[str]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def save_corpus(corpus: Corpus, directory: str | Path) -> Path:
    """Write the corpus as a CSV bundle that :func:`read_corpus` restores exactly.

    Unlike a CLDF dataset the bundle keeps namespaced ids and derivation marks.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {
        "format": "colexforge-corpus",
        "version": 1,
        "provenance": list(corpus.provenance),
        "tables": {"varieties": "varieties.csv", "concepts": "concepts.csv", "forms": "forms.csv"},
    }
    (directory / CORPUS_METADATA).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    _write_csv(
        directory / "varieties.csv",
        _VARIETY_HEADER,
        (
            [v.id, v.name, v.dataset_id, v.glottocode or "", v.family or ""]
            for v in sorted(corpus.varieties.values(), key=lambda v: v.id)
        ),
    )
    _write_csv(
        directory / "concepts.csv",
        _CONCEPT_HEADER,
        ([c.id, c.concepticon_id or ""] for c in sorted(corpus.concepts.values(), key=lambda c: c.id)),
    )
    _write_csv(
        directory / "forms.csv",
        _FORM_HEADER,
        (
            [f.id, f.variety_id, f.concept_id, f.value, " ".join(f.segments), f.derived_from or ""]
            for f in corpus.forms
        ),
    )
    return directory


def read_corpus(directory: str | Path) -> Corpus:
    directory = Path(directory)
    meta_path = directory / CORPUS_METADATA
    if not meta_path.is_file():
        raise MissingFile(f"not a corpus bundle: {directory}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta.get("format") != "colexforge-corpus":
        raise MalformedMetadata(f"{meta_path}: unexpected format {meta.get('format')!r}")
    varieties = {}
    for _, row in _read_rows(directory / "varieties.csv"):
        varieties[row["ID"]] = Variety(
            id=row["ID"],
            name=row["Name"],
            dataset_id=row["Dataset_ID"],
            glottocode=row["Glottocode"] or None,
            family=row["Family"] or None,
        )
    concepts = {
        row["ID"]: Concept(row["ID"], row["Concepticon_ID"] or None)
        for _, row in _read_rows(directory / "concepts.csv")
    }
    forms = tuple(
        WordForm(
            id=row["ID"],
            variety_id=row["Variety_ID"],
            concept_id=row["Concept_ID"],
            segments=split_segments(row["Segments"]),
            value=row["Value"],
            derived_from=row["Derived_From"] or None,
        )
        for _, row in _read_rows(directory / "forms.csv")
    )
    return Corpus(varieties, concepts, forms, tuple(meta.get("provenance", ())))


def write_dataset(corpus: Corpus, directory: str | Path, dataset_id: str) -> DatasetDescriptor:
    """Write a single-dataset corpus back out in the input format.

    Namespaced ids are stripped of their ``<dataset_id>/`` prefix, so loading
    the result reproduces the corpus.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    prefix = f"{dataset_id}/"

    def local(value: str) -> str:
        return value[len(prefix):] if value.startswith(prefix) else value

    meta = {
        "id": dataset_id,
        "tables": {
            "forms": {
                "file": "forms.csv",
                "columns": {"id": "ID", "variety": "Language_ID", "concept": "Parameter_ID",
                            "value": "Form", "segments": "Segments"},
            },
            "languages": {
                "file": "languages.csv",
                "columns": {"id": "ID", "name": "Name", "glottocode": "Glottocode", "family": "Family"},
            },
            "parameters": {
                "file": "parameters.csv",
                "columns": {"id": "ID", "gloss": "Concepticon_Gloss", "concepticon_id": "Concepticon_ID"},
            },
        },
    }
    (directory / "cldf-metadata.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    _write_csv(
        directory / "languages.csv",
        ["ID", "Name", "Glottocode", "Family"],
        (
            [local(v.id), v.name, v.glottocode or "", v.family or ""]
            for v in sorted(corpus.varieties.values(), key=lambda v: v.id)
        ),
    )
    _write_csv(
        directory / "parameters.csv",
        ["ID", "Concepticon_Gloss", "Concepticon_ID"],
        ([c.id, c.id, c.concepticon_id or ""] for c in sorted(corpus.concepts.values(), key=lambda c: c.id)),
    )
    _write_csv(
        directory / "forms.csv",
        ["ID", "Language_ID", "Parameter_ID", "Form", "Segments"],
        ([local(f.id), local(f.variety_id), f.concept_id, f.value, " ".join(f.segments)] for f in corpus.forms),
    )
    return DatasetDescriptor.from_metadata(directory / "cldf-metadata.json")
