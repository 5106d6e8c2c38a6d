"""Data products: GML, node/edge tables, structural dataset, statistics, diffs.

All CSV output is UTF-8 with a header row, ``\\n`` line endings and a fixed
row order, so repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
import html
import json
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable

from colexforge.colexify import ColexStore
from colexforge.community import Partition, community_stats
from colexforge.errors import GMLParseError, InconsistentInputs
from colexforge.ingest import Corpus
from colexforge.network import (
    ColexEdge,
    ColexNetwork,
    NodeInfo,
    average_degree,
    average_weighted_degree,
)

PRESENT, ABSENT, MISSING = "present", "absent", "missing"
LIST_SEP = ";"


def _write_csv(path: str | Path, header: list[str], rows: Iterable[list[Any]]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


# GML -----------------------------------------------------------------------

def _gml_string(text: str) -> str:
    out = []
    for ch in text:
        if ch == "&":
            out.append("&amp;")
        elif ch == '"':
            out.append("&quot;")
        elif ord(ch) > 126 or ord(ch) < 32:
            out.append(f"&#{ord(ch)};")
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def gml_text(network: ColexNetwork) -> str:
    """Serialize as GML 1.0.

    Nodes get dense integer ids in concept order and carry ``label`` (the
    concept), ``varieties``, ``families`` and, once assigned, ``community``.
    Edges carry ``weight`` (family count), ``words``, and the attesting
    ``families`` and ``varieties`` as ``;``-joined strings.
    """
    ids = {concept: i for i, concept in enumerate(sorted(network.nodes))}
    lines = ["graph [", "  directed 0", f"  threshold {network.threshold}"]
    for concept, i in ids.items():
        info = network.nodes[concept]
        lines += [
            "  node [",
            f"    id {i}",
            f"    label {_gml_string(concept)}",
            f"    varieties {info.varieties}",
            f"    families {info.families}",
        ]
        if network.communities is not None and concept in network.communities:
            lines.append(f"    community {network.communities[concept]}")
        lines.append("  ]")
    for edge in network.sorted_edges():
        lines += [
            "  edge [",
            f"    source {ids[edge.concept_a]}",
            f"    target {ids[edge.concept_b]}",
            f"    weight {edge.weight}",
            f"    families {_gml_string(LIST_SEP.join(sorted(edge.families)))}",
            f"    varieties {_gml_string(LIST_SEP.join(sorted(edge.varieties)))}",
            f"    words {edge.word_count}",
            "  ]",
        ]
    lines.append("]")
    return "\n".join(lines) + "\n"


def write_gml(network: ColexNetwork, path: str | Path) -> None:
    Path(path).write_text(gml_text(network), encoding="ascii")


_TOKEN = re.compile(r'\s*(?:(\[)|(\])|("[^"]*")|([A-Za-z_][A-Za-z0-9_]*)|([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?))')


def _tokens(text: str):
    text = "\n".join(line for line in text.splitlines() if not line.lstrip().startswith("#"))
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            return
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise GMLParseError(f"unexpected character at offset {pos}: {text[pos:pos + 20]!r}")
        pos = m.end()
        open_, close, string, key, number = m.groups()
        if open_:
            yield ("[", None)
        elif close:
            yield ("]", None)
        elif string is not None:
            yield ("str", html.unescape(string[1:-1]))
        elif key:
            yield ("key", key)
        else:
            value = float(number) if any(c in number for c in ".eE") else int(number)
            yield ("num", value)


def parse_gml(text: str) -> list[tuple[str, Any]]:
    """Parse GML into nested lists of ``(key, value)`` pairs."""
    stack: list[list[tuple[str, Any]]] = [[]]
    key = None
    for kind, value in _tokens(text):
        if key is None:
            if kind == "]":
                if len(stack) == 1:
                    raise GMLParseError("unbalanced ']'")
                done = stack.pop()
                stack[-1][-1] = (stack[-1][-1][0], done)
                continue
            if kind != "key":
                raise GMLParseError(f"expected a key, got {value!r}")
            key = value
            continue
        if kind == "[":
            stack[-1].append((key, None))
            stack.append([])
        elif kind in ("str", "num"):
            stack[-1].append((key, value))
        else:
            raise GMLParseError(f"key {key!r} has no value")
        key = None
    if len(stack) != 1 or key is not None:
        raise GMLParseError("unexpected end of input")
    return stack[0]


def _split(text: str) -> frozenset[str]:
    return frozenset(p for p in text.split(LIST_SEP) if p)


def read_gml(path: str | Path) -> ColexNetwork:
    """Read a network written by :func:`write_gml`."""
    top = parse_gml(Path(path).read_text(encoding="ascii"))
    graphs = [v for k, v in top if k == "graph"]
    if len(graphs) != 1:
        raise GMLParseError("expected exactly one graph block")
    graph = graphs[0]
    labels: dict[int, str] = {}
    nodes: dict[str, NodeInfo] = {}
    communities: dict[str, int] = {}
    threshold = 1
    edges = {}
    for key, value in graph:
        if key == "threshold":
            threshold = int(value)
        elif key == "node":
            attrs = dict(value)
            label = str(attrs.get("label", attrs["id"]))
            labels[attrs["id"]] = label
            nodes[label] = NodeInfo(int(attrs.get("varieties", 0)), int(attrs.get("families", 0)))
            if "community" in attrs:
                communities[label] = int(attrs["community"])
    for key, value in graph:
        if key != "edge":
            continue
        attrs = dict(value)
        try:
            a, b = sorted((labels[attrs["source"]], labels[attrs["target"]]))
        except KeyError as exc:
            raise GMLParseError(f"edge refers to unknown node {exc}") from exc
        families = _split(attrs.get("families", ""))
        if len(families) != attrs.get("weight", len(families)):
            raise GMLParseError(f"edge {a}-{b}: weight does not match family list")
        edges[(a, b)] = ColexEdge(a, b, _split(attrs.get("varieties", "")), families,
                                  int(attrs.get("words", 0)))
    return ColexNetwork(nodes, edges, threshold, communities or None)


# node / edge tables --------------------------------------------------------

NODE_HEADER = ["concept", "varieties", "families", "community"]
EDGE_HEADER = ["concept_a", "concept_b", "family_weight", "variety_count", "word_count"]


def write_tables(network: ColexNetwork, path_nodes: str | Path, path_edges: str | Path) -> None:
    comms = network.communities or {}
    _write_csv(
        path_nodes,
        NODE_HEADER,
        (
            [c, info.varieties, info.families, comms.get(c, "")]
            for c, info in sorted(network.nodes.items())
        ),
    )
    _write_csv(
        path_edges,
        EDGE_HEADER,
        (
            [e.concept_a, e.concept_b, e.weight, len(e.varieties), e.word_count]
            for e in network.sorted_edges()
        ),
    )


def write_partition(partition: Partition, path: str | Path) -> None:
    _write_csv(path, ["concept", "community"], sorted(partition.assignment.items()))


def read_partition(path: str | Path) -> Partition:
    with Path(path).open(encoding="utf-8", newline="") as handle:
        rows = {row["concept"]: int(row["community"]) for row in csv.DictReader(handle)}
    return Partition(rows, len(set(rows.values())))


# structural dataset --------------------------------------------------------

@dataclass
class StructuralDataset:
    parameters: list[tuple[str, ColexEdge]] = field(default_factory=list)
    values: dict[tuple[str, str], str] = field(default_factory=dict)
    varieties: list[str] = field(default_factory=list)

    def column(self, parameter_id: str) -> dict[str, str]:
        return {v: self.values[(v, parameter_id)] for v in self.varieties}


def build_structural(corpus: Corpus, store: ColexStore, network: ColexNetwork) -> StructuralDataset:
    """One parameter per network edge, one value per (variety, parameter).

    A variety is *missing* for a parameter when it has no form for one of the
    two concepts, *present* when it shows the colexification, and *absent*
    otherwise.
    """
    attested: dict[str, set[str]] = {vid: set() for vid in corpus.varieties}
    for form in corpus.forms:
        attested[form.variety_id].add(form.concept_id)

    varieties = sorted(corpus.varieties)
    data = StructuralDataset(varieties=varieties)
    for i, edge in enumerate(network.sorted_edges(), start=1):
        record = store.index.get(edge.key)
        if record is None or set(record.varieties) != set(edge.varieties):
            raise InconsistentInputs(f"edge {edge.key} does not match the colexification store")
        pid = str(i)
        data.parameters.append((pid, edge))
        for vid in varieties:
            if edge.concept_a not in attested[vid] or edge.concept_b not in attested[vid]:
                code = MISSING
            elif vid in record.varieties:
                code = PRESENT
            else:
                code = ABSENT
            data.values[(vid, pid)] = code
    return data


def write_structural(data: StructuralDataset, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _write_csv(
        directory / "parameters.csv",
        ["ID", "Name", "Concept_A", "Concept_B", "Families", "Varieties", "Words"],
        (
            [pid, f"{e.concept_a} / {e.concept_b}", e.concept_a, e.concept_b,
             e.weight, len(e.varieties), e.word_count]
            for pid, e in data.parameters
        ),
    )
    rows = []
    n = 0
    for pid, _ in data.parameters:
        for vid in data.varieties:
            n += 1
            rows.append([str(n), vid, pid, data.values[(vid, pid)]])
    _write_csv(directory / "values.csv", ["ID", "Language_ID", "Parameter_ID", "Value"], rows)
    meta = {
        "format": "colexforge-structural",
        "codes": [PRESENT, ABSENT, MISSING],
        "tables": {"parameters": "parameters.csv", "values": "values.csv"},
    }
    (directory / "structure-metadata.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return directory


# statistics ----------------------------------------------------------------

@dataclass
class NetworkStats:
    datasets: int
    varieties: int
    languages: int
    families: int
    words: int
    transcriptions: int
    words_per_variety: float
    concepts: int
    colexified_concepts: int
    languages_per_concept: float
    families_per_concept: float
    colexifications: int
    avg_degree: float
    avg_weighted_degree: float
    communities: int
    concepts_per_community: float

    def as_dict(self) -> dict[str, float | int]:
        return asdict(self)

    def table_rows(self) -> list[tuple[str, str]]:
        """Rows as in a printed summary table: averages rounded, community size to one decimal."""
        r = round
        return [
            ("Datasets", str(self.datasets)),
            ("Varieties", str(self.varieties)),
            ("Languages", str(self.languages)),
            ("Families", str(self.families)),
            ("Words", str(self.words)),
            ("Transcriptions", str(self.transcriptions)),
            ("Words per Variety", str(r(self.words_per_variety))),
            ("Concepts", str(self.concepts)),
            ("Colexified Concepts", str(self.colexified_concepts)),
            ("Languages per Concept", str(r(self.languages_per_concept))),
            ("Families per Concept", str(r(self.families_per_concept))),
            ("Colexifications", str(self.colexifications)),
            ("Average Degree", str(r(self.avg_degree))),
            ("Average Weighted Degree", str(r(self.avg_weighted_degree))),
            ("Communities", str(self.communities)),
            ("Concepts per Community", f"{self.concepts_per_community:.1f}"),
        ]


def compute_stats(corpus: Corpus, network: ColexNetwork, partition: Partition | None) -> NetworkStats:
    varieties = corpus.varieties
    attesting = corpus.concept_varieties()
    per_concept_langs = []
    per_concept_fams = []
    for cid in corpus.concepts:
        vids = attesting.get(cid, set())
        per_concept_langs.append(len({varieties[v].glottocode for v in vids if varieties[v].glottocode}))
        per_concept_fams.append(len({varieties[v].family_key for v in vids}))
    n_concepts = len(corpus.concepts)
    if partition is not None:
        n_comms, per_comm = community_stats(partition, network)
    else:
        n_comms, per_comm = 0, 0.0
    words = len(corpus.forms)
    return NetworkStats(
        datasets=len(corpus.provenance),
        varieties=len(varieties),
        languages=len({v.glottocode for v in varieties.values() if v.glottocode}),
        families=len({v.family_key for v in varieties.values()}),
        words=words,
        transcriptions=sum(1 for f in corpus.forms if f.segments),
        words_per_variety=words / len(varieties) if varieties else 0.0,
        concepts=n_concepts,
        colexified_concepts=len(network.colexified()),
        languages_per_concept=sum(per_concept_langs) / n_concepts if n_concepts else 0.0,
        families_per_concept=sum(per_concept_fams) / n_concepts if n_concepts else 0.0,
        colexifications=len(network.edges),
        avg_degree=average_degree(network),
        avg_weighted_degree=average_weighted_degree(network),
        communities=n_comms,
        concepts_per_community=per_comm,
    )


# diff ----------------------------------------------------------------------

@dataclass(frozen=True)
class DiffReport:
    shared_edges: int
    unique_to_a: int
    unique_to_b: int
    a_dominant_shared: int
    b_dominant_shared: int

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


def diff_networks(a: ColexNetwork, b: ColexNetwork) -> DiffReport:
    """Compare edge sets; dominance counts shared edges with more families on one side."""
    ka, kb = set(a.edges), set(b.edges)
    shared = ka & kb
    return DiffReport(
        shared_edges=len(shared),
        unique_to_a=len(ka - kb),
        unique_to_b=len(kb - ka),
        a_dominant_shared=sum(1 for k in shared if a.edges[k].weight > b.edges[k].weight),
        b_dominant_shared=sum(1 for k in shared if b.edges[k].weight > a.edges[k].weight),
    )
