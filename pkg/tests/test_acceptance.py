"""Acceptance suite: nine criteria, each a group of marked tests.

A summary with one PASS/FAIL line per criterion is printed at the end of the
pytest run (see ``conftest.py``).
"""

import csv
import json
import random
import time

import pytest

from colexforge.colexify import build_store, extract_variety
from colexforge.community import WeightedGraph, detect_communities, map_equation
from colexforge.expand import count_derived, expand_corpus, load_replacement_table
from colexforge.export import (
    ABSENT,
    MISSING,
    PRESENT,
    compute_stats,
    diff_networks,
    read_gml,
    write_gml,
)
from colexforge.ingest import WordForm, load_datasets, read_corpus
from colexforge.network import DEFAULT_MIN_FAMILIES, ColexEdge, build_network, from_edges
from colexforge.pipeline import default_replacement_table, run_all
from colexforge.selection import SelectionConfig, apply_selection
from colexforge.errors import EmptySelection

from conftest import GOLDEN, toy_config
from helpers import make_corpus, random_corpus
from oracles import brute_force_pairs, exhaustive_optimum, map_equation_oracle, random_weighted_graph

criterion = pytest.mark.criterion


def rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


# 1 -------------------------------------------------------------------------

@criterion(1, "colexification hash table equals pairwise oracle")
def test_c1_thousand_random_varieties():
    rng = random.Random(1)
    start = time.perf_counter()
    collisions = 0
    for v in range(1000):
        n = rng.randint(0, 50)
        # 3 letters, length 1-2: 12 distinct keys for up to 50 forms
        forms = [
            WordForm(f"{v}-{i}", f"v{v}", f"C{rng.randrange(30):02d}",
                     tuple(rng.choice("ab+c") for _ in range(rng.randint(1, 2))))
            for i in range(n)
        ]
        got = {p for e in extract_variety(forms) for p in e.pairs()}
        expected = brute_force_pairs(forms)
        assert got == expected
        collisions += len(expected)
    elapsed = time.perf_counter() - start
    assert collisions > 10_000
    assert elapsed < 10.0


# 2 -------------------------------------------------------------------------

@criterion(2, "expansion of underspecified concepts")
def test_c2_arm_or_hand_on_toy(toy_dir):
    corpus = load_datasets(toy_dir)
    (source,) = [f for f in corpus.forms if f.concept_id == "ARM OR HAND"]
    assert source.variety_id == "ds2/v4"
    expanded, _ = expand_corpus(corpus, load_replacement_table(default_replacement_table()))
    derived = [f for f in expanded.forms if f.derived_from == "ARM OR HAND"]
    assert sorted(f.concept_id for f in derived) == ["ARM", "HAND"]
    assert all(f.segments == source.segments for f in derived)
    # hand count: ARM OR HAND (v4), FOOT OR LEG (v5), BLUE OR GREEN (v6), two copies each
    assert count_derived(expanded) == 6


@criterion(2, "expansion of underspecified concepts")
def test_c2_derived_forms_reach_the_network(toy_run):
    out, _ = toy_run
    edge_rows = rows(out / "edges.csv")
    # without v4's derived pair ARM-HAND would rest on Alphic v1, Betic v2, Gammic v6 only,
    # still 3 families but 3 varieties; with it there are 4
    assert ["ARM", "HAND", "3", "4", "4"] in edge_rows
    selected = read_corpus(out / "selected")
    events = [e for e in build_store(selected).events if e.variety_id == "ds2/v4" and e.concepts == ("ARM", "HAND")]
    assert len(events) == 1 and events[0].derived_flags == {"ARM": True, "HAND": True}


# 3 -------------------------------------------------------------------------

def covering(sizes):
    rows_ = [(vid, f"K{i:03d}", f"{vid} {i}") for vid, size in sizes.items() for i in range(size)]
    rows_ += [("filler", f"K{i:03d}", f"f {i}") for i in range(200)]
    return make_corpus(rows_)


@criterion(3, "selection boundary and monotonicity")
def test_c3_exactly_180_survives_179_fails():
    out, report = apply_selection(covering({"at180": 180, "at179": 179}), SelectionConfig(1800, 180))
    assert "at180" in out.varieties
    assert "at179" not in out.varieties
    assert ("at179", 179) in report.dropped_varieties


@criterion(3, "selection boundary and monotonicity")
def test_c3_threshold_monotone_on_random_corpora():
    rng = random.Random(3)
    for _ in range(100):
        corpus = random_corpus(rng, n_varieties=8, n_concepts=20, max_forms=30)
        previous = None
        for threshold in range(1, 21):
            try:
                survivors = set(apply_selection(corpus, SelectionConfig(20, threshold))[0].varieties)
            except EmptySelection:
                survivors = set()
            assert previous is None or survivors <= previous
            previous = survivors


# 4 -------------------------------------------------------------------------

def families_corpus(n_families):
    rows_, families = [], {}
    for f in range(n_families):
        for k in range(3):
            vid = f"F{f}v{k}"
            families[vid] = f"F{f}"
            rows_ += [(vid, "ARM", "t a y"), (vid, "HAND", "t a y")]
    return make_corpus(rows_, families=families)


@criterion(4, "family threshold for edges")
def test_c4_two_families_absent_three_present():
    assert DEFAULT_MIN_FAMILIES == 3
    assert build_network(build_store(families_corpus(2))).edges == {}
    assert set(build_network(build_store(families_corpus(3))).edges) == {("ARM", "HAND")}


@criterion(4, "family threshold for edges")
def test_c4_threshold_monotone_on_random_stores():
    rng = random.Random(4)
    for _ in range(100):
        store = build_store(random_corpus(rng, n_varieties=10, n_families=5, alphabet="ab", max_len=2))
        previous = None
        for t in range(1, 7):
            edges = set(build_network(store, t).edges)
            assert previous is None or edges <= previous
            previous = edges


# 5 -------------------------------------------------------------------------

def g(edges, nodes=()):
    return WeightedGraph.from_edges(edges, nodes)


def barbell():
    left, right = ["a0", "a1", "a2"], ["b0", "b1", "b2"]
    edges = [(x, y, 1.0) for side in (left, right) for i, x in enumerate(side) for y in side[i + 1:]]
    return edges + [("a0", "b0", 1.0)], left, right


FIXED_GRAPHS = [
    barbell()[0],
    [("a", "b", 1.0)],
    [("a", "b", 1), ("b", "c", 1), ("c", "d", 1), ("d", "e", 1), ("e", "f", 1), ("f", "g", 1), ("g", "h", 1)],
    [("hub", x, 1) for x in "pqrstuv"],
    [(x, y, 1) for i, x in enumerate("abcdefgh") for y in "abcdefgh"[i + 1:]],
    [("a", "b", 5), ("b", "c", 5), ("a", "c", 5), ("c", "d", 1), ("d", "e", 3), ("e", "f", 3), ("d", "f", 3),
     ("f", "g", 0.5), ("g", "h", 4)],
]


@criterion(5, "map equation and optimizer")
def test_c5_oracle_agreement():
    rng = random.Random(5)
    checked = 0
    while checked < 100:
        nodes, edges = random_weighted_graph(rng, 10)
        if not edges:
            continue
        assignment = {n: rng.randrange(1 + rng.randrange(5)) for n in nodes}
        ours = map_equation(g(edges, nodes), assignment).total_bits
        assert abs(ours - map_equation_oracle(nodes, edges, assignment)[0]) < 1e-9
        checked += 1


@criterion(5, "map equation and optimizer")
def test_c5_exhaustive_optimum():
    rng = random.Random(55)
    graphs = list(FIXED_GRAPHS)
    while len(graphs) < len(FIXED_GRAPHS) + 60:
        nodes, edges = random_weighted_graph(rng, 8, integer=len(graphs) % 2 == 0)
        if edges:
            graphs.append(edges)
    for edges in graphs:
        best, _ = exhaustive_optimum((), edges)
        _, found = detect_communities(g(edges), seed=42)
        assert found.total_bits <= best + 1e-9


@criterion(5, "map equation and optimizer")
def test_c5_barbell_two_cliques():
    edges, left, right = barbell()
    partition, _ = detect_communities(g(edges), seed=42)
    assert partition.groups() == [left, right]


@criterion(5, "map equation and optimizer")
def test_c5_monotone_trace():
    rng = random.Random(50)
    for _ in range(50):
        nodes, edges = random_weighted_graph(rng, 30)
        if not edges:
            continue
        trace = []
        detect_communities(g(edges, nodes), seed=1, trace=trace)
        for trial in trace:
            assert all(b <= a + 1e-12 for a, b in zip(trial, trial[1:]))


# 6 -------------------------------------------------------------------------

@criterion(6, "structural dataset trichotomy")
def test_c6_toy_structural(toy_run):
    out, _ = toy_run
    corpus = read_corpus(out / "selected")
    network = read_gml(out / "network.gml")
    values = rows(out / "structural" / "values.csv")[1:]
    params = {r[0]: (r[2], r[3]) for r in rows(out / "structural" / "parameters.csv")[1:]}
    assert len(values) == len(corpus.varieties) * len(network.edges)
    cells = {(r[1], r[2]): r[3] for r in values}
    assert len(cells) == len(values)
    assert set(cells.values()) <= {PRESENT, ABSENT, MISSING}

    attested = {v: {f.concept_id for f in corpus.forms if f.variety_id == v} for v in corpus.varieties}
    for pid, (a, b) in params.items():
        present = {v for (v, p), code in cells.items() if p == pid and code == PRESENT}
        assert present == set(network.edge(a, b).varieties)
        missing = {v for (v, p), code in cells.items() if p == pid and code == MISSING}
        assert missing == {v for v in corpus.varieties if not {a, b} <= attested[v]}

    # hand-derived grid, rows in parameter order ARM/HAND, BLUE/GREEN, FOOT/LEG, TREE/WOOD
    expected = {
        "ds1/v1": "P-P-",
        "ds1/v2": "P-A-",
        "ds2/v3": "-APP",
        "ds2/v4": "PPAP",
        "ds3/v5": "APPP",
        "ds3/v6": "PP-A",
    }
    code = {PRESENT: "P", ABSENT: "A", MISSING: "-"}
    for vid, grid in expected.items():
        assert "".join(code[cells[(vid, str(i))]] for i in range(1, 5)) == grid


# 7 -------------------------------------------------------------------------

@criterion(7, "export round trips and determinism")
def test_c7_gml_round_trip(toy_run, tmp_path):
    out, _ = toy_run
    network = read_gml(out / "network.gml")
    assert len(network.edges) == 4 and network.communities
    write_gml(network, tmp_path / "again.gml")
    assert (tmp_path / "again.gml").read_bytes() == (out / "network.gml").read_bytes()
    assert read_gml(tmp_path / "again.gml") == network


@criterion(7, "export round trips and determinism")
def test_c7_byte_identical_across_runs_and_threads(toy_run, tmp_path):
    out, _ = toy_run
    run_all(toy_config(tmp_path / "a"))
    run_all(toy_config(tmp_path / "b", threads=4))
    files = [p.relative_to(out) for p in sorted(out.rglob("*")) if p.is_file() and p.name != "manifest.json"]
    assert len(files) > 10
    for rel in files:
        assert (tmp_path / "a" / rel).read_bytes() == (out / rel).read_bytes(), rel
        assert (tmp_path / "b" / rel).read_bytes() == (out / rel).read_bytes(), rel


# 8 -------------------------------------------------------------------------

def e(a, b, families, varieties=None, words=None):
    fams = frozenset(families)
    vs = frozenset(varieties or [f"v{x}" for x in families])
    return ColexEdge(a, b, vs, fams, words or len(vs))


@criterion(8, "statistics and diff")
def test_c8_toy_statistics(toy_run):
    out, _ = toy_run

    stats = json.loads((out / "stats.json").read_text())
    # recomputed by hand from data/toy after expansion and selection:
    # 44 forms minus STAR (v3) and SNOW (v6); glottocodes alph, bett, gimm, dell;
    # language counts per concept 4,4,3,3,4,3,3,3,2,2; family counts 3 x 8 + 2 x 2
    assert stats == {
        "datasets": 3, "varieties": 6, "languages": 4, "families": 3,
        "words": 42, "transcriptions": 42, "words_per_variety": 7.0,
        "concepts": 10, "colexified_concepts": 8,
        "languages_per_concept": 3.1, "families_per_concept": 2.8,
        "colexifications": 4, "avg_degree": 1.0, "avg_weighted_degree": 3.0,
        "communities": 4, "concepts_per_community": 2.0,
    }


@criterion(8, "statistics and diff")
def test_c8_hand_built_pair():
    a = from_edges([
        e("ARM", "HAND", "ABC"), e("BARK", "SKIN", "ABCD"), e("FOOT", "LEG", "ABC"),
        e("TREE", "WOOD", "ABCDE"), e("BLUE", "GREEN", "AB"),
    ])
    b = from_edges([
        e("ARM", "HAND", "ABCD"), e("BARK", "SKIN", "ABC"), e("TREE", "WOOD", "ABCDEF"),
        e("MONTH", "MOON", "ABC"),
    ])
    report = diff_networks(a, b)
    # shared: ARM-HAND (b), BARK-SKIN (a), TREE-WOOD (b)
    assert report.as_dict() == {
        "shared_edges": 3, "unique_to_a": 2, "unique_to_b": 1,
        "a_dominant_shared": 1, "b_dominant_shared": 2,
    }

    corpus = make_corpus(
        [("v1", "ARM", "x"), ("v1", "HAND", "x"), ("v2", "ARM", "y"), ("v3", "EYE", "z")],
        families={"v1": "A", "v2": "A", "v3": "B"},
        glottocodes={"v1": "aaaa1111", "v2": "aaaa1111", "v3": "bbbb2222"},
    )
    partition, _ = detect_communities(a)
    stats = compute_stats(corpus, a, partition)
    # spreadsheet: 10 concepts in edges of a, 5 edges, weight sum 3+4+3+5+2 = 17
    assert stats.colexified_concepts == 10
    assert stats.colexifications == 5
    assert stats.avg_degree == 1.0
    assert stats.avg_weighted_degree == pytest.approx(34 / 10)
    assert stats.communities == 5 and stats.concepts_per_community == 2.0
    # corpus side: ARM by v1 v2 (1 language, 1 family), HAND by v1, EYE by v3
    assert (stats.varieties, stats.languages, stats.families, stats.words) == (3, 2, 2, 4)
    assert stats.words_per_variety == pytest.approx(4 / 3)
    assert stats.languages_per_concept == 1.0
    assert stats.families_per_concept == 1.0


@criterion(8, "statistics and diff")
def test_c8_diff_identities_random_pairs():
    rng = random.Random(8)
    for _ in range(100):
        a = build_network(build_store(random_corpus(rng, alphabet="ab", max_len=1)), rng.randint(1, 3))
        b = build_network(build_store(random_corpus(rng, alphabet="ab", max_len=1)), rng.randint(1, 3))
        r = diff_networks(a, b)
        assert r.shared_edges + r.unique_to_a == len(a.edges)
        assert r.shared_edges + r.unique_to_b == len(b.edges)
        assert r.a_dominant_shared + r.b_dominant_shared <= r.shared_edges


# 9 -------------------------------------------------------------------------

@criterion(9, "end-to-end toy run against golden files")
def test_c9_toy_run_all(tmp_path):
    start = time.perf_counter()
    manifest = run_all(toy_config(tmp_path))
    assert time.perf_counter() - start < 5.0
    ingest = manifest["stages"][0]["counts"]
    assert (ingest["datasets"], ingest["varieties"]) == (3, 6)
    # edge list: ARM-HAND, BLUE-GREEN, FOOT-LEG and TREE-WOOD reach 3 families;
    # BARK-SKIN only Betic (v5 via "r i n + d e") and Gammic (v6)
    assert rows(tmp_path / "edges.csv") == rows(GOLDEN / "toy_edges.csv")
    # each edge is its own component, so each pair is one community; BARK and SKIN stay singletons
    assert rows(tmp_path / "partition.csv") == rows(GOLDEN / "toy_partition.csv")
