from __future__ import annotations

import random

from hypothesis import strategies as st

from colexforge.ingest import Concept, Corpus, Variety, WordForm, dedup_forms


def make_corpus(rows, families=None, glottocodes=None, dataset="t", extra_concepts=()):
    """Corpus from ``(variety, concept, segments)`` rows.

    ``segments`` is a space-separated string; ``derived_from`` may follow as a
    fourth element.  Varieties get family ``families[v]`` (default: none).
    """
    families = families or {}
    glottocodes = glottocodes or {}
    varieties, concepts, forms = {}, {}, []
    for i, row in enumerate(rows):
        vid, cid, segs = row[:3]
        derived = row[3] if len(row) > 3 else None
        varieties.setdefault(vid, Variety(vid, vid, dataset, glottocodes.get(vid), families.get(vid)))
        concepts.setdefault(cid, Concept(cid))
        forms.append(WordForm(f"f{i}", vid, cid, tuple(segs.split()), segs, derived))
    for vid in families:
        varieties.setdefault(vid, Variety(vid, vid, dataset, glottocodes.get(vid), families[vid]))
    for cid in extra_concepts:
        concepts.setdefault(cid, Concept(cid))
    return Corpus(varieties, concepts, dedup_forms(forms), (dataset,))


def random_corpus(rng: random.Random, n_varieties=6, n_concepts=12, n_families=3,
                  max_forms=30, alphabet="ab", max_len=2, dataset="r") -> Corpus:
    rows = []
    families = {}
    concepts = [f"C{i:02d}" for i in range(n_concepts)]
    for v in range(n_varieties):
        vid = f"{dataset}/v{v}"
        families[vid] = f"F{rng.randrange(n_families)}"
        for _ in range(rng.randint(1, max_forms)):
            length = rng.randint(1, max_len)
            segs = " ".join(rng.choice(alphabet) for _ in range(length))
            rows.append((vid, rng.choice(concepts), segs))
    return make_corpus(rows, families=families, dataset=dataset)


segment = st.sampled_from(["a", "b", "c", "+"])
form_rows = st.lists(
    st.tuples(
        st.sampled_from(["v1", "v2", "v3", "v4"]),
        st.sampled_from(["A", "B", "C", "D", "E"]),
        st.lists(segment, min_size=1, max_size=3).map(" ".join),
    ),
    max_size=40,
)
