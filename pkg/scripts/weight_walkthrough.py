#!/usr/bin/env python3
"""Worked example of the weighting scheme on the bundled demo corpus.

Builds the demo index from scratch, prints the raw operands (CF, SegF, S_d,
DF, |D|) and the resulting weight for a handful of notable concept/segment
pairs, then runs the single-concept query {pointeur} and shows the ranking.
Useful as a sanity check after touching indexer.py or search.py — the
printed weights must match the pinned values in tests/test_acceptance.py.
"""

import math

from segsearch.annotations import SegmentRef, canonicalize_corpus
from segsearch.demo import build_demo_corpus, build_demo_ontology
from segsearch.indexer import build_index
from segsearch.inference import infer
from segsearch.search import format_results, make_query, search

PAIRS = [
    ("pointeur", SegmentRef("D6", "S2")),
    ("pointeur", SegmentRef("D8", "S9")),
    ("pointeur", SegmentRef("D8", "S14")),
    ("parametre_formel", SegmentRef("D4", "S2")),
]


def main() -> None:
    ontology = build_demo_ontology()
    facts = infer(ontology)
    corpus = canonicalize_corpus(build_demo_corpus(), {ontology.domain_id: facts})
    index = build_index(corpus)
    stats = index.stats

    print(f"corpus: {len(index.segments)} segments in {stats.num_documents} documents")
    print()
    header = f"{'concept':18s} {'segment':8s} {'CF':>3s} {'SegF':>4s} {'S_d':>4s} {'DF':>3s} {'|D|':>3s}  weight"
    print(header)
    print("-" * len(header))
    for concept, ref in PAIRS:
        cf = stats.cf[(concept, ref)]
        seg_f = stats.seg_f[(concept, ref.lesson_id)]
        s_d = stats.segments_per_document[ref.lesson_id]
        df = stats.df[concept]
        weight = index.weights[(concept, ref)]
        recomputed = cf * math.log(s_d / seg_f) * math.log(stats.num_documents / df)
        assert weight == recomputed
        print(
            f"{concept:18s} {ref.lesson_id}/{ref.segment_id:<5s}"
            f" {cf:3d} {seg_f:4d} {s_d:4d} {df:3d} {stats.num_documents:3d}"
            f"  {weight:.4f}"
        )

    print()
    query = make_query(ontology.domain_id, ["pointeur"], facts)
    results = search(query, index, corpus)
    print(f"query {{pointeur}} -> {len(results)} segments")
    print(format_results(results[:5]))


if __name__ == "__main__":
    main()
