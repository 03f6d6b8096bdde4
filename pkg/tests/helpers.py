"""Shared test utilities: independent oracles and random data generators.

The oracles deliberately re-derive everything from first principles with
naive algorithms (Floyd–Warshall, BFS, full corpus scans) so they share no
code path with the implementations they check.
"""

from __future__ import annotations

import math
import random

from segsearch.annotations import (
    AnnotatedCorpus,
    PedagogicalObject,
    PobKind,
    Segment,
    VideoCourse,
    VideoLesson,
    build_corpus,
)
from segsearch.ontology import DomainOntology, RelationEdge, RelationKind

# ------------------------------------------------------------------ oracles


def bfs_components(nodes: list[str], pairs: list[tuple[str, str]]) -> set[frozenset[str]]:
    """Connected components by breadth-first search."""
    neighbours: dict[str, set[str]] = {n: set() for n in nodes}
    for a, b in pairs:
        neighbours[a].add(b)
        neighbours[b].add(a)
    seen: set[str] = set()
    components: set[frozenset[str]] = set()
    for start in nodes:
        if start in seen:
            continue
        queue = [start]
        component = {start}
        seen.add(start)
        while queue:
            node = queue.pop(0)
            for other in neighbours[node]:
                if other not in component:
                    component.add(other)
                    seen.add(other)
                    queue.append(other)
        components.add(frozenset(component))
    return components


def floyd_warshall_closure(
    nodes: list[str], edges: set[tuple[str, str]]
) -> set[tuple[str, str]]:
    """Transitive closure by the O(n^3) boolean Floyd–Warshall recurrence."""
    index = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for a, b in edges:
        reach[index[a]][index[b]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_i, row_k = reach[i], reach[k]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return {
        (nodes[i], nodes[j])
        for i in range(n)
        for j in range(n)
        if reach[i][j]
    }


def oracle_canonical_view(ontology: DomainOntology):
    """Independent canonicalization: BFS classes, min-rep, mapped edge sets.

    Returns (rep_of, classes, depends_pairs, prerequisite_edges) where the
    prerequisite edges are canonical and self-pairs are dropped, mirroring
    the documented collapse rule.
    """
    nodes = sorted(ontology.concepts)
    same_pairs = [
        (e.source, e.target) for e in ontology.edges_of_kind(RelationKind.SAME_AS)
    ]
    classes = bfs_components(nodes, same_pairs)
    rep_of = {m: min(c) for c in classes for m in c}

    depends_pairs = set()
    for e in ontology.edges_of_kind(RelationKind.DEPENDS):
        a, b = rep_of[e.source], rep_of[e.target]
        if a != b:
            depends_pairs.add(tuple(sorted((a, b))))
    prereq_edges = set()
    for e in ontology.edges_of_kind(RelationKind.IS_PREREQUISITE):
        a, b = rep_of[e.source], rep_of[e.target]
        if a != b:
            prereq_edges.add((a, b))
    return rep_of, classes, depends_pairs, prereq_edges


def brute_force_rank(
    corpus: AnnotatedCorpus,
    domain_id: str,
    concepts: set[str],
    *,
    pob_filter: PobKind | None = None,
    max_results: int | None = None,
) -> list[tuple[str, str, float]]:
    """Naive re-scoring of a canonicalized corpus, no index involved.

    Returns [(lesson_id, segment_id, score), ...] in final ranking order.
    """
    documents = corpus.documents
    total_docs = len(documents)

    def doc_has(lesson: VideoLesson, concept: str) -> bool:
        return any(
            concept in pob.concerns for seg in lesson.segments for pob in seg.pobs
        )

    rows: list[tuple[str, str, float]] = []
    for course in corpus.courses:
        if course.domain_id != domain_id:
            continue
        for lesson in course.lessons:
            s_d = len(lesson.segments)
            for segment in lesson.segments:
                if pob_filter is not None and not any(
                    pob.kind is pob_filter for pob in segment.pobs
                ):
                    continue
                vector: dict[str, float] = {}
                for concept in sorted(
                    {c for pob in segment.pobs for c in pob.concerns}
                ):
                    cf = sum(1 for pob in segment.pobs if concept in pob.concerns)
                    seg_f = sum(
                        1
                        for other in lesson.segments
                        if any(concept in pob.concerns for pob in other.pobs)
                    )
                    df = sum(1 for doc in documents if doc_has(doc, concept))
                    weight = (
                        cf
                        * math.log(s_d / seg_f)
                        * math.log(total_docs / df)
                    )
                    if weight != 0.0:
                        vector[concept] = weight
                dot = 0.0
                for concept in sorted(concepts):
                    if concept in vector:
                        dot += vector[concept]
                if dot == 0.0:
                    continue
                norm_sq = 0.0
                for concept in sorted(vector):
                    norm_sq += vector[concept] ** 2
                score = dot / (math.sqrt(norm_sq) * math.sqrt(len(concepts)))
                if score != 0.0:
                    rows.append((lesson.lesson_id, segment.segment_id, score))
    rows.sort(key=lambda r: (-r[2], r[0], r[1]))
    if max_results is not None:
        rows = rows[:max_results]
    return rows


# --------------------------------------------------------------- generators


def random_ontology(rng: random.Random, max_concepts: int = 12) -> DomainOntology:
    """A valid random ontology; prerequisite cycles allowed, decomposition not."""
    n = rng.randint(1, max_concepts)
    ids = [f"c{i:02d}" for i in range(n)]
    edges: list[RelationEdge] = []
    seen: set[tuple[RelationKind, str, str]] = set()

    def add(kind: RelationKind, a: str, b: str) -> None:
        if a != b and (kind, a, b) not in seen:
            seen.add((kind, a, b))
            edges.append(RelationEdge(kind=kind, source=a, target=b))

    if n >= 2:
        for _ in range(rng.randint(0, n // 2)):
            add(RelationKind.SAME_AS, *rng.sample(ids, 2))
        for _ in range(rng.randint(0, n)):
            add(RelationKind.DEPENDS, *rng.sample(ids, 2))
        for _ in range(rng.randint(0, n)):
            add(RelationKind.IS_PREREQUISITE, *rng.sample(ids, 2))
        for _ in range(rng.randint(0, n)):
            i, j = sorted(rng.sample(range(n), 2))
            add(RelationKind.IS_DECOMPOSED_INTO, ids[i], ids[j])
    return DomainOntology(
        domain_id="rand",
        label="Random domain",
        concepts={cid: cid.upper() for cid in ids},
        edges=tuple(edges),
    )


def random_course(
    rng: random.Random,
    concepts: list[str],
    *,
    domain_id: str = "rand",
    max_docs: int = 5,
    max_segments: int = 6,
) -> VideoCourse:
    """A structurally valid random course over the given concept ids."""
    kinds = list(PobKind)
    lessons = []
    for d in range(rng.randint(1, max_docs)):
        segments = []
        for s in range(rng.randint(0, max_segments)):
            pobs = []
            for p in range(rng.randint(1, 3)):
                n_concerns = rng.randint(1, min(3, len(concepts)))
                pobs.append(
                    PedagogicalObject(
                        pob_id=f"pob_{s}_{p}",
                        kind=rng.choice(kinds),
                        concerns=tuple(rng.sample(concepts, n_concerns)),
                        comment="note" if rng.random() < 0.2 else None,
                    )
                )
            segments.append(
                Segment(
                    segment_id=f"s{s}",
                    title=f"segment {s}",
                    begin=s * 100,
                    duration=rng.randint(40, 90),
                    pobs=tuple(pobs),
                )
            )
        lessons.append(
            VideoLesson(
                lesson_id=f"doc{d}",
                title=f"document {d}",
                url=f"http://example.test/doc{d}.mp4",
                language="fr",
                segments=tuple(segments),
            )
        )
    return VideoCourse(
        course_id="course-rand",
        title="Random course",
        domain_id=domain_id,
        lessons=tuple(lessons),
    )


def random_corpus(
    rng: random.Random, max_concepts: int = 15, **kwargs
) -> tuple[AnnotatedCorpus, list[str]]:
    """(corpus, concept ids) with no ontology attached — ids are their own reps."""
    concepts = [f"k{i:02d}" for i in range(rng.randint(1, max_concepts))]
    course = random_course(rng, concepts, **kwargs)
    return build_corpus([course]), concepts
