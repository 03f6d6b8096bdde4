"""Query construction and cosine-ranked retrieval of segments.

Queries are binary concept vectors over one domain; segments are ranked by
the cosine between their weight vector and the query.  Results with score 0
are dropped, ties are broken by (lesson_id, segment_id), and an optional POB
kind acts as a hard filter before scoring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import AbstractSet, Any, Iterable, Mapping, Sequence

from .annotations import (
    AnnotatedCorpus,
    PobKind,
    SegmentRef,
    format_time,
)
from .errors import DomainMismatchError, QueryError
from .indexer import ConceptSegmentIndex
from .inference import InferredFacts, related_concepts
from .ontology import DomainOntology, RelationKind


@dataclass(frozen=True)
class Query:
    """A canonicalized search request against one teaching domain."""

    domain_id: str
    concepts: frozenset[str]
    pob_filter: PobKind | None = None
    max_results: int | None = None
    expand: frozenset[RelationKind] = frozenset()


@dataclass(frozen=True)
class PobView:
    """Display form of one pedagogical object inside a result."""

    pob_id: str
    kind: PobKind
    concepts: tuple[str, ...]
    comment: str | None = None


@dataclass(frozen=True)
class RankedResult:
    """One scored segment, carrying everything the UI needs to render it."""

    segment: SegmentRef
    score: float
    lesson_title: str
    segment_title: str
    begin: int
    duration: int
    url: str
    pobs: tuple[PobView, ...]


def make_query(
    domain_id: str,
    concepts: Iterable[str],
    facts: InferredFacts,
    *,
    pob_filter: PobKind | None = None,
    max_results: int | None = None,
    expand: Iterable[RelationKind] = (),
) -> Query:
    """Normalize raw concept ids into a query.

    Ids are trimmed, resolved against the domain (unknown ids are an error,
    naming the offender), canonicalized through sameAs and deduplicated.  An
    empty concept list is rejected.
    """
    raw = [c.strip() for c in concepts]
    raw = [c for c in raw if c]
    if not raw:
        raise QueryError("empty query: at least one concept id is required")
    if facts.domain_id != domain_id:
        raise DomainMismatchError(
            f"query addresses domain '{domain_id}' but facts are for "
            f"'{facts.domain_id}'"
        )
    if max_results is not None and max_results < 1:
        raise QueryError(f"max_results must be >= 1, got {max_results}")
    canonical = frozenset(facts.canonical(c) for c in raw)
    return Query(
        domain_id=domain_id,
        concepts=canonical,
        pob_filter=pob_filter,
        max_results=max_results,
        expand=frozenset(expand),
    )


def expand_query(query: Query, facts: InferredFacts) -> Query:
    """Add closure neighbours under the query's expansion kinds (weight 1).

    With no expansion kinds the query is returned unchanged.  Expansion is a
    single round over the query's own concepts: neighbours of added concepts
    are not chased (for a transitive kind the closure already contains them).
    """
    if not query.expand:
        return query
    added: set[str] = set(query.concepts)
    for concept in query.concepts:
        for neighbour in related_concepts(concept, facts, query.expand):
            added.add(facts.canonical(neighbour))
    return replace(query, concepts=frozenset(added))


def cosine(segment_vector: Mapping[str, float], query_concepts: AbstractSet[str]) -> float:
    """Cosine between a sparse weight vector and a binary query vector.

    The query norm is sqrt(|concepts|) over the query's own entries; if
    either vector has norm 0 the score is 0.  Iteration is in sorted concept
    order so the floating-point result is reproducible.
    """
    if not segment_vector or not query_concepts:
        return 0.0
    dot = 0.0
    for concept in sorted(query_concepts):
        weight = segment_vector.get(concept)
        if weight is not None:
            dot += weight
    if dot == 0.0:
        return 0.0
    norm_sq = 0.0
    for concept in sorted(segment_vector):
        norm_sq += segment_vector[concept] ** 2
    segment_norm = math.sqrt(norm_sq)
    query_norm = math.sqrt(len(query_concepts))
    if segment_norm == 0.0:
        return 0.0
    return dot / (segment_norm * query_norm)


def _scoring_concepts(query: Query, facts: InferredFacts | None) -> frozenset[str]:
    if query.expand and facts is None:
        raise QueryError(
            "query requests expansion but no inferred facts were provided"
        )
    if query.expand:
        return expand_query(query, facts).concepts
    return query.concepts


def search(
    query: Query,
    index: ConceptSegmentIndex,
    corpus: AnnotatedCorpus,
    *,
    ontology: DomainOntology | None = None,
    facts: InferredFacts | None = None,
) -> list[RankedResult]:
    """Rank every segment of the query's domain against the query.

    Deterministic: scores descend, ties resolve by (lesson_id, segment_id)
    ascending, zero scores are dropped, and ``max_results`` truncates the
    tail.  ``facts`` is only needed when the query carries expansion kinds;
    ``ontology`` supplies display labels (ids are shown without it).
    """
    if query.domain_id not in corpus.domain_ids():
        raise DomainMismatchError(
            f"corpus contains no courses for domain '{query.domain_id}'"
        )
    concepts = _scoring_concepts(query, facts)

    scored: list[RankedResult] = []
    for course in corpus.courses:
        if course.domain_id != query.domain_id:
            continue
        for lesson in course.lessons:
            if index.lesson_domains.get(lesson.lesson_id) != course.domain_id:
                raise DomainMismatchError(
                    f"index was not built over lesson '{lesson.lesson_id}' "
                    f"of domain '{course.domain_id}'"
                )
            for segment in lesson.segments:
                if query.pob_filter is not None and not any(
                    pob.kind is query.pob_filter for pob in segment.pobs
                ):
                    continue
                ref = SegmentRef(lesson.lesson_id, segment.segment_id)
                vector = index.segment_vectors.get(ref, {})
                score = cosine(vector, concepts)
                if score == 0.0:
                    continue
                scored.append(
                    _make_result(ref, score, lesson, segment, ontology)
                )

    scored.sort(key=lambda r: (-r.score, r.segment.lesson_id, r.segment.segment_id))
    if query.max_results is not None:
        scored = scored[: query.max_results]
    return scored


def _make_result(ref, score, lesson, segment, ontology):
    def label(concept_id: str) -> str:
        if ontology is not None:
            return ontology.concepts.get(concept_id, concept_id)
        return concept_id

    return RankedResult(
        segment=ref,
        score=score,
        lesson_title=lesson.title,
        segment_title=segment.title,
        begin=segment.begin,
        duration=segment.duration,
        url=lesson.url,
        pobs=tuple(
            PobView(
                pob_id=pob.pob_id,
                kind=pob.kind,
                concepts=tuple(label(c) for c in pob.concerns),
                comment=pob.comment,
            )
            for pob in segment.pobs
        ),
    )


def result_to_dict(result: RankedResult) -> dict[str, Any]:
    """JSON form of one result (times in seconds, scores at full precision)."""
    pobs = []
    for pob in result.pobs:
        entry: dict[str, Any] = {
            "pob_id": pob.pob_id,
            "kind": pob.kind.value,
            "concepts": list(pob.concepts),
        }
        if pob.comment is not None:
            entry["comment"] = pob.comment
        pobs.append(entry)
    return {
        "lesson_id": result.segment.lesson_id,
        "segment_id": result.segment.segment_id,
        "score": result.score,
        "lesson_title": result.lesson_title,
        "segment_title": result.segment_title,
        "begin": result.begin,
        "duration": result.duration,
        "url": result.url,
        "pobs": pobs,
    }


@dataclass(frozen=True)
class ConceptContribution:
    """One query concept's stats inside a score breakdown."""

    concept: str
    cf: int
    seg_f: int
    s_d: int
    df: int
    weight: float


@dataclass(frozen=True)
class ScoreBreakdown:
    """Exactly the numbers :func:`search` used for one (query, segment) pair."""

    segment: SegmentRef
    concepts: tuple[ConceptContribution, ...]
    dot: float
    segment_norm: float
    query_norm: float
    score: float


def explain(
    query: Query,
    ref: SegmentRef,
    index: ConceptSegmentIndex,
    *,
    facts: InferredFacts | None = None,
) -> ScoreBreakdown:
    """Per-concept contribution table for one segment.

    Uses the same expanded concept set, the same stored weights and the same
    cosine arithmetic as :func:`search`, so the reported score is the score.
    """
    if ref not in index.segment_vectors:
        raise QueryError(f"unknown segment {ref.lesson_id}/{ref.segment_id}")
    concepts = _scoring_concepts(query, facts)
    stats = index.stats
    vector = index.segment_vectors[ref]

    rows = []
    for concept in sorted(concepts):
        rows.append(
            ConceptContribution(
                concept=concept,
                cf=stats.cf.get((concept, ref), 0),
                seg_f=stats.seg_f.get((concept, ref.lesson_id), 0),
                s_d=stats.segments_per_document.get(ref.lesson_id, 0),
                df=stats.df.get(concept, 0),
                weight=index.weights.get((concept, ref), 0.0),
            )
        )
    return ScoreBreakdown(
        segment=ref,
        concepts=tuple(rows),
        dot=sum(r.weight for r in rows if vector.get(r.concept) is not None),
        segment_norm=math.sqrt(sum(w * w for _, w in sorted(vector.items()))),
        query_norm=math.sqrt(len(concepts)),
        score=cosine(vector, concepts),
    )


def breakdown_to_dict(breakdown: ScoreBreakdown) -> dict[str, Any]:
    return {
        "lesson_id": breakdown.segment.lesson_id,
        "segment_id": breakdown.segment.segment_id,
        "concepts": [
            {
                "concept": r.concept,
                "CF": r.cf,
                "SegF": r.seg_f,
                "S_d": r.s_d,
                "DF": r.df,
                "weight": r.weight,
            }
            for r in breakdown.concepts
        ],
        "dot": breakdown.dot,
        "segment_norm": breakdown.segment_norm,
        "query_norm": breakdown.query_norm,
        "score": breakdown.score,
    }


def format_results(results: Sequence[RankedResult]) -> str:
    """Readable text table used by the CLI."""
    if not results:
        return "no matching segments"
    lines = []
    for rank, r in enumerate(results, start=1):
        lines.append(
            f"{rank:3d}. {r.score:.4f}  {r.segment.lesson_id}/{r.segment.segment_id}"
            f"  [{format_time(r.begin)} + {format_time(r.duration)}]"
            f"  {r.lesson_title} — {r.segment_title}"
        )
        for pob in r.pobs:
            comment = f" — {pob.comment}" if pob.comment else ""
            lines.append(
                f"       {pob.kind.value}: {', '.join(pob.concepts)}{comment}"
            )
    return "\n".join(lines)
