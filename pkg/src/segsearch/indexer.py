"""Segment-level concept weighting and the persisted index.

The weight of a concept c in segment s of document (lesson) d combines three
factors, all with natural logarithms:

    weight(c, s, d) = CF(c, s, d) * ln(S_d / SegF(c, d)) * ln(|D| / DF(c))

CF counts the pedagogical objects of s that concern c; S_d is the number of
segments of d; SegF counts the segments of d containing c; |D| is the number
of documents in the corpus and DF the number of documents containing c.  A
concept spread over every segment of its document, or over every document,
therefore weighs zero — it discriminates nothing.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Any, Iterator, Mapping

from .annotations import AnnotatedCorpus, SegmentRef
from .errors import IndexingError, IndexIOError

INDEX_FORMAT_VERSION = 1

Weight = float


@dataclass(frozen=True)
class IndexStats:
    """Raw occurrence counts behind the weighting formula."""

    num_documents: int
    segments_per_document: Mapping[str, int]
    cf: Mapping[tuple[str, SegmentRef], int]
    seg_f: Mapping[tuple[str, str], int]
    df: Mapping[str, int]


@dataclass(frozen=True)
class ConceptSegmentIndex:
    """Immutable search index over one corpus.

    ``weights`` has an entry for every (concept, segment) pair with CF >= 1,
    including pairs whose weight is exactly 0.0; ``segment_vectors`` keeps
    only the non-zero coordinates and has a key for *every* segment of the
    corpus, so an all-zero segment maps to an empty vector.
    """

    stats: IndexStats
    weights: Mapping[tuple[str, SegmentRef], Weight]
    segment_vectors: Mapping[SegmentRef, Mapping[str, Weight]]
    segments: tuple[SegmentRef, ...]
    lesson_domains: Mapping[str, str]
    vocabulary: frozenset[str]
    format_version: int = INDEX_FORMAT_VERSION


def count_stats(corpus: AnnotatedCorpus) -> IndexStats:
    """Count CF / SegF / DF over a canonicalized corpus.

    Every lesson is one document, segment-less lessons included.  A corpus
    in which one concept id is used under two different domains is rejected:
    stats are keyed by bare concept id, and merging counts across domains
    would silently corrupt both.
    """
    documents = corpus.documents
    if not documents:
        raise IndexingError("nothing to index: corpus has no lessons")

    concept_domains: dict[str, str] = {}
    for course in corpus.courses:
        for lesson in course.lessons:
            for segment in lesson.segments:
                for concept in segment.concept_ids():
                    prior = concept_domains.setdefault(concept, course.domain_id)
                    if prior != course.domain_id:
                        raise IndexingError(
                            f"concept id '{concept}' is used under both domain "
                            f"'{prior}' and domain '{course.domain_id}'; corpora "
                            "must keep concept ids disjoint across domains"
                        )

    segments_per_document: dict[str, int] = {}
    cf: dict[tuple[str, SegmentRef], int] = {}
    seg_f: dict[tuple[str, str], int] = {}
    df: dict[str, int] = {}

    for lesson in documents:
        segments_per_document[lesson.lesson_id] = len(lesson.segments)
        concepts_in_document: set[str] = set()
        for segment in lesson.segments:
            ref = SegmentRef(lesson.lesson_id, segment.segment_id)
            for concept in sorted(segment.concept_ids()):
                count = sum(1 for pob in segment.pobs if concept in pob.concerns)
                cf[(concept, ref)] = count
                seg_f[(concept, lesson.lesson_id)] = (
                    seg_f.get((concept, lesson.lesson_id), 0) + 1
                )
            concepts_in_document.update(segment.concept_ids())
        for concept in sorted(concepts_in_document):
            df[concept] = df.get(concept, 0) + 1

    return IndexStats(
        num_documents=len(documents),
        segments_per_document=segments_per_document,
        cf=cf,
        seg_f=seg_f,
        df=df,
    )


def cf_isdf(concept: str, ref: SegmentRef, stats: IndexStats) -> Weight:
    """Weight of one concept in one segment; 0.0 when the concept is absent."""
    count = stats.cf.get((concept, ref), 0)
    if count == 0:
        return 0.0
    s_d = stats.segments_per_document[ref.lesson_id]
    seg_f = stats.seg_f[(concept, ref.lesson_id)]
    df = stats.df[concept]
    return count * math.log(s_d / seg_f) * math.log(stats.num_documents / df)


def build_index(corpus: AnnotatedCorpus) -> ConceptSegmentIndex:
    """Compute stats and weights for a canonicalized corpus."""
    stats = count_stats(corpus)

    weights: dict[tuple[str, SegmentRef], Weight] = {}
    for concept, ref in sorted(stats.cf):
        weights[(concept, ref)] = cf_isdf(concept, ref, stats)

    segments: list[SegmentRef] = []
    lesson_domains: dict[str, str] = {}
    for course in corpus.courses:
        for lesson in course.lessons:
            lesson_domains[lesson.lesson_id] = course.domain_id
            for segment in lesson.segments:
                segments.append(SegmentRef(lesson.lesson_id, segment.segment_id))
    segments.sort(key=lambda r: (r.lesson_id, r.segment_id))

    vectors: dict[SegmentRef, dict[str, Weight]] = {ref: {} for ref in segments}
    for (concept, ref), weight in sorted(weights.items()):
        if weight != 0.0:
            vectors[ref][concept] = weight

    return ConceptSegmentIndex(
        stats=stats,
        weights=weights,
        segment_vectors=vectors,
        segments=tuple(segments),
        lesson_domains=lesson_domains,
        vocabulary=frozenset(stats.df),
    )


def iter_stats_rows(index: ConceptSegmentIndex) -> Iterator[dict[str, Any]]:
    """One row per stored (concept, segment) entry, deterministically ordered."""
    stats = index.stats
    for (concept, ref), count in sorted(index.stats.cf.items()):
        yield {
            "c": concept,
            "lesson": ref.lesson_id,
            "segment": ref.segment_id,
            "CF": count,
            "SegF": stats.seg_f[(concept, ref.lesson_id)],
            "S_d": stats.segments_per_document[ref.lesson_id],
            "DF": stats.df[concept],
            "weight": index.weights[(concept, ref)],
        }


def _index_payload(index: ConceptSegmentIndex) -> dict[str, Any]:
    cf_nested: dict[str, dict[str, dict[str, int]]] = {}
    for (concept, ref), count in index.stats.cf.items():
        cf_nested.setdefault(concept, {}).setdefault(ref.lesson_id, {})[
            ref.segment_id
        ] = count
    weights_nested: dict[str, dict[str, dict[str, float]]] = {}
    for (concept, ref), weight in index.weights.items():
        weights_nested.setdefault(concept, {}).setdefault(ref.lesson_id, {})[
            ref.segment_id
        ] = weight
    seg_f_nested: dict[str, dict[str, int]] = {}
    for (concept, lesson_id), count in index.stats.seg_f.items():
        seg_f_nested.setdefault(concept, {})[lesson_id] = count
    return {
        "num_documents": index.stats.num_documents,
        "segments_per_document": dict(index.stats.segments_per_document),
        "cf": cf_nested,
        "seg_f": seg_f_nested,
        "df": dict(index.stats.df),
        "weights": weights_nested,
        "segments": [[r.lesson_id, r.segment_id] for r in index.segments],
        "lesson_domains": dict(index.lesson_domains),
    }


def _canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def save_index(index: ConceptSegmentIndex, sink: str | Path | IO[str]) -> None:
    """Write the index as a self-describing, checksummed JSON container.

    The serialization is fully deterministic (sorted keys, fixed separators,
    shortest-round-trip floats), so identical inputs produce bit-identical
    files and weights survive save/load exactly.
    """
    payload = _index_payload(index)
    body = _canonical_json(payload)
    container = {
        "format": "segsearch-index",
        "format_version": index.format_version,
        "checksum": "sha256:" + hashlib.sha256(body.encode("utf-8")).hexdigest(),
        "payload": payload,
    }
    text = _canonical_json(container) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        Path(sink).write_text(text, encoding="utf-8")


def load_index(source: str | Path | IO[str]) -> ConceptSegmentIndex:
    """Read an index container back; verify version and checksum first."""
    if hasattr(source, "read"):
        text, name = source.read(), str(getattr(source, "name", "<stream>"))
    else:
        path = Path(source)
        text, name = path.read_text(encoding="utf-8"), str(path)

    try:
        container = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IndexIOError(f"{name}: not a readable index file: {exc.msg} "
                           f"(line {exc.lineno})") from exc
    if not isinstance(container, dict) or container.get("format") != "segsearch-index":
        raise IndexIOError(f"{name}: not a segsearch index container")
    version = container.get("format_version")
    if version != INDEX_FORMAT_VERSION:
        raise IndexIOError(
            f"{name}: unsupported index format version {version!r} "
            f"(this build reads version {INDEX_FORMAT_VERSION})"
        )
    payload = container.get("payload")
    if not isinstance(payload, dict):
        raise IndexIOError(f"{name}: index container has no payload")
    body = _canonical_json(payload)
    digest = "sha256:" + hashlib.sha256(body.encode("utf-8")).hexdigest()
    if container.get("checksum") != digest:
        raise IndexIOError(f"{name}: checksum mismatch — file is corrupt or truncated")

    try:
        cf: dict[tuple[str, SegmentRef], int] = {}
        for concept, lessons in payload["cf"].items():
            for lesson_id, per_segment in lessons.items():
                for segment_id, count in per_segment.items():
                    cf[(concept, SegmentRef(lesson_id, segment_id))] = count
        weights: dict[tuple[str, SegmentRef], float] = {}
        for concept, lessons in payload["weights"].items():
            for lesson_id, per_segment in lessons.items():
                for segment_id, weight in per_segment.items():
                    weights[(concept, SegmentRef(lesson_id, segment_id))] = weight
        seg_f = {
            (concept, lesson_id): count
            for concept, lessons in payload["seg_f"].items()
            for lesson_id, count in lessons.items()
        }
        stats = IndexStats(
            num_documents=payload["num_documents"],
            segments_per_document=dict(payload["segments_per_document"]),
            cf=cf,
            seg_f=seg_f,
            df=dict(payload["df"]),
        )
        segments = tuple(SegmentRef(l, s) for l, s in payload["segments"])
        vectors: dict[SegmentRef, dict[str, float]] = {ref: {} for ref in segments}
        for (concept, ref), weight in sorted(weights.items()):
            if weight != 0.0:
                vectors[ref][concept] = weight
        return ConceptSegmentIndex(
            stats=stats,
            weights=weights,
            segment_vectors=vectors,
            segments=segments,
            lesson_domains=dict(payload["lesson_domains"]),
            vocabulary=frozenset(stats.df),
            format_version=version,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IndexIOError(f"{name}: malformed index payload: {exc!r}") from exc
