"""Annotated video courses: lessons, time-coded segments, pedagogical objects.

A course belongs to one teaching domain; its lessons are the *documents* of
the retrieval model.  Each lesson is cut into non-overlapping time segments,
and every segment carries at least one pedagogical object (POB) whose
``concerns`` list ties it to ontology concepts.
"""

from __future__ import annotations

import enum
import json
import logging
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO, Any, Iterable, Mapping

from .errors import AnnotationError, ParseError
from .inference import InferredFacts
from .ontology import ConceptId, DomainOntology

log = logging.getLogger(__name__)

_TIME_RE = re.compile(r"^(\d{2,}):([0-5]\d):([0-5]\d)$")


def parse_time(text: str) -> int:
    """hh:mm:ss -> seconds.  Fractional or free-form values are rejected."""
    m = _TIME_RE.match(text.strip())
    if not m:
        raise AnnotationError(
            f"bad time literal {text!r}: expected hh:mm:ss with two-digit fields"
        )
    h, mnt, s = (int(g) for g in m.groups())
    return h * 3600 + mnt * 60 + s


def format_time(seconds: int) -> str:
    """Seconds -> hh:mm:ss (hours grow beyond two digits when needed)."""
    if seconds < 0:
        raise ValueError(f"negative time {seconds}")
    h, rem = divmod(seconds, 3600)
    m, s = divmod(rem, 60)
    return f"{h:02d}:{m:02d}:{s:02d}"


class PobKind(enum.Enum):
    """The eight kinds of pedagogical object a segment may carry."""

    DEFINITION = "definition"
    EXAMPLE = "example"
    EXERCISE = "exercise"
    SOLUTION_EXERCISE = "solution_exercise"
    ILLUSTRATION = "illustration"
    RULE = "rule"
    THEOREM = "theorem"
    DEMONSTRATION = "demonstration"


_POB_KIND_BY_NAME = {k.value: k for k in PobKind}


@dataclass(frozen=True)
class PedagogicalObject:
    """One unit of teaching content, tied to the concepts it concerns."""

    pob_id: str
    kind: PobKind
    concerns: tuple[ConceptId, ...]
    comment: str | None = None


@dataclass(frozen=True)
class Segment:
    """A half-open time slice [begin, begin+duration) of one lesson video."""

    segment_id: str
    title: str
    begin: int
    duration: int
    pobs: tuple[PedagogicalObject, ...]

    @property
    def end(self) -> int:
        return self.begin + self.duration

    def concept_ids(self) -> set[ConceptId]:
        return {c for pob in self.pobs for c in pob.concerns}


@dataclass(frozen=True)
class VideoLesson:
    """One lesson video — a *document* of the retrieval model."""

    lesson_id: str
    title: str
    url: str
    language: str
    segments: tuple[Segment, ...]


@dataclass(frozen=True)
class VideoCourse:
    """A course: ordered lessons, all annotated against one domain ontology."""

    course_id: str
    title: str
    domain_id: str
    lessons: tuple[VideoLesson, ...]


@dataclass(frozen=True, order=True)
class SegmentRef:
    """Stable address of one segment across the whole corpus.

    Ordered by (lesson_id, segment_id) — the tie-break order of rankings and
    the row order of every deterministic dump.
    """

    lesson_id: str
    segment_id: str

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return f"{self.lesson_id}/{self.segment_id}"


@dataclass(frozen=True)
class AnnotatedCorpus:
    """Every loaded course.  The flat lesson list is the document set D."""

    courses: tuple[VideoCourse, ...]

    @property
    def documents(self) -> tuple[VideoLesson, ...]:
        return tuple(l for course in self.courses for l in course.lessons)

    def lesson(self, lesson_id: str) -> VideoLesson:
        for course in self.courses:
            for lesson in course.lessons:
                if lesson.lesson_id == lesson_id:
                    return lesson
        raise KeyError(lesson_id)

    def lesson_domain(self, lesson_id: str) -> str:
        for course in self.courses:
            for lesson in course.lessons:
                if lesson.lesson_id == lesson_id:
                    return course.domain_id
        raise KeyError(lesson_id)

    def segment(self, ref: SegmentRef) -> Segment:
        lesson = self.lesson(ref.lesson_id)
        for segment in lesson.segments:
            if segment.segment_id == ref.segment_id:
                return segment
        raise KeyError(str(ref))

    def domain_ids(self) -> set[str]:
        return {course.domain_id for course in self.courses}


_COURSE_KEYS = {"course_id", "title", "domain_id", "lessons"}
_LESSON_KEYS = {"lesson_id", "title", "url", "language", "segments"}
_SEGMENT_KEYS = {"segment_id", "title", "begin", "duration", "pobs"}
_POB_KEYS = {"pob_id", "kind", "concerns", "comment"}


def _read_source(source: str | Path | IO[str]) -> tuple[str, str]:
    if hasattr(source, "read"):
        return source.read(), str(getattr(source, "name", "<stream>"))
    path = Path(source)
    return path.read_text(encoding="utf-8"), str(path)


def _check_unknown_keys(
    obj: Mapping[str, Any], allowed: set[str], where: str, source: str, strict: bool
) -> None:
    unknown = sorted(set(obj) - allowed)
    if not unknown:
        return
    msg = f"unknown key(s) {unknown} in {where}"
    if strict:
        raise ParseError(msg, source=source)
    log.warning("%s: %s (ignored)", source, msg)


def _require(obj: Mapping[str, Any], key: str, typ: type, where: str, source: str) -> Any:
    if key not in obj:
        raise ParseError(f"missing key '{key}' in {where}", source=source)
    value = obj[key]
    if not isinstance(value, typ):
        raise ParseError(
            f"key '{key}' in {where} must be {typ.__name__}, got {type(value).__name__}",
            source=source,
        )
    return value


def _build_pob(entry: Mapping[str, Any], where: str, source: str, strict: bool) -> PedagogicalObject:
    _check_unknown_keys(entry, _POB_KEYS, where, source, strict)
    pob_id = _require(entry, "pob_id", str, where, source)
    kind_name = _require(entry, "kind", str, where, source)
    kind = _POB_KIND_BY_NAME.get(kind_name)
    if kind is None:
        raise AnnotationError(
            f"{source}: POB '{pob_id}': unknown kind '{kind_name}' "
            f"(expected one of {sorted(_POB_KIND_BY_NAME)})"
        )
    concerns = _require(entry, "concerns", list, where, source)
    if not concerns or not all(isinstance(c, str) and c for c in concerns):
        raise AnnotationError(
            f"{source}: POB '{pob_id}' needs a non-empty list of concept ids"
        )
    comment = entry.get("comment")
    if comment is not None and not isinstance(comment, str):
        raise ParseError(f"key 'comment' in {where} must be str", source=source)
    return PedagogicalObject(
        pob_id=pob_id, kind=kind, concerns=tuple(concerns), comment=comment
    )


def _build_segment(entry: Mapping[str, Any], where: str, source: str, strict: bool) -> Segment:
    _check_unknown_keys(entry, _SEGMENT_KEYS, where, source, strict)
    segment_id = _require(entry, "segment_id", str, where, source)
    begin = parse_time(_require(entry, "begin", str, where, source))
    duration = parse_time(_require(entry, "duration", str, where, source))
    if duration <= 0:
        raise AnnotationError(f"{source}: segment '{segment_id}' has zero duration")
    pobs = [
        _build_pob(p, f"{where}.pobs[{i}]", source, strict)
        for i, p in enumerate(_require(entry, "pobs", list, where, source))
    ]
    if not pobs:
        raise AnnotationError(
            f"{source}: segment '{segment_id}' has no pedagogical objects"
        )
    return Segment(
        segment_id=segment_id,
        title=_require(entry, "title", str, where, source),
        begin=begin,
        duration=duration,
        pobs=tuple(pobs),
    )


def _order_and_check_segments(
    segments: list[Segment], lesson_id: str, source: str
) -> tuple[Segment, ...]:
    """Sort by begin time and reject duplicate ids or overlapping slices."""
    seen_ids: set[str] = set()
    for segment in segments:
        if segment.segment_id in seen_ids:
            raise AnnotationError(
                f"{source}: duplicate segment id '{segment.segment_id}' "
                f"in lesson '{lesson_id}'"
            )
        seen_ids.add(segment.segment_id)
    ordered = sorted(segments, key=lambda s: s.begin)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.begin < prev.end:
            raise AnnotationError(
                f"{source}: segments '{prev.segment_id}' and '{cur.segment_id}' of "
                f"lesson '{lesson_id}' overlap "
                f"([{format_time(prev.begin)}, {format_time(prev.end)}) vs "
                f"begin {format_time(cur.begin)})"
            )
    return tuple(ordered)


def _build_lesson(entry: Mapping[str, Any], where: str, source: str, strict: bool) -> VideoLesson:
    _check_unknown_keys(entry, _LESSON_KEYS, where, source, strict)
    lesson_id = _require(entry, "lesson_id", str, where, source)
    segments = [
        _build_segment(s, f"{where}.segments[{i}]", source, strict)
        for i, s in enumerate(_require(entry, "segments", list, where, source))
    ]
    if not segments:
        log.warning("%s: lesson '%s' has no segments", source, lesson_id)
    return VideoLesson(
        lesson_id=lesson_id,
        title=_require(entry, "title", str, where, source),
        url=_require(entry, "url", str, where, source),
        language=_require(entry, "language", str, where, source),
        segments=_order_and_check_segments(segments, lesson_id, source),
    )


def course_from_dict(
    data: Mapping[str, Any],
    *,
    ontologies: Mapping[str, DomainOntology] | None = None,
    strict: bool = True,
    source: str = "<dict>",
) -> VideoCourse:
    """Build a :class:`VideoCourse` from decoded canonical JSON.

    When ``ontologies`` is given, the course's domain must be among them and
    every concern id must be a declared concept of that domain; without it
    only structural checks run (useful for format round-trip tooling).
    """
    if not isinstance(data, Mapping):
        raise ParseError("annotation document must be a JSON object", source=source)
    _check_unknown_keys(data, _COURSE_KEYS, "annotation document", source, strict)
    course = VideoCourse(
        course_id=_require(data, "course_id", str, "annotation document", source),
        title=_require(data, "title", str, "annotation document", source),
        domain_id=_require(data, "domain_id", str, "annotation document", source),
        lessons=tuple(
            _build_lesson(l, f"lessons[{i}]", source, strict)
            for i, l in enumerate(_require(data, "lessons", list, "annotation document", source))
        ),
    )
    seen: set[str] = set()
    for lesson in course.lessons:
        if lesson.lesson_id in seen:
            raise AnnotationError(
                f"{source}: duplicate lesson id '{lesson.lesson_id}' "
                f"in course '{course.course_id}'"
            )
        seen.add(lesson.lesson_id)
    if ontologies is not None:
        _check_concept_resolution(course, ontologies, source)
    return course


def _check_concept_resolution(
    course: VideoCourse, ontologies: Mapping[str, DomainOntology], source: str
) -> None:
    ontology = ontologies.get(course.domain_id)
    if ontology is None:
        raise AnnotationError(
            f"{source}: course '{course.course_id}' declares unknown domain "
            f"'{course.domain_id}' (loaded: {sorted(ontologies)})"
        )
    for lesson in course.lessons:
        for segment in lesson.segments:
            for pob in segment.pobs:
                for concern in pob.concerns:
                    if concern not in ontology.concepts:
                        raise AnnotationError(
                            f"{source}: POB '{pob.pob_id}' in segment "
                            f"'{segment.segment_id}' of lesson '{lesson.lesson_id}' "
                            f"concerns unresolvable concept '{concern}' "
                            f"(domain '{course.domain_id}')"
                        )


def parse_annotation(
    source: str | Path | IO[str],
    *,
    ontologies: Mapping[str, DomainOntology] | None = None,
    strict: bool = True,
) -> VideoCourse:
    """Load one course from its canonical JSON document."""
    text, name = _read_source(source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, source=name, line=exc.lineno, column=exc.colno) from exc
    return course_from_dict(data, ontologies=ontologies, strict=strict, source=name)


def build_corpus(courses: Iterable[VideoCourse]) -> AnnotatedCorpus:
    """Assemble courses into a corpus; lesson ids must be globally unique."""
    courses = tuple(courses)
    seen: dict[str, str] = {}
    for course in courses:
        for lesson in course.lessons:
            if lesson.lesson_id in seen:
                raise AnnotationError(
                    f"lesson id '{lesson.lesson_id}' appears in both course "
                    f"'{seen[lesson.lesson_id]}' and course '{course.course_id}'"
                )
            seen[lesson.lesson_id] = course.course_id
    return AnnotatedCorpus(courses=courses)


def canonicalize_corpus(
    corpus: AnnotatedCorpus, facts_by_domain: Mapping[str, InferredFacts]
) -> AnnotatedCorpus:
    """Rewrite every concern id to its sameAs representative, deduplicated.

    Duplicates created by the rewrite collapse to the first occurrence, so a
    POB concerning two names of one concept counts it once.  Idempotent.
    """
    new_courses = []
    for course in corpus.courses:
        facts = facts_by_domain.get(course.domain_id)
        if facts is None:
            raise AnnotationError(
                f"no inferred facts for domain '{course.domain_id}' "
                f"of course '{course.course_id}'"
            )
        new_lessons = []
        for lesson in course.lessons:
            new_segments = []
            for segment in lesson.segments:
                new_pobs = []
                for pob in segment.pobs:
                    mapped: list[str] = []
                    for concern in pob.concerns:
                        rep = facts.canonical(concern)
                        if rep not in mapped:
                            mapped.append(rep)
                    new_pobs.append(replace(pob, concerns=tuple(mapped)))
                new_segments.append(replace(segment, pobs=tuple(new_pobs)))
            new_lessons.append(replace(lesson, segments=tuple(new_segments)))
        new_courses.append(replace(course, lessons=tuple(new_lessons)))
    return AnnotatedCorpus(courses=tuple(new_courses))


def course_to_dict(course: VideoCourse) -> dict[str, Any]:
    """Serialize to the canonical JSON structure (times as hh:mm:ss)."""
    lessons = []
    for lesson in course.lessons:
        segments = []
        for segment in lesson.segments:
            pobs = []
            for pob in segment.pobs:
                entry: dict[str, Any] = {
                    "pob_id": pob.pob_id,
                    "kind": pob.kind.value,
                    "concerns": list(pob.concerns),
                }
                if pob.comment is not None:
                    entry["comment"] = pob.comment
                pobs.append(entry)
            segments.append(
                {
                    "segment_id": segment.segment_id,
                    "title": segment.title,
                    "begin": format_time(segment.begin),
                    "duration": format_time(segment.duration),
                    "pobs": pobs,
                }
            )
        lessons.append(
            {
                "lesson_id": lesson.lesson_id,
                "title": lesson.title,
                "url": lesson.url,
                "language": lesson.language,
                "segments": segments,
            }
        )
    return {
        "course_id": course.course_id,
        "title": course.title,
        "domain_id": course.domain_id,
        "lessons": lessons,
    }
