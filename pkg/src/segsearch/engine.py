"""Load-and-wire layer shared by the CLI and the HTTP service.

An engine holds the immutable pipeline products for one data set: the domain
ontologies, their inferred closures, the canonicalized corpus and the index.
Everything is built once at load time; serving is read-only thereafter.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .annotations import (
    AnnotatedCorpus,
    VideoCourse,
    build_corpus,
    canonicalize_corpus,
    parse_annotation,
)
from .errors import SegSearchError
from .indexer import ConceptSegmentIndex, build_index, load_index
from .inference import InferredFacts, infer
from .ontology import DomainOntology, load_domain_ontology
from .owl_import import import_owl_subset

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchEngine:
    """Immutable bundle of one corpus and everything derived from it."""

    ontologies: Mapping[str, DomainOntology]
    facts: Mapping[str, InferredFacts]
    corpus: AnnotatedCorpus
    index: ConceptSegmentIndex


def _is_owl(path: Path) -> bool:
    if path.suffix.lower() in (".owl", ".rdf", ".xml"):
        return True
    head = path.read_text(encoding="utf-8", errors="replace")[:512].lstrip()
    return head.startswith("<")


def load_ontologies(
    paths: Iterable[str | Path], *, strict: bool = True
) -> dict[str, DomainOntology]:
    """Load canonical-JSON or OWL-subset ontology files, keyed by domain id."""
    ontologies: dict[str, DomainOntology] = {}
    for raw in paths:
        path = Path(raw)
        if _is_owl(path):
            loaded = import_owl_subset(path, strict=strict)
            if not isinstance(loaded, DomainOntology):
                raise SegSearchError(
                    f"{path}: expected an ontology document, found a video course"
                )
        else:
            loaded = load_domain_ontology(path, strict=strict)
        if loaded.domain_id in ontologies:
            raise SegSearchError(f"domain '{loaded.domain_id}' loaded twice ({path})")
        ontologies[loaded.domain_id] = loaded
    if not ontologies:
        raise SegSearchError("no ontology files given")
    return ontologies


def _annotation_files(paths: Iterable[str | Path]) -> list[Path]:
    files: list[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            found = sorted(p for p in path.iterdir() if p.suffix.lower() == ".json")
            if not found:
                log.warning("%s: directory contains no .json annotation files", path)
            files.extend(found)
        else:
            files.append(path)
    return files


def load_courses(
    paths: Iterable[str | Path],
    ontologies: Mapping[str, DomainOntology],
    *,
    strict: bool = True,
) -> list[VideoCourse]:
    """Load annotation files (canonical JSON or OWL subset); dirs are globbed."""
    courses: list[VideoCourse] = []
    for path in _annotation_files(paths):
        if _is_owl(path):
            loaded = import_owl_subset(path, strict=strict)
            if not isinstance(loaded, VideoCourse):
                raise SegSearchError(
                    f"{path}: expected a video-course document, found an ontology"
                )
            courses.append(loaded)
        else:
            courses.append(parse_annotation(path, ontologies=ontologies, strict=strict))
    if not courses:
        raise SegSearchError("no annotation files given")
    return courses


def build_engine(
    ontology_paths: Sequence[str | Path],
    annotation_paths: Sequence[str | Path],
    *,
    index_path: str | Path | None = None,
    strict: bool = True,
) -> SearchEngine:
    """Run the full pipeline: load, infer, canonicalize, index (or load one).

    With ``index_path`` the prebuilt index is loaded instead of recomputed and
    checked against the corpus (same lessons, same domains) before use.
    """
    ontologies = load_ontologies(ontology_paths, strict=strict)
    facts = {did: infer(o) for did, o in ontologies.items()}
    courses = load_courses(annotation_paths, ontologies, strict=strict)
    for course in courses:
        if course.domain_id not in ontologies:
            raise SegSearchError(
                f"course '{course.course_id}' declares domain '{course.domain_id}' "
                f"but no such ontology is loaded"
            )
    corpus = canonicalize_corpus(build_corpus(courses), facts)

    if index_path is not None:
        index = load_index(index_path)
        _check_index_matches(index, corpus)
    else:
        index = build_index(corpus)
    return SearchEngine(ontologies=ontologies, facts=facts, corpus=corpus, index=index)


def _check_index_matches(index: ConceptSegmentIndex, corpus: AnnotatedCorpus) -> None:
    expected = {
        (course.domain_id, lesson.lesson_id)
        for course in corpus.courses
        for lesson in course.lessons
    }
    actual = {(domain, lesson) for lesson, domain in index.lesson_domains.items()}
    if expected != actual:
        missing = sorted(expected - actual)
        extra = sorted(actual - expected)
        raise SegSearchError(
            "index does not match the loaded corpus"
            + (f"; corpus lessons missing from index: {missing}" if missing else "")
            + (f"; index lessons missing from corpus: {extra}" if extra else "")
        )
