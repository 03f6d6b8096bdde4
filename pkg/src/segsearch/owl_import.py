"""Importer for the legacy OWL/RDF-XML annotation subset.

Only a fixed element vocabulary is understood — the shape produced by the
original authoring tools.  Domain side: ``Teaching_domain``, ``teachs``,
``concept``, ``is_decomposed``, ``depends``, ``prerequisites``,
``owl:sameAs``.  Video side: ``video_course``/``cours_video``,
``is_presented_into``, ``lesson_video``, ``URL``, ``is_segmented``,
``langage``, ``slide``, ``Duration``, ``Begining``, ``Title``, ``contains``,
``POB``, ``concerne``, ``rdfs:comment``.  The French spellings are part of
the wire format and are preserved verbatim here; the canonical JSON formats
use the corrected English keys.

Identity comes from ``rdf:ID`` attributes; cross-references use
``rdf:resource`` whose ``#``-suffixed fragment names the target.
``rdf:datatype`` decorations are ignored.
"""

from __future__ import annotations

import logging
import re
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import IO, Union

from .annotations import (
    PedagogicalObject,
    PobKind,
    Segment,
    VideoCourse,
    VideoLesson,
    _order_and_check_segments,
    parse_time,
)
from .errors import AnnotationError, OntologyError, OwlImportError, ParseError
from .ontology import DomainOntology, RelationEdge, RelationKind, validate_ontology

log = logging.getLogger(__name__)

_DOMAIN_ELEMENTS = {"Teaching_domain"}
_COURSE_ELEMENTS = {"video_course", "cours_video"}

_CONCEPT_RELATIONS = {
    "is_decomposed": RelationKind.IS_DECOMPOSED_INTO,
    "depends": RelationKind.DEPENDS,
    "prerequisites": RelationKind.IS_PREREQUISITE,
    "sameAs": RelationKind.SAME_AS,
}

# POB kind is carried by the id prefix (definition_1, exemple_3, ...); both
# the French spellings of the source files and English ones are accepted.
_POB_PREFIXES = {
    "definition": PobKind.DEFINITION,
    "exemple": PobKind.EXAMPLE,
    "example": PobKind.EXAMPLE,
    "exercice": PobKind.EXERCISE,
    "exercise": PobKind.EXERCISE,
    "solution_exercice": PobKind.SOLUTION_EXERCISE,
    "solution_exercise": PobKind.SOLUTION_EXERCISE,
    "solution": PobKind.SOLUTION_EXERCISE,
    "illustration": PobKind.ILLUSTRATION,
    "regle": PobKind.RULE,
    "rule": PobKind.RULE,
    "theoreme": PobKind.THEOREM,
    "theorem": PobKind.THEOREM,
    "demonstration": PobKind.DEMONSTRATION,
}


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _attr(elem: ET.Element, name: str) -> str | None:
    for key, value in elem.attrib.items():
        if _local(key) == name:
            return value
    return None


def _ident(elem: ET.Element, source: str) -> str:
    value = _attr(elem, "ID")
    if value is None:
        value = _attr(elem, "about")
    if value is None:
        raise OwlImportError(f"{source}: <{_local(elem.tag)}> element without rdf:ID")
    return value.lstrip("#").strip()


def _fragment(elem: ET.Element, source: str) -> str:
    ref = _attr(elem, "resource")
    if ref is None:
        # The source corpus occasionally writes rdf:ID where rdf:resource is
        # meant; accept the id spelling for references as well.
        ref = _attr(elem, "ID")
    if ref is None:
        raise OwlImportError(
            f"{source}: <{_local(elem.tag)}> reference without rdf:resource"
        )
    frag = ref.rsplit("#", 1)[-1].strip()
    if not frag:
        raise OwlImportError(f"{source}: empty reference fragment in {ref!r}")
    return frag


def _text(elem: ET.Element) -> str:
    return (elem.text or "").strip()


def _unexpected(elem: ET.Element, where: str, source: str, strict: bool) -> None:
    msg = f"element <{_local(elem.tag)}> not in the supported subset ({where})"
    if strict:
        raise OwlImportError(f"{source}: {msg}")
    log.warning("%s: %s (skipped)", source, msg)


def pob_kind_from_id(pob_id: str) -> PobKind | None:
    """Infer the POB kind from its id prefix, e.g. ``exemple_12`` -> EXAMPLE."""
    base = re.sub(r"[_-]?\d+$", "", pob_id.strip()).lower()
    if base in _POB_PREFIXES:
        return _POB_PREFIXES[base]
    for prefix in sorted(_POB_PREFIXES, key=len, reverse=True):
        if base.startswith(prefix):
            return _POB_PREFIXES[prefix]
    return None


def import_owl_subset(
    source: str | Path | IO[str],
    *,
    strict: bool = True,
    domain_id: str | None = None,
) -> Union[DomainOntology, VideoCourse]:
    """Parse one OWL-subset document into a domain ontology or a video course.

    The document kind is decided by its top-level elements; a file holding
    both (or neither) is rejected.  ``domain_id`` overrides the imported
    course's domain, which otherwise defaults to the course's own id — the
    source corpus names the course after its teaching domain.
    """
    if hasattr(source, "read"):
        text, name = source.read(), str(getattr(source, "name", "<stream>"))
    else:
        path = Path(source)
        text, name = path.read_text(encoding="utf-8"), str(path)

    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, column = exc.position if exc.position else (None, None)
        raise ParseError(str(exc.msg).split(":")[0], source=name, line=line, column=column) from exc

    if _local(root.tag) in _DOMAIN_ELEMENTS or _local(root.tag) in _COURSE_ELEMENTS:
        top = [root]
    else:
        top = list(root)

    domains = [e for e in top if _local(e.tag) in _DOMAIN_ELEMENTS]
    courses = [e for e in top if _local(e.tag) in _COURSE_ELEMENTS]
    slides = [e for e in top if _local(e.tag) == "slide"]
    for elem in top:
        if _local(elem.tag) not in _DOMAIN_ELEMENTS | _COURSE_ELEMENTS | {"slide"}:
            _unexpected(elem, "document top level", name, strict)

    if domains and courses:
        raise OwlImportError(
            f"{name}: document mixes Teaching_domain and video_course elements"
        )
    if len(domains) > 1 or len(courses) > 1:
        raise OwlImportError(f"{name}: more than one root individual")
    if domains:
        if slides:
            _unexpected(slides[0], "ontology document", name, strict)
        return _import_domain(domains[0], name, strict)
    if courses:
        return _import_course(courses[0], slides, name, strict, domain_id)
    raise OwlImportError(f"{name}: no course or domain element found")


def _import_domain(elem: ET.Element, source: str, strict: bool) -> DomainOntology:
    did = _ident(elem, source)
    concept_elems: list[ET.Element] = []
    for child in elem:
        tag = _local(child.tag)
        if tag == "teachs":
            for grand in child:
                if _local(grand.tag) == "concept":
                    concept_elems.append(grand)
                else:
                    _unexpected(grand, "teachs", source, strict)
        elif tag == "concept":
            concept_elems.append(child)
        else:
            _unexpected(child, "Teaching_domain", source, strict)

    concepts: dict[str, str] = {}
    edges: list[RelationEdge] = []
    seen_edges: set[tuple[RelationKind, str, str]] = set()

    def declare(cid: str) -> None:
        concepts.setdefault(cid, cid)

    for celem in concept_elems:
        cid = _ident(celem, source)
        declare(cid)
        for rel in celem:
            kind = _CONCEPT_RELATIONS.get(_local(rel.tag))
            if kind is None:
                _unexpected(rel, f"concept '{cid}'", source, strict)
                continue
            target = _fragment(rel, source)
            declare(target)
            triple = (kind, cid, target)
            if triple not in seen_edges:
                seen_edges.add(triple)
                edges.append(RelationEdge(kind=kind, source=cid, target=target))

    ontology = DomainOntology(
        domain_id=did, label=did, concepts=concepts, edges=tuple(edges)
    )
    violations = validate_ontology(ontology)
    if violations:
        raise OntologyError(
            f"{source}: imported ontology invalid: "
            + "; ".join(str(v) for v in violations)
        )
    return ontology


def _import_course(
    elem: ET.Element,
    slide_elems: list[ET.Element],
    source: str,
    strict: bool,
    domain_id: str | None,
) -> VideoCourse:
    course_id = _ident(elem, source)
    slides: dict[str, Segment] = {}
    for selem in slide_elems:
        segment = _import_slide(selem, source, strict)
        if segment.segment_id in slides:
            raise OwlImportError(f"{source}: duplicate slide id '{segment.segment_id}'")
        slides[segment.segment_id] = segment

    course_language: str | None = None
    lesson_elems: list[ET.Element] = []
    for child in elem:
        tag = _local(child.tag)
        if tag == "is_presented_into":
            for grand in child:
                if _local(grand.tag) == "lesson_video":
                    lesson_elems.append(grand)
                else:
                    _unexpected(grand, "is_presented_into", source, strict)
        elif tag == "lesson_video":
            lesson_elems.append(child)
        elif tag == "langage":
            course_language = _text(child)
        else:
            _unexpected(child, "video_course", source, strict)

    lessons: list[VideoLesson] = []
    referenced: set[str] = set()
    for lelem in lesson_elems:
        lid = _ident(lelem, source)
        url = ""
        language: str | None = None
        segment_ids: list[str] = []
        for child in lelem:
            tag = _local(child.tag)
            if tag == "URL":
                url = _text(child)
            elif tag == "langage":
                language = _text(child)
            elif tag == "is_segmented":
                segment_ids.append(_fragment(child, source))
            else:
                _unexpected(child, f"lesson_video '{lid}'", source, strict)
        segments: list[Segment] = []
        for sid in segment_ids:
            if sid not in slides:
                raise OwlImportError(
                    f"{source}: lesson '{lid}' references missing slide '{sid}'"
                )
            referenced.add(sid)
            segments.append(slides[sid])
        lessons.append(
            VideoLesson(
                lesson_id=lid,
                title=lid,
                url=url,
                language=language if language is not None else (course_language or ""),
                segments=_order_and_check_segments(segments, lid, source),
            )
        )

    for sid in sorted(set(slides) - referenced):
        log.warning("%s: slide '%s' is referenced by no lesson", source, sid)

    seen: set[str] = set()
    for lesson in lessons:
        if lesson.lesson_id in seen:
            raise OwlImportError(f"{source}: duplicate lesson id '{lesson.lesson_id}'")
        seen.add(lesson.lesson_id)

    return VideoCourse(
        course_id=course_id,
        title=course_id,
        domain_id=domain_id if domain_id is not None else course_id,
        lessons=tuple(lessons),
    )


def _import_slide(elem: ET.Element, source: str, strict: bool) -> Segment:
    sid = _ident(elem, source)
    begin: int | None = None
    duration: int | None = None
    title: str | None = None
    pobs: list[PedagogicalObject] = []
    for child in elem:
        tag = _local(child.tag)
        if tag == "Begining":
            begin = _parse_slide_time(_text(child), "Begining", sid, source)
        elif tag == "Duration":
            duration = _parse_slide_time(_text(child), "Duration", sid, source)
        elif tag == "Title":
            title = _text(child)
        elif tag == "contains":
            for grand in child:
                if _local(grand.tag) == "POB":
                    pobs.append(_import_pob(grand, sid, source, strict))
                else:
                    _unexpected(grand, f"slide '{sid}' contains", source, strict)
        elif tag == "POB":
            pobs.append(_import_pob(child, sid, source, strict))
        else:
            _unexpected(child, f"slide '{sid}'", source, strict)
    if begin is None:
        raise OwlImportError(f"{source}: slide '{sid}' has no Begining element")
    if duration is None:
        raise OwlImportError(f"{source}: slide '{sid}' has no Duration element")
    if not pobs:
        raise OwlImportError(f"{source}: slide '{sid}' contains no POB")
    return Segment(
        segment_id=sid,
        title=title if title is not None else sid,
        begin=begin,
        duration=duration,
        pobs=tuple(pobs),
    )


def _parse_slide_time(text: str, what: str, sid: str, source: str) -> int:
    try:
        return parse_time(text)
    except AnnotationError as exc:
        raise OwlImportError(f"{source}: slide '{sid}' {what}: {exc}") from exc


def _import_pob(elem: ET.Element, sid: str, source: str, strict: bool) -> PedagogicalObject:
    pob_id = _ident(elem, source)
    kind = pob_kind_from_id(pob_id)
    if kind is None:
        raise OwlImportError(
            f"{source}: POB '{pob_id}' in slide '{sid}': cannot infer kind "
            f"from id prefix (known prefixes: {sorted(_POB_PREFIXES)})"
        )
    concerns: list[str] = []
    comment: str | None = None
    for child in elem:
        tag = _local(child.tag)
        if tag == "concerne":
            frag = _fragment(child, source)
            if frag not in concerns:
                concerns.append(frag)
        elif tag == "comment":
            comment = _text(child)
        else:
            _unexpected(child, f"POB '{pob_id}'", source, strict)
    if not concerns:
        raise OwlImportError(
            f"{source}: POB '{pob_id}' in slide '{sid}' concerns no concept"
        )
    return PedagogicalObject(
        pob_id=pob_id, kind=kind, concerns=tuple(concerns), comment=comment
    )
