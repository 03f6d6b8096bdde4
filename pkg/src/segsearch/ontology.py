"""Domain ontologies: concepts, typed relations, validation, and the concept tree.

A teaching domain is modelled as a set of concepts plus directed, typed edges.
Four relation kinds exist; only decomposition is hierarchical and it must stay
acyclic, which is what makes the unfolded concept tree well defined.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Any, Iterable, Mapping

from .errors import OntologyError, ParseError

log = logging.getLogger(__name__)

ConceptId = str


class RelationKind(enum.Enum):
    """The four semantic relations a domain ontology may assert."""

    IS_DECOMPOSED_INTO = "is_decomposed_into"
    DEPENDS = "depends"
    IS_PREREQUISITE = "is_prerequisite"
    SAME_AS = "same_as"


@dataclass(frozen=True)
class RelationEdge:
    """One directed, typed assertion between two concepts."""

    kind: RelationKind
    source: ConceptId
    target: ConceptId


@dataclass(frozen=True)
class DomainOntology:
    """All concepts and relation assertions of one teaching domain.

    ``concepts`` maps concept id to display label.  Instances are treated as
    immutable after load; every derived structure (closures, trees, indexes)
    is computed from a snapshot of this object.
    """

    domain_id: str
    label: str
    concepts: Mapping[ConceptId, str]
    edges: tuple[RelationEdge, ...]

    def edges_of_kind(self, kind: RelationKind) -> tuple[RelationEdge, ...]:
        return tuple(e for e in self.edges if e.kind is kind)


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by :func:`validate_ontology`."""

    code: str
    message: str
    subjects: tuple[str, ...] = ()

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return f"[{self.code}] {self.message}"


@dataclass(frozen=True)
class TreeNode:
    """A node of the unfolded decomposition tree."""

    concept_id: ConceptId
    label: str
    children: tuple["TreeNode", ...] = ()


_ONTOLOGY_KEYS = {"domain_id", "label", "concepts", "edges"}
_KIND_BY_NAME = {k.value: k for k in RelationKind}


def _read_source(source: str | Path | IO[str]) -> tuple[str, str]:
    """Return (text, display name) for a path or an open text stream."""
    if hasattr(source, "read"):
        name = getattr(source, "name", "<stream>")
        return source.read(), str(name)
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


def ontology_from_dict(
    data: Mapping[str, Any], *, strict: bool = True, source: str = "<dict>"
) -> DomainOntology:
    """Build a :class:`DomainOntology` from already-decoded JSON data.

    Structural problems (wrong shapes, duplicate ids, unknown relation kinds)
    raise immediately; semantic invariants are then enforced by running
    :func:`validate_ontology` and raising on any violation.
    """
    if not isinstance(data, Mapping):
        raise ParseError("ontology document must be a JSON object", source=source)
    _check_unknown_keys(data, _ONTOLOGY_KEYS, "ontology document", source, strict)
    domain_id = _require(data, "domain_id", str, "ontology document", source)
    label = _require(data, "label", str, "ontology document", source)

    concepts: dict[str, str] = {}
    for i, entry in enumerate(_require(data, "concepts", list, "ontology document", source)):
        where = f"concepts[{i}]"
        if not isinstance(entry, Mapping):
            raise ParseError(f"{where} must be an object", source=source)
        _check_unknown_keys(entry, {"id", "label"}, where, source, strict)
        cid = _require(entry, "id", str, where, source)
        clabel = _require(entry, "label", str, where, source)
        if cid in concepts:
            raise OntologyError(f"{source}: duplicate concept id '{cid}'")
        concepts[cid] = clabel

    edges: list[RelationEdge] = []
    for i, entry in enumerate(_require(data, "edges", list, "ontology document", source)):
        where = f"edges[{i}]"
        if not isinstance(entry, Mapping):
            raise ParseError(f"{where} must be an object", source=source)
        _check_unknown_keys(entry, {"kind", "from", "to"}, where, source, strict)
        kind_name = _require(entry, "kind", str, where, source)
        kind = _KIND_BY_NAME.get(kind_name)
        if kind is None:
            raise ParseError(
                f"{where}: unknown relation kind '{kind_name}' "
                f"(expected one of {sorted(_KIND_BY_NAME)})",
                source=source,
            )
        edges.append(
            RelationEdge(
                kind=kind,
                source=_require(entry, "from", str, where, source),
                target=_require(entry, "to", str, where, source),
            )
        )

    ontology = DomainOntology(
        domain_id=domain_id, label=label, concepts=concepts, edges=tuple(edges)
    )
    violations = validate_ontology(ontology)
    if violations:
        lines = "; ".join(str(v) for v in violations)
        raise OntologyError(f"{source}: invalid ontology: {lines}")
    return ontology


def load_domain_ontology(source: str | Path | IO[str], *, strict: bool = True) -> DomainOntology:
    """Load and validate one domain ontology from its canonical JSON form."""
    text, name = _read_source(source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, source=name, line=exc.lineno, column=exc.colno) from exc
    return ontology_from_dict(data, strict=strict, source=name)


def ontology_to_dict(ontology: DomainOntology) -> dict[str, Any]:
    """Serialize to the canonical JSON structure (deterministic ordering)."""
    return {
        "domain_id": ontology.domain_id,
        "label": ontology.label,
        "concepts": [
            {"id": cid, "label": ontology.concepts[cid]} for cid in sorted(ontology.concepts)
        ],
        "edges": [
            {"kind": e.kind.value, "from": e.source, "to": e.target}
            for e in sorted(
                ontology.edges, key=lambda e: (e.kind.value, e.source, e.target)
            )
        ],
    }


def validate_ontology(ontology: DomainOntology) -> list[Violation]:
    """Check every structural invariant; empty result means the ontology is valid.

    The checks: ids are non-empty and free of surrounding whitespace, every
    edge endpoint is a declared concept, no hierarchical/prerequisite
    self-loops, no duplicate (kind, from, to) triple, and the decomposition
    relation is acyclic (anti-symmetry enforced as full acyclicity).
    """
    violations: list[Violation] = []

    for cid in ontology.concepts:
        if not cid or cid != cid.strip():
            violations.append(
                Violation("bad-concept-id", f"concept id {cid!r} is empty or padded", (cid,))
            )
    if not ontology.domain_id or ontology.domain_id != ontology.domain_id.strip():
        violations.append(
            Violation("bad-domain-id", f"domain id {ontology.domain_id!r} is empty or padded")
        )

    seen: set[tuple[RelationKind, str, str]] = set()
    for edge in ontology.edges:
        for endpoint in (edge.source, edge.target):
            if endpoint not in ontology.concepts:
                violations.append(
                    Violation(
                        "unknown-concept",
                        f"edge {edge.kind.value}({edge.source}, {edge.target}) references "
                        f"undeclared concept '{endpoint}'",
                        (endpoint,),
                    )
                )
        if edge.source == edge.target and edge.kind in (
            RelationKind.IS_DECOMPOSED_INTO,
            RelationKind.IS_PREREQUISITE,
        ):
            violations.append(
                Violation(
                    "self-loop",
                    f"{edge.kind.value} self-loop on '{edge.source}'",
                    (edge.source,),
                )
            )
        triple = (edge.kind, edge.source, edge.target)
        if triple in seen:
            violations.append(
                Violation(
                    "duplicate-edge",
                    f"duplicate edge {edge.kind.value}({edge.source}, {edge.target})",
                    (edge.source, edge.target),
                )
            )
        seen.add(triple)

    cycle = _find_decomposition_cycle(ontology)
    if cycle:
        violations.append(
            Violation(
                "decomposition-cycle",
                "decomposition cycle: " + " -> ".join(cycle),
                tuple(cycle),
            )
        )
    return violations


def _find_decomposition_cycle(ontology: DomainOntology) -> list[str] | None:
    """Return one cycle of the is_decomposed_into graph, or None when acyclic."""
    children: dict[str, list[str]] = {}
    for edge in ontology.edges_of_kind(RelationKind.IS_DECOMPOSED_INTO):
        children.setdefault(edge.source, []).append(edge.target)

    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    stack: list[str] = []

    def visit(node: str) -> list[str] | None:
        color[node] = GREY
        stack.append(node)
        for child in children.get(node, ()):
            state = color.get(child, WHITE)
            if state == GREY:
                return stack[stack.index(child):] + [child]
            if state == WHITE:
                found = visit(child)
                if found:
                    return found
        stack.pop()
        color[node] = BLACK
        return None

    for node in sorted(children):
        if color.get(node, WHITE) == WHITE:
            found = visit(node)
            if found:
                return found
    return None


def concept_tree(ontology: DomainOntology) -> tuple[TreeNode, ...]:
    """Unfold the decomposition DAG into a forest of display trees.

    Roots are the concepts with no incoming is_decomposed_into edge; a concept
    reachable from several parents appears once under each of them.  Siblings
    (and roots) are ordered by label, ties broken by id, so the rendering is
    deterministic.  Requires a valid (acyclic) ontology.
    """
    cycle = _find_decomposition_cycle(ontology)
    if cycle:
        raise OntologyError(
            f"cannot unfold concept tree of '{ontology.domain_id}': "
            "decomposition cycle " + " -> ".join(cycle)
        )

    children: dict[str, list[str]] = {cid: [] for cid in ontology.concepts}
    has_parent: set[str] = set()
    for edge in ontology.edges_of_kind(RelationKind.IS_DECOMPOSED_INTO):
        if edge.source in children and edge.target in ontology.concepts:
            children[edge.source].append(edge.target)
            has_parent.add(edge.target)

    def sort_key(cid: str) -> tuple[str, str]:
        return (ontology.concepts.get(cid, cid), cid)

    memo: dict[str, TreeNode] = {}

    def build(cid: str) -> TreeNode:
        if cid in memo:
            return memo[cid]
        node = TreeNode(
            concept_id=cid,
            label=ontology.concepts.get(cid, cid),
            children=tuple(build(c) for c in sorted(set(children[cid]), key=sort_key)),
        )
        memo[cid] = node
        return node

    roots = sorted((c for c in ontology.concepts if c not in has_parent), key=sort_key)
    return tuple(build(c) for c in roots)


def tree_to_dict(node: TreeNode) -> dict[str, Any]:
    """Nested {id, label, children} form used by the service and CLI."""
    return {
        "id": node.concept_id,
        "label": node.label,
        "children": [tree_to_dict(c) for c in node.children],
    }


def format_tree(roots: Iterable[TreeNode], indent: str = "  ") -> str:
    """Plain-text indented rendering of a concept forest."""
    lines: list[str] = []

    def walk(node: TreeNode, depth: int) -> None:
        lines.append(f"{indent * depth}{node.label} ({node.concept_id})")
        for child in node.children:
            walk(child, depth + 1)

    for root in roots:
        walk(root, 0)
    return "\n".join(lines)
