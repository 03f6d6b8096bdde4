"""Relation inference: sameAs equivalence classes and relation closures.

The asserted edges of a domain ontology are first canonicalized through the
sameAs equivalence classes, then closed: depends symmetrically (stored as
unordered pairs), is_prerequisite transitively.  Everything downstream
(indexing, querying) works on canonical concept ids only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .errors import UnknownConceptError
from .ontology import ConceptId, DomainOntology, RelationKind, Violation

Pair = tuple[ConceptId, ConceptId]


class UnionFind:
    """Disjoint sets over concept ids, path compression + union by size."""

    def __init__(self, items: Iterable[str] = ()) -> None:
        self._parent: dict[str, str] = {}
        self._size: dict[str, int] = {}
        for item in items:
            self.add(item)

    def add(self, item: str) -> None:
        if item not in self._parent:
            self._parent[item] = item
            self._size[item] = 1

    def find(self, item: str) -> str:
        root = item
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[item] != root:
            self._parent[item], item = root, self._parent[item]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]

    def components(self) -> list[frozenset[str]]:
        groups: dict[str, set[str]] = {}
        for item in self._parent:
            groups.setdefault(self.find(item), set()).add(item)
        return [frozenset(g) for g in groups.values()]


@dataclass(frozen=True)
class InferredFacts:
    """Closure view of one domain ontology, keyed by canonical concept ids.

    ``rep_of`` maps every declared concept id to the canonical representative
    of its sameAs class (the lexicographically smallest member).  The closed
    relations only ever mention canonical ids; ``depends_closed`` stores each
    symmetric fact once as a sorted pair.
    """

    domain_id: str
    rep_of: Mapping[ConceptId, ConceptId]
    same_as_classes: Mapping[ConceptId, frozenset[ConceptId]]
    depends_closed: frozenset[Pair]
    prerequisite_closed: frozenset[Pair]
    decomposition: frozenset[Pair]
    depends_asserted: frozenset[Pair] = frozenset()
    prerequisite_asserted: frozenset[Pair] = frozenset()
    violations: tuple[Violation, ...] = ()

    def canonical(self, concept_id: ConceptId) -> ConceptId:
        rep = self.rep_of.get(concept_id)
        if rep is None:
            raise UnknownConceptError(concept_id, self.domain_id)
        return rep


def infer(ontology: DomainOntology) -> InferredFacts:
    """Compute equivalence classes and closures for one ontology.

    Any edge whose endpoints collapse to a single concept under sameAs
    canonicalization is dropped from the stored relation and reported as a
    data-quality violation; a prerequisite cycle surfacing as (c, c) in the
    transitive closure is likewise reported, never raised.
    """
    uf = UnionFind(ontology.concepts)
    for edge in ontology.edges_of_kind(RelationKind.SAME_AS):
        uf.union(edge.source, edge.target)

    classes: dict[str, frozenset[str]] = {}
    rep_of: dict[str, str] = {}
    for component in uf.components():
        rep = min(component)
        classes[rep] = component
        for member in component:
            rep_of[member] = rep

    violations: list[Violation] = []

    def canonical_pairs(kind: RelationKind) -> set[Pair]:
        pairs: set[Pair] = set()
        for edge in ontology.edges_of_kind(kind):
            a, b = rep_of[edge.source], rep_of[edge.target]
            if a == b:
                violations.append(
                    Violation(
                        "edge-collapsed",
                        f"{kind.value}({edge.source}, {edge.target}) collapses to a single "
                        f"concept '{a}' under sameAs canonicalization",
                        (edge.source, edge.target),
                    )
                )
                continue
            pairs.add((a, b))
        return pairs

    depends_asserted = canonical_pairs(RelationKind.DEPENDS)
    # Symmetric relation: one unordered pair per fact.
    depends_closed = {tuple(sorted(p)) for p in depends_asserted}

    prerequisite_asserted = canonical_pairs(RelationKind.IS_PREREQUISITE)
    prerequisite_closed = _transitive_closure(prerequisite_asserted)
    for node in sorted({a for a, b in prerequisite_closed if a == b}):
        violations.append(
            Violation(
                "prerequisite-cycle",
                f"'{node}' is reachable from itself through is_prerequisite",
                (node,),
            )
        )

    decomposition = canonical_pairs(RelationKind.IS_DECOMPOSED_INTO)

    return InferredFacts(
        domain_id=ontology.domain_id,
        rep_of=rep_of,
        same_as_classes=classes,
        depends_closed=frozenset(depends_closed),
        prerequisite_closed=frozenset(prerequisite_closed),
        decomposition=frozenset(decomposition),
        depends_asserted=frozenset(depends_asserted),
        prerequisite_asserted=frozenset(prerequisite_asserted),
        violations=tuple(violations),
    )


def _transitive_closure(edges: set[Pair]) -> set[Pair]:
    """(a, b) for every non-trivial path a -> b; includes (a, a) on cycles."""
    succ: dict[str, set[str]] = {}
    for a, b in edges:
        succ.setdefault(a, set()).add(b)

    closure: set[Pair] = set()
    for start in succ:
        seen: set[str] = set()
        frontier = list(succ[start])
        while frontier:
            node = frontier.pop()
            if node in seen:
                continue
            seen.add(node)
            frontier.extend(succ.get(node, ()))
        closure.update((start, node) for node in seen)
    return closure


def canonicalize(concept_id: ConceptId, facts: InferredFacts) -> ConceptId:
    """Map a concept id to its sameAs-class representative."""
    return facts.canonical(concept_id)


def related_concepts(
    concept_id: ConceptId,
    facts: InferredFacts,
    kinds: Iterable[RelationKind],
    *,
    directions: bool = False,
) -> set[ConceptId] | dict[ConceptId, frozenset[str]]:
    """Closure neighbours of a concept under the requested relation kinds.

    ``directions=True`` returns {concept: flags}, flags being a subset of
    {"outgoing", "incoming"}; with the symmetric kinds (sameAs, depends) a
    neighbour carries both flags.  For prerequisites "outgoing" means the
    given concept is a prerequisite of the neighbour.
    """
    me = facts.canonical(concept_id)
    kinds = set(kinds)
    found: dict[str, set[str]] = {}

    def hit(other: str, *flags: str) -> None:
        if other == concept_id:
            return
        found.setdefault(other, set()).update(flags)

    if RelationKind.SAME_AS in kinds:
        for member in facts.same_as_classes.get(me, frozenset()):
            hit(member, "outgoing", "incoming")
    if RelationKind.DEPENDS in kinds:
        for a, b in facts.depends_closed:
            if a == me:
                hit(b, "outgoing", "incoming")
            elif b == me:
                hit(a, "outgoing", "incoming")
    if RelationKind.IS_PREREQUISITE in kinds:
        for a, b in facts.prerequisite_closed:
            if a == me:
                hit(b, "outgoing")
            if b == me:
                hit(a, "incoming")
    if RelationKind.IS_DECOMPOSED_INTO in kinds:
        for a, b in facts.decomposition:
            if a == me:
                hit(b, "outgoing")
            if b == me:
                hit(a, "incoming")

    if directions:
        return {c: frozenset(f) for c, f in found.items()}
    return set(found)


def inference_report(facts: InferredFacts) -> dict[str, Any]:
    """JSON-ready report distinguishing asserted facts from deduced ones."""
    same_as = [
        {"representative": rep, "members": sorted(members)}
        for rep, members in sorted(facts.same_as_classes.items())
        if len(members) > 1
    ]

    depends: list[dict[str, str]] = []
    for a, b in sorted(facts.depends_asserted):
        depends.append({"from": a, "to": b, "status": "asserted"})
    for a, b in sorted(facts.depends_asserted):
        if (b, a) not in facts.depends_asserted:
            depends.append({"from": b, "to": a, "status": "inferred"})

    prerequisites: list[dict[str, str]] = []
    for a, b in sorted(facts.prerequisite_closed):
        status = "asserted" if (a, b) in facts.prerequisite_asserted else "inferred"
        prerequisites.append({"from": a, "to": b, "status": status})

    return {
        "domain_id": facts.domain_id,
        "same_as_classes": same_as,
        "depends": depends,
        "prerequisites": prerequisites,
        "decomposition": [
            {"from": a, "to": b, "status": "asserted"} for a, b in sorted(facts.decomposition)
        ],
        "violations": [
            {"code": v.code, "message": v.message, "subjects": list(v.subjects)}
            for v in facts.violations
        ],
    }
