"""A small built-in teaching corpus used by tests, scripts and demos.

One domain ("structure_de_donnee"), one course, nine lesson videos D1..D9
with a known distribution of the concepts ``pointeur`` and
``parametre_formel``; every other segment carries rotating filler concepts so
that no weight degenerates to zero by accident.  The layout is deliberately
deterministic: building the corpus twice gives equal objects, and the derived
index statistics are stable targets for the regression suite.
"""

from __future__ import annotations

import json
from pathlib import Path

from .annotations import (
    AnnotatedCorpus,
    PedagogicalObject,
    PobKind,
    Segment,
    VideoCourse,
    VideoLesson,
    build_corpus,
    course_to_dict,
)
from .ontology import DomainOntology, RelationEdge, RelationKind, ontology_to_dict, validate_ontology

DEMO_DOMAIN_ID = "structure_de_donnee"

_CONCEPTS = {
    "adresse": "Adresse memoire",
    "affectation": "Affectation",
    "arbre": "Arbre",
    "boucle": "Boucle",
    "champ": "Champ",
    "enregistrement": "Enregistrement",
    "file": "File",
    "fonction": "Fonction",
    "instruction": "Instruction",
    "instruction_de_controle": "Instruction de controle",
    "instruction_de_repetition": "Instruction de repetition",
    "liste": "Liste",
    "parametre": "Parametre",
    "parametre_formel": "Parametre formel",
    "passage_parametre_par_valeur": "Passage de parametre par valeur",
    "pile": "Pile",
    "pointeur": "Pointeur",
    "recursivite": "Recursivite",
    "structure": "Structure",
    "tableau": "Tableau",
    "valeur_retournee": "Valeur retournee",
    "variable": "Variable",
}

_EDGES = [
    (RelationKind.IS_DECOMPOSED_INTO, "fonction", "parametre"),
    (RelationKind.IS_DECOMPOSED_INTO, "fonction", "valeur_retournee"),
    (RelationKind.IS_DECOMPOSED_INTO, "parametre", "parametre_formel"),
    (RelationKind.IS_DECOMPOSED_INTO, "instruction", "affectation"),
    (RelationKind.IS_DECOMPOSED_INTO, "instruction", "instruction_de_controle"),
    (RelationKind.IS_DECOMPOSED_INTO, "instruction", "instruction_de_repetition"),
    (RelationKind.IS_DECOMPOSED_INTO, "enregistrement", "champ"),
    (RelationKind.DEPENDS, "passage_parametre_par_valeur", "fonction"),
    (RelationKind.DEPENDS, "tableau", "variable"),
    (RelationKind.IS_PREREQUISITE, "pointeur", "liste"),
    (RelationKind.IS_PREREQUISITE, "liste", "arbre"),
    (RelationKind.IS_PREREQUISITE, "variable", "fonction"),
    (RelationKind.SAME_AS, "boucle", "instruction_de_repetition"),
    (RelationKind.SAME_AS, "enregistrement", "structure"),
]

# (lesson id, title, number of segments)
_LESSONS = [
    ("D1", "Variables et types", 8),
    ("D2", "Instructions et boucles", 5),
    ("D3", "Tableaux", 6),
    ("D4", "Fonctions", 14),
    ("D5", "Pointeurs et adresses", 12),
    ("D6", "Listes chainees", 13),
    ("D7", "Enregistrements", 4),
    ("D8", "Pointeurs avances", 16),
    ("D9", "Arbres", 6),
]

# Which segments of which lesson mention 'pointeur', and how many POBs do.
_POINTEUR_CF = {
    "D1": {7: 1},
    "D4": {1: 1},
    "D5": {5: 1, 12: 1},
    "D6": {2: 1, 8: 1},
    "D8": {1: 1, 2: 1, 3: 1, 4: 1, 5: 1, 6: 1, 7: 1, 8: 1, 9: 6, 10: 1, 14: 1},
    "D9": {4: 1},
}
_PARAMETRE_FORMEL_CF = {"D4": {2: 1, 9: 1}}

# Filler concepts rotate over segments; none of them may cover all nine
# lessons or a whole lesson, which keeps every filler weight strictly
# positive (checked in the test suite).
_FILLERS = [
    "fonction",
    "liste",
    "tableau",
    "variable",
    "boucle",
    "recursivite",
    "pile",
    "file",
    "enregistrement",
]

_KINDS = list(PobKind)


def build_demo_ontology() -> DomainOntology:
    ontology = DomainOntology(
        domain_id=DEMO_DOMAIN_ID,
        label="Structure de donnees",
        concepts=dict(_CONCEPTS),
        edges=tuple(
            RelationEdge(kind=k, source=a, target=b) for k, a, b in _EDGES
        ),
    )
    violations = validate_ontology(ontology)
    assert not violations, violations
    return ontology


def _segment(lesson_no: int, lesson_id: str, seg_no: int) -> Segment:
    pobs: list[PedagogicalObject] = []
    counter = 0

    def add(kind: PobKind, concerns: list[str], comment: str | None = None) -> None:
        nonlocal counter
        counter += 1
        pobs.append(
            PedagogicalObject(
                pob_id=f"{kind.value}_{seg_no}_{counter}",
                kind=kind,
                concerns=tuple(concerns),
                comment=comment,
            )
        )

    pointeur_cf = _POINTEUR_CF.get(lesson_id, {}).get(seg_no, 0)
    pf_cf = _PARAMETRE_FORMEL_CF.get(lesson_id, {}).get(seg_no, 0)
    pure_pointeur = lesson_id == "D8" and seg_no == 9

    if not pure_pointeur:
        filler = _FILLERS[(lesson_no + seg_no) % len(_FILLERS)]
        comment = (
            "rappel rapide en debut de segment"
            if (lesson_no + seg_no) % 5 == 0
            else None
        )
        add(_KINDS[(lesson_no + seg_no) % len(_KINDS)], [filler], comment)
    for i in range(pointeur_cf):
        add(_KINDS[i % 6], ["pointeur"])
    for _ in range(pf_cf):
        add(PobKind.DEFINITION, ["parametre_formel"])
    if lesson_id == "D2" and seg_no == 1:
        # Exercises the sameAs rewrite: canonicalizes to 'boucle'.
        add(PobKind.EXAMPLE, ["instruction_de_repetition"])

    return Segment(
        segment_id=f"S{seg_no}",
        title=f"partie {seg_no}",
        begin=(seg_no - 1) * 200,
        duration=180,
        pobs=tuple(pobs),
    )


def build_demo_course() -> VideoCourse:
    lessons = []
    for lesson_no, (lesson_id, title, n_segments) in enumerate(_LESSONS, start=1):
        lessons.append(
            VideoLesson(
                lesson_id=lesson_id,
                title=title,
                url=f"http://videos.example/cours/{lesson_id}.wmv",
                language="fr",
                segments=tuple(
                    _segment(lesson_no, lesson_id, seg_no)
                    for seg_no in range(1, n_segments + 1)
                ),
            )
        )
    return VideoCourse(
        course_id="prog1",
        title="Programmation 1 — structures de donnees",
        domain_id=DEMO_DOMAIN_ID,
        lessons=tuple(lessons),
    )


def build_demo_corpus() -> AnnotatedCorpus:
    return build_corpus([build_demo_course()])


def write_demo_data(directory: str | Path) -> dict[str, Path]:
    """Write the demo ontology and course as canonical JSON files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ontology_path = directory / "ontology_structure_de_donnee.json"
    course_path = directory / "course_prog1.json"
    ontology_path.write_text(
        json.dumps(ontology_to_dict(build_demo_ontology()), indent=2, ensure_ascii=False)
        + "\n",
        encoding="utf-8",
    )
    course_path.write_text(
        json.dumps(course_to_dict(build_demo_course()), indent=2, ensure_ascii=False)
        + "\n",
        encoding="utf-8",
    )
    return {"ontology": ontology_path, "course": course_path}
