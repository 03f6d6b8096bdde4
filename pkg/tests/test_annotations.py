import copy
import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from segsearch.annotations import (
    PobKind,
    SegmentRef,
    build_corpus,
    canonicalize_corpus,
    course_from_dict,
    course_to_dict,
    format_time,
    parse_annotation,
    parse_time,
)
from segsearch.errors import AnnotationError, ParseError
from segsearch.inference import infer
from segsearch.ontology import DomainOntology, RelationEdge, RelationKind


class TestTimeLiterals:
    @pytest.mark.parametrize(
        "text,seconds",
        [
            ("00:00:00", 0),
            ("00:02:01", 121),
            ("00:03:22", 202),
            ("01:00:00", 3600),
            ("10:59:59", 39599),
            ("100:00:01", 360001),  # hour field may grow beyond two digits
            ("00:02:01 ", 121),  # surrounding whitespace tolerated (XML text nodes)
        ],
    )
    def test_parse(self, text, seconds):
        assert parse_time(text) == seconds

    @pytest.mark.parametrize(
        "bad",
        ["", "1:02:03", "00:60:00", "00:00:61", "00:02", "0:0:0", "00:02:01.5",
         "-00:01:00", "a:b:c"],
    )
    def test_reject(self, bad):
        with pytest.raises(AnnotationError):
            parse_time(bad)

    def test_format(self):
        assert format_time(121) == "00:02:01"
        assert format_time(0) == "00:00:00"
        assert format_time(360001) == "100:00:01"

    @given(st.integers(min_value=0, max_value=999999))
    def test_round_trip(self, seconds):
        assert parse_time(format_time(seconds)) == seconds


def course_doc():
    return {
        "course_id": "prog1",
        "title": "Programmation 1",
        "domain_id": "structure_de_donnee",
        "lessons": [
            {
                "lesson_id": "fonction",
                "title": "Les fonctions",
                "url": "http://videos.example/fonction.wmv",
                "language": "fr",
                "segments": [
                    {
                        "segment_id": "slide_2",
                        "title": "introduction au fonction",
                        "begin": "00:02:01",
                        "duration": "00:03:22",
                        "pobs": [
                            {
                                "pob_id": "definition_1",
                                "kind": "definition",
                                "concerns": ["adresse", "fonction"],
                            },
                            {
                                "pob_id": "exemple_1",
                                "kind": "example",
                                "concerns": ["valeur_retournee"],
                                "comment": "differents type de valeurs retournee",
                            },
                        ],
                    },
                    {
                        "segment_id": "slide_9",
                        "title": "parametres",
                        "begin": "00:06:00",
                        "duration": "00:01:30",
                        "pobs": [
                            {
                                "pob_id": "exercise_1",
                                "kind": "exercise",
                                "concerns": ["parametre_formel"],
                            }
                        ],
                    },
                ],
            }
        ],
    }


class TestCourseParsing:
    def test_happy_path(self):
        course = course_from_dict(course_doc())
        assert course.course_id == "prog1"
        assert course.domain_id == "structure_de_donnee"
        (lesson,) = course.lessons
        assert lesson.language == "fr"
        seg = lesson.segments[0]
        assert (seg.segment_id, seg.begin, seg.duration) == ("slide_2", 121, 202)
        assert seg.end == 323
        assert seg.concept_ids() == {"adresse", "fonction", "valeur_retournee"}
        assert seg.pobs[0].kind is PobKind.DEFINITION
        assert seg.pobs[0].comment is None
        assert seg.pobs[1].comment == "differents type de valeurs retournee"

    def test_segments_sorted_by_begin(self):
        doc = course_doc()
        doc["lessons"][0]["segments"].reverse()
        course = course_from_dict(doc)
        ids = [s.segment_id for s in course.lessons[0].segments]
        assert ids == ["slide_2", "slide_9"]

    def test_overlap_rejected_naming_both(self):
        doc = course_doc()
        doc["lessons"][0]["segments"][1]["begin"] = "00:03:00"  # inside slide_2
        with pytest.raises(AnnotationError, match="slide_2.*slide_9.*overlap"):
            course_from_dict(doc)

    def test_touching_segments_allowed(self):
        doc = course_doc()
        doc["lessons"][0]["segments"][1]["begin"] = "00:05:23"  # == slide_2.end
        course = course_from_dict(doc)
        assert course.lessons[0].segments[1].begin == 323

    def test_zero_duration_rejected(self):
        doc = course_doc()
        doc["lessons"][0]["segments"][0]["duration"] = "00:00:00"
        with pytest.raises(AnnotationError, match="zero duration"):
            course_from_dict(doc)

    def test_empty_pobs_rejected(self):
        doc = course_doc()
        doc["lessons"][0]["segments"][0]["pobs"] = []
        with pytest.raises(AnnotationError, match="no pedagogical objects"):
            course_from_dict(doc)

    def test_empty_concerns_rejected(self):
        doc = course_doc()
        doc["lessons"][0]["segments"][0]["pobs"][0]["concerns"] = []
        with pytest.raises(AnnotationError, match="non-empty list of concept ids"):
            course_from_dict(doc)

    def test_unknown_kind_named(self):
        doc = course_doc()
        doc["lessons"][0]["segments"][0]["pobs"][0]["kind"] = "quizz"
        with pytest.raises(AnnotationError, match="unknown kind 'quizz'"):
            course_from_dict(doc)

    def test_duplicate_segment_id(self):
        doc = course_doc()
        doc["lessons"][0]["segments"][1]["segment_id"] = "slide_2"
        with pytest.raises(AnnotationError, match="duplicate segment id 'slide_2'"):
            course_from_dict(doc)

    def test_zero_segment_lesson_warns_but_loads(self, caplog):
        doc = course_doc()
        doc["lessons"].append(
            {
                "lesson_id": "vide",
                "title": "Sans segments",
                "url": "http://videos.example/vide.wmv",
                "language": "fr",
                "segments": [],
            }
        )
        with caplog.at_level("WARNING"):
            course = course_from_dict(doc)
        assert len(course.lessons) == 2
        assert any("'vide' has no segments" in rec.message for rec in caplog.records)

    def test_unknown_key_strict_vs_lenient(self, caplog):
        doc = course_doc()
        doc["lessons"][0]["segments"][0]["speaker"] = "prof"
        with pytest.raises(ParseError, match="speaker"):
            course_from_dict(doc)
        with caplog.at_level("WARNING"):
            course = course_from_dict(doc, strict=False)
        assert course.course_id == "prog1"

    def test_parse_annotation_stream(self):
        course = parse_annotation(io.StringIO(json.dumps(course_doc())))
        assert course.course_id == "prog1"

    def test_round_trip(self):
        course = course_from_dict(course_doc())
        assert course_from_dict(course_to_dict(course)) == course

    def test_to_dict_times_are_literals(self):
        data = course_to_dict(course_from_dict(course_doc()))
        seg = data["lessons"][0]["segments"][0]
        assert seg["begin"] == "00:02:01"
        assert seg["duration"] == "00:03:22"
        assert "comment" not in seg["pobs"][0]
        assert seg["pobs"][1]["comment"] == "differents type de valeurs retournee"


def tiny_ontology(concepts, edges=()):
    return DomainOntology(
        domain_id="structure_de_donnee",
        label="Structures",
        concepts={c: c for c in concepts},
        edges=tuple(RelationEdge(kind=k, source=a, target=b) for k, a, b in edges),
    )


class TestOntologyCrossChecks:
    def test_concern_must_be_declared(self):
        ontology = tiny_ontology(["adresse", "fonction", "parametre_formel"])
        with pytest.raises(AnnotationError, match="valeur_retournee"):
            course_from_dict(
                course_doc(), ontologies={"structure_de_donnee": ontology}
            )

    def test_domain_must_be_known(self):
        ontology = tiny_ontology(["adresse"])
        with pytest.raises(AnnotationError, match="unknown domain 'structure_de_donnee'"):
            course_from_dict(course_doc(), ontologies={"autre": ontology})

    def test_all_declared_passes(self):
        ontology = tiny_ontology(
            ["adresse", "fonction", "valeur_retournee", "parametre_formel"]
        )
        course = course_from_dict(
            course_doc(), ontologies={"structure_de_donnee": ontology}
        )
        assert course.course_id == "prog1"


class TestCorpus:
    def test_lookups(self):
        corpus = build_corpus([course_from_dict(course_doc())])
        assert corpus.lesson("fonction").title == "Les fonctions"
        assert corpus.lesson_domain("fonction") == "structure_de_donnee"
        ref = SegmentRef("fonction", "slide_9")
        assert corpus.segment(ref).title == "parametres"
        assert corpus.domain_ids() == {"structure_de_donnee"}
        with pytest.raises(KeyError):
            corpus.lesson("nope")
        with pytest.raises(KeyError):
            corpus.segment(SegmentRef("fonction", "nope"))

    def test_duplicate_lesson_ids_across_courses(self):
        a = course_from_dict(course_doc())
        doc = course_doc()
        doc["course_id"] = "prog2"
        b = course_from_dict(doc)
        with pytest.raises(
            AnnotationError,
            match="lesson id 'fonction' appears in both course 'prog1' and course 'prog2'",
        ):
            build_corpus([a, b])

    def test_segment_ref_ordering(self):
        refs = [SegmentRef("b", "s1"), SegmentRef("a", "s2"), SegmentRef("a", "s1")]
        assert sorted(refs) == [
            SegmentRef("a", "s1"), SegmentRef("a", "s2"), SegmentRef("b", "s1"),
        ]


class TestCanonicalization:
    def setup_method(self):
        self.ontology = tiny_ontology(
            ["boucle", "instruction_de_repetition", "adresse", "fonction",
             "valeur_retournee", "parametre_formel"],
            [(RelationKind.SAME_AS, "boucle", "instruction_de_repetition")],
        )
        self.facts = {"structure_de_donnee": infer(self.ontology)}

    def corpus_with_concerns(self, concerns):
        doc = course_doc()
        doc["lessons"][0]["segments"][0]["pobs"][0]["concerns"] = list(concerns)
        return build_corpus([course_from_dict(doc)])

    def test_twin_ids_map_to_representative(self):
        corpus = canonicalize_corpus(
            self.corpus_with_concerns(["instruction_de_repetition", "adresse"]),
            self.facts,
        )
        pob = corpus.segment(SegmentRef("fonction", "slide_2")).pobs[0]
        assert pob.concerns == ("boucle", "adresse")

    def test_duplicates_collapse_keeping_first_position(self):
        corpus = canonicalize_corpus(
            self.corpus_with_concerns(
                ["boucle", "adresse", "instruction_de_repetition"]
            ),
            self.facts,
        )
        pob = corpus.segment(SegmentRef("fonction", "slide_2")).pobs[0]
        assert pob.concerns == ("boucle", "adresse")

    def test_idempotent(self):
        once = canonicalize_corpus(
            self.corpus_with_concerns(["instruction_de_repetition"]), self.facts
        )
        twice = canonicalize_corpus(once, self.facts)
        assert once == twice

    def test_missing_domain_facts(self):
        corpus = self.corpus_with_concerns(["adresse"])
        with pytest.raises(AnnotationError, match="no inferred facts"):
            canonicalize_corpus(corpus, {})

    def test_everything_else_is_preserved(self):
        original = self.corpus_with_concerns(["adresse"])
        mapped = canonicalize_corpus(original, self.facts)
        assert copy.deepcopy(original) == mapped


def test_demo_corpus_shape(demo_corpus):
    assert len(demo_corpus.documents) == 9
    lengths = {d.lesson_id: len(d.segments) for d in demo_corpus.documents}
    assert lengths == {
        "D1": 8, "D2": 5, "D3": 6, "D4": 14, "D5": 12,
        "D6": 13, "D7": 4, "D8": 16, "D9": 6,
    }
    # canonicalized: no twin ids remain anywhere
    for doc in demo_corpus.documents:
        for seg in doc.segments:
            assert "instruction_de_repetition" not in seg.concept_ids()
            assert "structure" not in seg.concept_ids()
