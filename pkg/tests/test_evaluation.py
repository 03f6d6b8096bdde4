import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segsearch import evaluation
from segsearch.annotations import PobKind, SegmentRef
from segsearch.errors import ParseError, SegSearchError
from segsearch.ontology import RelationKind
from segsearch.search import make_query, search


def ref(lid, sid):
    return SegmentRef(lid, sid)


class TestPrecisionRecall:
    def test_worked_example(self):
        # two returned, one of them the single relevant segment
        metrics = evaluation.precision_recall(
            [ref("d1", "s1"), ref("d1", "s2")], {ref("d1", "s1")}
        )
        assert metrics.precision == 0.5
        assert metrics.recall == 1.0
        assert metrics.hits == 1
        assert not metrics.vacuous_precision
        assert metrics.recall_defined

    def test_empty_returned_is_vacuous_precision(self):
        metrics = evaluation.precision_recall([], {ref("d1", "s1")})
        assert metrics.precision == 1.0
        assert metrics.vacuous_precision
        assert metrics.recall == 0.0

    def test_empty_relevant_leaves_recall_undefined(self):
        metrics = evaluation.precision_recall([ref("d1", "s1")], set())
        assert metrics.recall is None
        assert not metrics.recall_defined
        assert metrics.precision == 0.0

    def test_duplicates_in_returned_collapse(self):
        metrics = evaluation.precision_recall(
            [ref("d1", "s1"), ref("d1", "s1")], {ref("d1", "s1")}
        )
        assert metrics.returned == 1
        assert metrics.precision == 1.0

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from("123")), max_size=6),
        st.sets(st.tuples(st.sampled_from("abc"), st.sampled_from("123")), max_size=6),
    )
    def test_bounds(self, returned_pairs, relevant_pairs):
        returned = [ref(a, b) for a, b in returned_pairs]
        relevant = {ref(a, b) for a, b in relevant_pairs}
        metrics = evaluation.precision_recall(returned, relevant)
        assert 0.0 <= metrics.precision <= 1.0
        if metrics.recall is not None:
            assert 0.0 <= metrics.recall <= 1.0
        assert metrics.hits <= min(metrics.returned, metrics.relevant) or metrics.relevant == 0


class TestPrecisionAtK:
    def test_divides_by_k_not_returned(self):
        returned = [ref("d1", "s1")]
        assert evaluation.precision_at_k(returned, {ref("d1", "s1")}, 1) == 1.0
        # only one result returned, still divided by k=5
        assert evaluation.precision_at_k(returned, {ref("d1", "s1")}, 5) == 0.2

    def test_counts_only_the_prefix(self):
        returned = [ref("d1", "s1"), ref("d1", "s2"), ref("d2", "s1")]
        relevant = {ref("d2", "s1")}
        assert evaluation.precision_at_k(returned, relevant, 2) == 0.0
        assert evaluation.precision_at_k(returned, relevant, 3) == pytest.approx(1 / 3)

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            evaluation.precision_at_k([], set(), 0)


class TestQrels:
    def test_parse(self):
        text = (
            "# comment line\n"
            "q1\tD6\tS2\n"
            "q1\tD8\tS9\n"
            "\n"
            "q2\tD4\tS2\n"
        )
        relevant = evaluation.load_qrels(io.StringIO(text))
        assert relevant == {
            "q1": frozenset({ref("D6", "S2"), ref("D8", "S9")}),
            "q2": frozenset({ref("D4", "S2")}),
        }

    def test_bad_line(self):
        with pytest.raises(ParseError, match="query_id<TAB>lesson_id<TAB>segment_id"):
            evaluation.load_qrels(io.StringIO("q1 D6 S2\n"))

    def test_unknown_segment_rejected_at_validation(self, demo_corpus, demo_facts):
        judgments = evaluation.RelevanceJudgments(
            queries={
                "q1": make_query("structure_de_donnee", ["pointeur"], demo_facts)
            },
            relevant={"q1": frozenset({ref("D999", "S1")})},
        )
        with pytest.raises(SegSearchError, match="unknown segment D999/S1"):
            judgments.validate_against(demo_corpus)


class TestManifest:
    def manifest(self, entries):
        return io.StringIO(json.dumps({"queries": entries}))

    def test_parse(self, demo_facts):
        queries = evaluation.load_query_manifest(
            self.manifest([
                {
                    "query_id": "q1",
                    "domain_id": "structure_de_donnee",
                    "concepts": ["pointeur"],
                    "pob": "definition",
                    "top": 5,
                },
                {
                    "query_id": "q2",
                    "domain_id": "structure_de_donnee",
                    "concepts": ["instruction_de_repetition"],
                    "expand": ["is_prerequisite"],
                },
            ]),
            {"structure_de_donnee": demo_facts},
        )
        assert queries["q1"].pob_filter is PobKind.DEFINITION
        assert queries["q1"].max_results == 5
        # twin id canonicalized at construction
        assert queries["q2"].concepts == frozenset({"boucle"})
        assert queries["q2"].expand == frozenset({RelationKind.IS_PREREQUISITE})

    def test_unknown_domain(self, demo_facts):
        with pytest.raises(SegSearchError, match="unknown domain 'autre'"):
            evaluation.load_query_manifest(
                self.manifest([
                    {"query_id": "q1", "domain_id": "autre", "concepts": ["x"]}
                ]),
                {"structure_de_donnee": demo_facts},
            )

    def test_duplicate_query_id(self, demo_facts):
        entry = {
            "query_id": "q1",
            "domain_id": "structure_de_donnee",
            "concepts": ["pointeur"],
        }
        with pytest.raises(ParseError, match="duplicate query_id 'q1'"):
            evaluation.load_query_manifest(
                self.manifest([entry, dict(entry)]),
                {"structure_de_donnee": demo_facts},
            )

    def test_not_an_object(self, demo_facts):
        with pytest.raises(ParseError, match="'queries' list"):
            evaluation.load_query_manifest(io.StringIO("[]"), {})


class TestEvaluateRun:
    def judged(self, demo_facts, extra=None):
        queries = {
            "q_pointeur": make_query(
                "structure_de_donnee", ["pointeur"], demo_facts, max_results=10
            ),
            "q_pf": make_query(
                "structure_de_donnee", ["parametre_formel"], demo_facts
            ),
        }
        if extra:
            queries.update(extra)
        relevant = {
            "q_pointeur": frozenset({ref("D8", "S9"), ref("D6", "S2")}),
            "q_pf": frozenset({ref("D4", "S2")}),
        }
        return evaluation.RelevanceJudgments(queries=queries, relevant=relevant)

    def test_end_to_end(self, demo_corpus, demo_index, demo_facts):
        table = evaluation.evaluate_run(
            self.judged(demo_facts), demo_index, demo_corpus, k_values=(1, 5)
        )
        rows = {row.query_id: row for row in table.rows}
        # (D8,S9) is the top pointeur hit, so P@1 = 1.0
        assert rows["q_pointeur"].at_k[1] == 1.0
        assert rows["q_pointeur"].metrics.recall is not None
        # parametre_formel: both indexed segments are in D4; S2 is judged
        pf = rows["q_pf"].metrics
        assert pf.relevant == 1
        assert pf.hits == 1
        assert pf.recall == 1.0
        assert table.macro_precision == pytest.approx(
            (rows["q_pointeur"].metrics.precision + pf.precision) / 2
        )

    def test_rows_sorted_by_query_id(self, demo_corpus, demo_index, demo_facts):
        table = evaluation.evaluate_run(
            self.judged(demo_facts), demo_index, demo_corpus
        )
        ids = [row.query_id for row in table.rows]
        assert ids == sorted(ids)

    def test_recall_monotone_in_max_results(self, demo_corpus, demo_index, demo_facts):
        relevant = frozenset({ref("D8", "S9"), ref("D6", "S2"), ref("D1", "S7")})
        recalls = []
        for top in (1, 3, 5, 10, 18):
            query = make_query(
                "structure_de_donnee", ["pointeur"], demo_facts, max_results=top
            )
            results = search(query, demo_index, demo_corpus, facts=demo_facts)
            metrics = evaluation.precision_recall(
                [r.segment for r in results], relevant
            )
            recalls.append(metrics.recall)
        assert recalls == sorted(recalls)
        assert recalls[-1] == 1.0

    def test_failing_query_gets_error_row(self, demo_corpus, demo_index, demo_facts):
        # expansion requested but facts withheld from evaluate_run
        bad = make_query(
            "structure_de_donnee", ["pointeur"], demo_facts,
            expand=[RelationKind.IS_PREREQUISITE],
        )
        judgments = self.judged(demo_facts, extra={"q_bad": bad})
        table = evaluation.evaluate_run(
            judgments, demo_index, demo_corpus, facts_by_domain=None
        )
        rows = {row.query_id: row for row in table.rows}
        assert rows["q_bad"].metrics is None
        assert "expansion" in rows["q_bad"].error
        # the two healthy queries still evaluated, macro over them only
        assert rows["q_pointeur"].metrics is not None
        assert table.macro_precision is not None


class TestTableFormats:
    @pytest.fixture()
    def table(self, demo_corpus, demo_index, demo_facts):
        judgments = evaluation.RelevanceJudgments(
            queries={
                "q1": make_query(
                    "structure_de_donnee", ["pointeur"], demo_facts, max_results=5
                )
            },
            relevant={"q1": frozenset({ref("D8", "S9")})},
        )
        return evaluation.evaluate_run(
            judgments, demo_index, demo_corpus, k_values=(1, 5)
        )

    def test_dict(self, table):
        data = evaluation.table_to_dict(table)
        (row,) = data["queries"]
        assert row["query_id"] == "q1"
        assert 0.0 <= row["precision"] <= 1.0
        assert data["macro"]["precision"] == table.macro_precision

    def test_csv(self, table):
        text = evaluation.table_to_csv(table)
        lines = text.strip().splitlines()
        assert lines[0].startswith("query_id,")
        assert lines[-1].startswith("MACRO,")
        assert len(lines) == 3

    def test_text(self, table):
        text = evaluation.format_table(table)
        assert "q1" in text
        assert "MACRO" in text
