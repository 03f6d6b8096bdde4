"""Precision/recall evaluation of search runs against relevance judgments.

Judged relevance lives in a qrels file (query_id, lesson_id, segment_id, one
tab-separated triple per line); the queries themselves come from a JSON
manifest.  Precision over an empty result list is the vacuous 1.0 and is
flagged as such; recall over an empty relevant set is undefined and reported
as missing rather than invented.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any, Mapping, Sequence

from .annotations import AnnotatedCorpus, SegmentRef
from .errors import ParseError, SegSearchError
from .indexer import ConceptSegmentIndex
from .inference import InferredFacts
from .ontology import DomainOntology, RelationKind
from .search import Query, make_query, search
from .annotations import PobKind


@dataclass(frozen=True)
class PrecisionRecall:
    """Precision/recall of one result list against one relevant set."""

    precision: float
    recall: float | None
    hits: int
    returned: int
    relevant: int
    vacuous_precision: bool = False

    @property
    def recall_defined(self) -> bool:
        return self.recall is not None


def precision_recall(
    returned: Sequence[SegmentRef], relevant: frozenset[SegmentRef] | set[SegmentRef]
) -> PrecisionRecall:
    """Set-based precision and recall (rank-free)."""
    returned_set = set(returned)
    hits = len(returned_set & set(relevant))
    if returned_set:
        precision = hits / len(returned_set)
        vacuous = False
    else:
        precision = 1.0
        vacuous = True
    recall = hits / len(relevant) if relevant else None
    return PrecisionRecall(
        precision=precision,
        recall=recall,
        hits=hits,
        returned=len(returned_set),
        relevant=len(relevant),
        vacuous_precision=vacuous,
    )


def precision_at_k(
    returned: Sequence[SegmentRef], relevant: frozenset[SegmentRef] | set[SegmentRef], k: int
) -> float:
    """|top-k hits| / k — the usual convention, also when fewer were returned."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    top = returned[:k]
    hits = sum(1 for ref in top if ref in relevant)
    return hits / k


@dataclass(frozen=True)
class RelevanceJudgments:
    """Queries under evaluation plus the segments judged relevant for each."""

    queries: Mapping[str, Query]
    relevant: Mapping[str, frozenset[SegmentRef]]

    def validate_against(self, corpus: AnnotatedCorpus) -> None:
        for query_id, refs in self.relevant.items():
            for ref in refs:
                try:
                    corpus.segment(ref)
                except KeyError:
                    raise SegSearchError(
                        f"qrels for query '{query_id}' judge unknown segment "
                        f"{ref.lesson_id}/{ref.segment_id}"
                    ) from None


def load_qrels(source: str | Path | IO[str]) -> dict[str, frozenset[SegmentRef]]:
    """Parse the tab-separated qrels format; '#' lines and blanks are skipped."""
    if hasattr(source, "read"):
        text, name = source.read(), str(getattr(source, "name", "<stream>"))
    else:
        path = Path(source)
        text, name = path.read_text(encoding="utf-8"), str(path)
    relevant: dict[str, set[SegmentRef]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(
                f"expected 'query_id<TAB>lesson_id<TAB>segment_id', got {line!r}",
                source=name,
                line=lineno,
            )
        query_id, lesson_id, segment_id = (p.strip() for p in parts)
        relevant.setdefault(query_id, set()).add(SegmentRef(lesson_id, segment_id))
    return {qid: frozenset(refs) for qid, refs in relevant.items()}


def load_query_manifest(
    source: str | Path | IO[str],
    facts_by_domain: Mapping[str, InferredFacts],
) -> dict[str, Query]:
    """Parse the JSON query manifest into canonicalized queries.

    Shape: {"queries": [{"query_id", "domain_id", "concepts", "pob"?,
    "expand"?, "top"?}, ...]}.
    """
    if hasattr(source, "read"):
        text, name = source.read(), str(getattr(source, "name", "<stream>"))
    else:
        path = Path(source)
        text, name = path.read_text(encoding="utf-8"), str(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, source=name, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(data, dict) or not isinstance(data.get("queries"), list):
        raise ParseError("manifest must be an object with a 'queries' list", source=name)

    queries: dict[str, Query] = {}
    for i, entry in enumerate(data["queries"]):
        where = f"queries[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where} must be an object", source=name)
        query_id = entry.get("query_id")
        if not isinstance(query_id, str) or not query_id:
            raise ParseError(f"{where} needs a string 'query_id'", source=name)
        if query_id in queries:
            raise ParseError(f"duplicate query_id '{query_id}'", source=name)
        domain_id = entry.get("domain_id")
        if not isinstance(domain_id, str):
            raise ParseError(f"{where} needs a string 'domain_id'", source=name)
        facts = facts_by_domain.get(domain_id)
        if facts is None:
            raise SegSearchError(
                f"{name}: query '{query_id}' addresses unknown domain '{domain_id}'"
            )
        pob = entry.get("pob")
        expand = entry.get("expand", [])
        queries[query_id] = make_query(
            domain_id,
            entry.get("concepts", []),
            facts,
            pob_filter=PobKind(pob) if pob is not None else None,
            max_results=entry.get("top"),
            expand=[RelationKind(k) for k in expand],
        )
    return queries


@dataclass(frozen=True)
class QueryOutcome:
    """Evaluation row for one query (or the error that stopped it)."""

    query_id: str
    metrics: PrecisionRecall | None
    at_k: Mapping[int, float] = field(default_factory=dict)
    error: str | None = None


@dataclass(frozen=True)
class EvaluationTable:
    """All per-query rows plus the macro-averages over defined values."""

    rows: tuple[QueryOutcome, ...]
    k_values: tuple[int, ...]
    macro_precision: float | None
    macro_recall: float | None
    macro_at_k: Mapping[int, float | None]


def evaluate_run(
    judgments: RelevanceJudgments,
    index: ConceptSegmentIndex,
    corpus: AnnotatedCorpus,
    *,
    ontologies: Mapping[str, DomainOntology] | None = None,
    facts_by_domain: Mapping[str, InferredFacts] | None = None,
    k_values: Sequence[int] = (1, 5, 10),
) -> EvaluationTable:
    """Run every judged query and tabulate precision, recall and P@k.

    A query that fails (unknown domain, bad expansion setup...) gets an error
    row; the rest of the run continues.  Macro averages are unweighted means
    over the queries for which the metric is defined.
    """
    judgments.validate_against(corpus)
    rows: list[QueryOutcome] = []
    for query_id in sorted(judgments.queries):
        query = judgments.queries[query_id]
        relevant = judgments.relevant.get(query_id, frozenset())
        try:
            ontology = (ontologies or {}).get(query.domain_id)
            facts = (facts_by_domain or {}).get(query.domain_id)
            results = search(query, index, corpus, ontology=ontology, facts=facts)
        except SegSearchError as exc:
            rows.append(QueryOutcome(query_id=query_id, metrics=None, error=str(exc)))
            continue
        refs = [r.segment for r in results]
        rows.append(
            QueryOutcome(
                query_id=query_id,
                metrics=precision_recall(refs, relevant),
                at_k={k: precision_at_k(refs, relevant, k) for k in k_values},
            )
        )

    def macro(values: list[float]) -> float | None:
        return sum(values) / len(values) if values else None

    ok = [r for r in rows if r.metrics is not None]
    return EvaluationTable(
        rows=tuple(rows),
        k_values=tuple(k_values),
        macro_precision=macro([r.metrics.precision for r in ok]),
        macro_recall=macro(
            [r.metrics.recall for r in ok if r.metrics.recall is not None]
        ),
        macro_at_k={
            k: macro([r.at_k[k] for r in ok]) for k in k_values
        },
    )


def table_to_dict(table: EvaluationTable) -> dict[str, Any]:
    rows = []
    for row in table.rows:
        if row.metrics is None:
            rows.append({"query_id": row.query_id, "error": row.error})
            continue
        m = row.metrics
        rows.append(
            {
                "query_id": row.query_id,
                "precision": m.precision,
                "recall": m.recall,
                "hits": m.hits,
                "returned": m.returned,
                "relevant": m.relevant,
                "vacuous_precision": m.vacuous_precision,
                **{f"p_at_{k}": row.at_k[k] for k in table.k_values},
            }
        )
    return {
        "queries": rows,
        "macro": {
            "precision": table.macro_precision,
            "recall": table.macro_recall,
            **{f"p_at_{k}": table.macro_at_k[k] for k in table.k_values},
        },
    }


def table_to_csv(table: EvaluationTable) -> str:
    buf = io.StringIO()
    fields = ["query_id", "precision", "recall", "hits", "returned", "relevant",
              "vacuous_precision"] + [f"p_at_{k}" for k in table.k_values] + ["error"]
    writer = csv.DictWriter(buf, fieldnames=fields)
    writer.writeheader()
    for row in table.rows:
        if row.metrics is None:
            writer.writerow({"query_id": row.query_id, "error": row.error})
            continue
        m = row.metrics
        writer.writerow(
            {
                "query_id": row.query_id,
                "precision": f"{m.precision:.6f}",
                "recall": "" if m.recall is None else f"{m.recall:.6f}",
                "hits": m.hits,
                "returned": m.returned,
                "relevant": m.relevant,
                "vacuous_precision": str(m.vacuous_precision).lower(),
                **{f"p_at_{k}": f"{row.at_k[k]:.6f}" for k in table.k_values},
                "error": "",
            }
        )
    macro = {
        "query_id": "MACRO",
        "precision": "" if table.macro_precision is None else f"{table.macro_precision:.6f}",
        "recall": "" if table.macro_recall is None else f"{table.macro_recall:.6f}",
        **{
            f"p_at_{k}": ""
            if table.macro_at_k[k] is None
            else f"{table.macro_at_k[k]:.6f}"
            for k in table.k_values
        },
    }
    writer.writerow(macro)
    return buf.getvalue()


def format_table(table: EvaluationTable) -> str:
    """Aligned text table for terminal output."""
    headers = ["query", "prec", "recall"] + [f"P@{k}" for k in table.k_values] + ["note"]
    body: list[list[str]] = []
    for row in table.rows:
        if row.metrics is None:
            body.append([row.query_id, "-", "-"] + ["-"] * len(table.k_values)
                        + [f"error: {row.error}"])
            continue
        m = row.metrics
        note = "vacuous precision" if m.vacuous_precision else (
            "recall undefined" if m.recall is None else ""
        )
        body.append(
            [
                row.query_id,
                f"{m.precision:.4f}",
                "-" if m.recall is None else f"{m.recall:.4f}",
            ]
            + [f"{row.at_k[k]:.4f}" for k in table.k_values]
            + [note]
        )
    body.append(
        [
            "MACRO",
            "-" if table.macro_precision is None else f"{table.macro_precision:.4f}",
            "-" if table.macro_recall is None else f"{table.macro_recall:.4f}",
        ]
        + [
            "-" if table.macro_at_k[k] is None else f"{table.macro_at_k[k]:.4f}"
            for k in table.k_values
        ]
        + [""]
    )
    widths = [max(len(headers[i]), *(len(r[i]) for r in body)) for i in range(len(headers))]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    lines.append("  ".join("-" * w for w in widths))
    for r in body:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(headers))))
    return "\n".join(lines)
