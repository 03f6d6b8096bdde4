"""Command-line interface: one executable, one subcommand per pipeline stage.

Exit codes: 0 on success, 1 on data errors (invalid documents, failed
checks), 2 on usage errors (argparse's own convention).  Diagnostics go to
stderr; payload output (tables, JSON, HTML) goes to stdout.
"""

from __future__ import annotations

import argparse
import html
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import evaluation
from .annotations import (
    PobKind,
    SegmentRef,
    course_to_dict,
    format_time,
    parse_annotation,
)
from .engine import build_engine, load_ontologies
from .errors import SegSearchError
from .indexer import build_index, iter_stats_rows, save_index
from .inference import infer, inference_report
from .ontology import (
    DomainOntology,
    RelationKind,
    concept_tree,
    format_tree,
    load_domain_ontology,
    ontology_to_dict,
    tree_to_dict,
)
from .owl_import import import_owl_subset
from .search import (
    RankedResult,
    breakdown_to_dict,
    explain,
    format_results,
    make_query,
    result_to_dict,
    search,
)

log = logging.getLogger(__name__)


def _emit_json(data: Any) -> None:
    print(json.dumps(data, indent=2, ensure_ascii=False))


def _add_data_args(parser: argparse.ArgumentParser, *, annotations: bool = True) -> None:
    parser.add_argument(
        "--ontology",
        action="append",
        required=True,
        metavar="FILE",
        help="domain ontology file (canonical JSON or OWL subset); repeatable",
    )
    if annotations:
        parser.add_argument(
            "--annotations",
            action="append",
            required=True,
            metavar="PATH",
            help="annotation file or directory of .json course files; repeatable",
        )
        parser.add_argument(
            "--index",
            metavar="FILE",
            help="use this prebuilt index instead of indexing in memory",
        )
    parser.add_argument(
        "--strict",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="reject unknown keys/elements instead of warning (default: strict)",
    )


def _engine_from_args(args: argparse.Namespace):
    return build_engine(
        args.ontology,
        args.annotations,
        index_path=getattr(args, "index", None),
        strict=args.strict,
    )


def _query_from_args(args: argparse.Namespace, engine) -> Any:
    facts = engine.facts.get(args.domain)
    if facts is None:
        raise SegSearchError(
            f"unknown domain '{args.domain}' (loaded: {sorted(engine.facts)})"
        )
    concepts = [c for chunk in args.concepts for c in chunk.split(",")]
    pob = PobKind(args.pob) if getattr(args, "pob", None) else None
    expand = [RelationKind(k) for k in (args.expand.split(",") if getattr(args, "expand", None) else [])]
    return make_query(
        args.domain,
        concepts,
        facts,
        pob_filter=pob,
        max_results=getattr(args, "top", None),
        expand=expand,
    )


# ---------------------------------------------------------------- validate

def _sniff_and_validate(path: Path, ontologies: dict[str, DomainOntology], strict: bool) -> str:
    """Load one file of any supported type; returns its kind. Raises on invalid."""
    text = path.read_text(encoding="utf-8", errors="replace").lstrip()
    if text.startswith("<"):
        loaded = import_owl_subset(path, strict=strict)
        if isinstance(loaded, DomainOntology):
            ontologies[loaded.domain_id] = loaded
            return "ontology (owl subset)"
        return "course (owl subset)"
    data = json.loads(text)
    if isinstance(data, dict) and "course_id" in data:
        parse_annotation(path, ontologies=ontologies or None, strict=strict)
        return "course"
    ontology = load_domain_ontology(path, strict=strict)
    ontologies[ontology.domain_id] = ontology
    return "ontology"


def cmd_validate(args: argparse.Namespace) -> int:
    ontologies: dict[str, DomainOntology] = {}
    rows: list[dict[str, Any]] = []
    failed = False
    for raw in args.files:
        path = Path(raw)
        try:
            kind = _sniff_and_validate(path, ontologies, args.strict)
            rows.append({"path": str(path), "type": kind, "status": "ok"})
        except (SegSearchError, json.JSONDecodeError, OSError) as exc:
            failed = True
            rows.append({"path": str(path), "status": "invalid", "error": str(exc)})
    if args.format == "json":
        _emit_json({"files": rows, "ok": not failed})
    else:
        for row in rows:
            if row["status"] == "ok":
                print(f"ok      {row['path']} ({row['type']})")
            else:
                print(f"INVALID {row['path']}: {row['error']}")
    return 1 if failed else 0


# ---------------------------------------------------------------- infer

def cmd_infer(args: argparse.Namespace) -> int:
    ontologies = load_ontologies(args.ontology, strict=args.strict)
    reports = {did: inference_report(infer(o)) for did, o in sorted(ontologies.items())}
    if args.format == "json":
        _emit_json(reports if len(reports) > 1 else next(iter(reports.values())))
        return 0
    for did, report in reports.items():
        print(f"domain {did}")
        for group in report["same_as_classes"]:
            print(f"  sameAs class [{group['representative']}]: "
                  + ", ".join(group["members"]))
        for key in ("depends", "prerequisites", "decomposition"):
            for fact in report[key]:
                print(f"  {key}: {fact['from']} -> {fact['to']} ({fact['status']})")
        for violation in report["violations"]:
            print(f"  VIOLATION [{violation['code']}]: {violation['message']}")
    return 1 if any(r["violations"] for r in reports.values()) else 0


# ---------------------------------------------------------------- import-owl

def cmd_import_owl(args: argparse.Namespace) -> int:
    loaded = import_owl_subset(args.file, strict=args.strict, domain_id=args.domain)
    if isinstance(loaded, DomainOntology):
        data = ontology_to_dict(loaded)
    else:
        data = course_to_dict(loaded)
    text = json.dumps(data, indent=2, ensure_ascii=False)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        log.info("wrote %s", args.out)
    else:
        print(text)
    return 0


# ---------------------------------------------------------------- index

def cmd_index(args: argparse.Namespace) -> int:
    engine = build_engine(args.ontology, args.annotations, strict=args.strict)
    save_index(engine.index, args.out)
    if args.stats_csv:
        import csv as _csv

        with open(args.stats_csv, "w", encoding="utf-8", newline="") as fh:
            writer = _csv.DictWriter(
                fh, fieldnames=["c", "lesson", "segment", "CF", "SegF", "S_d", "DF", "weight"]
            )
            writer.writeheader()
            for row in iter_stats_rows(engine.index):
                writer.writerow({**row, "weight": repr(row["weight"])})
    stats = engine.index.stats
    print(
        f"indexed {len(engine.index.segments)} segments in {stats.num_documents} "
        f"documents, {len(engine.index.vocabulary)} concepts -> {args.out}",
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------- search

_RESULT_PAGE_STYLE = """
body { font-family: system-ui, sans-serif; margin: 2rem auto; max-width: 50rem;
       line-height: 1.4; color: #222; }
.result { border: 1px solid #ccc; border-radius: 6px; padding: .8rem 1rem;
          margin: .8rem 0; }
.score { float: right; color: #555; font-variant-numeric: tabular-nums; }
.meta { color: #666; font-size: .9rem; }
.pob { margin: .2rem 0 0 1rem; font-size: .95rem; }
.kind { display: inline-block; background: #eef; border-radius: 4px;
        padding: 0 .4rem; margin-right: .4rem; font-size: .85rem; }
""".strip()


def results_page(results: Sequence[RankedResult], heading: str) -> str:
    """Self-contained HTML page listing a result set."""
    parts = [
        "<!doctype html>",
        '<html lang="en"><head><meta charset="utf-8">',
        f"<title>{html.escape(heading)}</title>",
        f"<style>{_RESULT_PAGE_STYLE}</style>",
        "</head><body>",
        f"<h1>{html.escape(heading)}</h1>",
        f"<p class='meta'>{len(results)} matching segment(s)</p>",
    ]
    for rank, r in enumerate(results, start=1):
        parts.append('<div class="result">')
        parts.append(f'<span class="score">{r.score:.4f}</span>')
        parts.append(
            f"<strong>{rank}. {html.escape(r.lesson_title)} — "
            f"{html.escape(r.segment_title)}</strong>"
        )
        parts.append(
            f'<div class="meta">{html.escape(r.segment.lesson_id)}/'
            f"{html.escape(r.segment.segment_id)} · starts {format_time(r.begin)} · "
            f"lasts {format_time(r.duration)} · "
            f'<a href="{html.escape(r.url, quote=True)}">video</a></div>'
        )
        for pob in r.pobs:
            comment = f" — {html.escape(pob.comment)}" if pob.comment else ""
            parts.append(
                f'<div class="pob"><span class="kind">{pob.kind.value}</span>'
                f"{html.escape(', '.join(pob.concepts))}{comment}</div>"
            )
        parts.append("</div>")
    parts.append("</body></html>")
    return "\n".join(parts)


def cmd_search(args: argparse.Namespace) -> int:
    engine = _engine_from_args(args)
    query = _query_from_args(args, engine)
    results = search(
        query,
        engine.index,
        engine.corpus,
        ontology=engine.ontologies[query.domain_id],
        facts=engine.facts[query.domain_id],
    )
    if args.html:
        print(results_page(results, f"Results for {', '.join(sorted(query.concepts))}"))
    elif args.format == "json":
        _emit_json({"results": [result_to_dict(r) for r in results]})
    else:
        print(format_results(results))
    return 0


# ---------------------------------------------------------------- explain

def cmd_explain(args: argparse.Namespace) -> int:
    engine = _engine_from_args(args)
    query = _query_from_args(args, engine)
    breakdown = explain(
        query,
        SegmentRef(args.lesson, args.segment),
        engine.index,
        facts=engine.facts[query.domain_id],
    )
    if args.format == "json":
        _emit_json(breakdown_to_dict(breakdown))
        return 0
    print(f"segment {args.lesson}/{args.segment}")
    print(f"{'concept':<32} {'CF':>4} {'SegF':>5} {'S_d':>4} {'DF':>4} {'weight':>12}")
    for row in breakdown.concepts:
        print(
            f"{row.concept:<32} {row.cf:>4} {row.seg_f:>5} {row.s_d:>4} "
            f"{row.df:>4} {row.weight:>12.6f}"
        )
    print(
        f"dot={breakdown.dot:.6f} segment_norm={breakdown.segment_norm:.6f} "
        f"query_norm={breakdown.query_norm:.6f} score={breakdown.score:.6f}"
    )
    return 0


# ---------------------------------------------------------------- eval

def cmd_eval(args: argparse.Namespace) -> int:
    engine = _engine_from_args(args)
    relevant = evaluation.load_qrels(args.qrels)
    queries = evaluation.load_query_manifest(args.queries, engine.facts)
    missing = sorted(set(relevant) - set(queries))
    if missing:
        raise SegSearchError(
            f"qrels reference queries missing from the manifest: {missing}"
        )
    judgments = evaluation.RelevanceJudgments(queries=queries, relevant=relevant)
    k_values = [int(k) for k in args.k.split(",")] if args.k else [1, 5, 10]
    table = evaluation.evaluate_run(
        judgments,
        engine.index,
        engine.corpus,
        ontologies=engine.ontologies,
        facts_by_domain=engine.facts,
        k_values=k_values,
    )
    if args.format == "json":
        _emit_json(evaluation.table_to_dict(table))
    elif args.format == "csv":
        print(evaluation.table_to_csv(table), end="")
    else:
        print(evaluation.format_table(table))
    return 1 if any(row.error for row in table.rows) else 0


# ---------------------------------------------------------------- serve

def _env(name: str, fallback: Any) -> Any:
    return os.environ.get(f"SEGSEARCH_{name}", fallback)


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    ontology = args.ontology or _split_paths(_env("ONTOLOGY", ""))
    annotations = args.annotations or _split_paths(_env("ANNOTATIONS", ""))
    if not ontology or not annotations:
        raise SegSearchError(
            "serve needs --ontology and --annotations (or SEGSEARCH_ONTOLOGY / "
            "SEGSEARCH_ANNOTATIONS)"
        )
    engine = build_engine(
        ontology,
        annotations,
        index_path=args.index or _env("INDEX", None),
        strict=args.strict,
    )
    static = args.static or _env("STATIC", None)
    bind = args.bind or _env("BIND", "127.0.0.1")
    port = args.port if args.port is not None else int(_env("PORT", "8000"))
    app = create_app(engine, static_dir=static)
    log.info("serving on http://%s:%d/", bind, port)
    uvicorn.run(app, host=bind, port=port, log_level="warning")
    return 0


def _split_paths(value: str) -> list[str]:
    return [p for p in value.split(os.pathsep) if p]


# ---------------------------------------------------------------- tree

def cmd_tree(args: argparse.Namespace) -> int:
    ontologies = load_ontologies(args.ontology, strict=args.strict)
    ontology = ontologies.get(args.domain)
    if ontology is None:
        raise SegSearchError(
            f"unknown domain '{args.domain}' (loaded: {sorted(ontologies)})"
        )
    roots = concept_tree(ontology)
    if args.format == "json":
        _emit_json(
            {
                "domain_id": ontology.domain_id,
                "label": ontology.label,
                "roots": [tree_to_dict(n) for n in roots],
            }
        )
    else:
        print(format_tree(roots))
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segsearch",
        description="Concept-based indexing and search over annotated video lessons.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate ontology/annotation files")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("infer", help="show asserted and deduced relation facts")
    p.add_argument("--ontology", action="append", required=True, metavar="FILE")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("import-owl", help="convert an OWL-subset file to canonical JSON")
    p.add_argument("file", metavar="FILE")
    p.add_argument("--out", metavar="FILE", help="write here instead of stdout")
    p.add_argument("--domain", help="override the domain id of an imported course")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_import_owl)

    p = sub.add_parser("index", help="build and persist the segment index")
    _add_data_args(p)
    p.add_argument("--out", required=True, metavar="FILE")
    p.add_argument("--stats-csv", metavar="FILE", help="also dump per-entry stats as CSV")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="rank segments for a concept query")
    _add_data_args(p)
    p.add_argument("--domain", required=True)
    p.add_argument("--concepts", action="append", required=True, metavar="IDS",
                   help="comma-separated concept ids; repeatable")
    p.add_argument("--pob", choices=[k.value for k in PobKind],
                   help="hard filter on pedagogical-object kind")
    p.add_argument("--expand", metavar="KINDS",
                   help="comma-separated relation kinds to expand the query with")
    p.add_argument("--top", type=int, metavar="N")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--html", action="store_true", help="emit a static HTML result page")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("explain", help="per-concept score breakdown for one segment")
    _add_data_args(p)
    p.add_argument("--domain", required=True)
    p.add_argument("--concepts", action="append", required=True, metavar="IDS")
    p.add_argument("--expand", metavar="KINDS")
    p.add_argument("--lesson", required=True)
    p.add_argument("--segment", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("eval", help="precision/recall of judged queries")
    _add_data_args(p)
    p.add_argument("--qrels", required=True, metavar="FILE")
    p.add_argument("--queries", required=True, metavar="FILE")
    p.add_argument("--k", metavar="LIST", help="P@k cutoffs, e.g. 1,5,10")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the read-only HTTP service")
    p.add_argument("--ontology", action="append", metavar="FILE")
    p.add_argument("--annotations", action="append", metavar="PATH")
    p.add_argument("--index", metavar="FILE")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--bind", metavar="HOST")
    p.add_argument("--port", type=int, metavar="N")
    p.add_argument("--static", metavar="DIR", help="serve this directory at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("tree", help="print a domain's concept hierarchy")
    p.add_argument("--ontology", action="append", required=True, metavar="FILE")
    p.add_argument("--domain", required=True)
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_tree)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except SegSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
