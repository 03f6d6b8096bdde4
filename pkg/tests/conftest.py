from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `helpers` importable

from segsearch.annotations import canonicalize_corpus
from segsearch.demo import (
    build_demo_corpus,
    build_demo_ontology,
    write_demo_data,
)
from segsearch.indexer import build_index
from segsearch.inference import infer

FIXTURES = Path(__file__).parent / "fixtures"

# One verdict line per acceptance criterion, printed after the run.
_ACCEPTANCE_VERDICTS: list[tuple[str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.location[0].endswith("test_acceptance.py"):
        label = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _ACCEPTANCE_VERDICTS.append((label, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for label, verdict in _ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(f"{verdict}  {label}")


@pytest.fixture(scope="session")
def demo_ontology():
    return build_demo_ontology()


@pytest.fixture(scope="session")
def demo_facts(demo_ontology):
    return infer(demo_ontology)


@pytest.fixture(scope="session")
def demo_corpus(demo_ontology, demo_facts):
    corpus = build_demo_corpus()
    return canonicalize_corpus(corpus, {demo_ontology.domain_id: demo_facts})


@pytest.fixture(scope="session")
def demo_index(demo_corpus):
    return build_index(demo_corpus)


@pytest.fixture(scope="session")
def demo_files(tmp_path_factory):
    """Demo ontology + annotation JSON written to disk, for file-driven entry points."""
    out = tmp_path_factory.mktemp("demo-data")
    return write_demo_data(out)


@pytest.fixture(scope="session")
def demo_engine(demo_files):
    from segsearch.engine import build_engine

    return build_engine([demo_files["ontology"]], [demo_files["course"]])
