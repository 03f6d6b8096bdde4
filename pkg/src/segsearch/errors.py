"""Exception types shared across the engine."""

from __future__ import annotations


class SegSearchError(Exception):
    """Base class for every error raised by this package."""


class ParseError(SegSearchError):
    """A source document could not be parsed at all.

    Carries the source name and, when the underlying parser reports one,
    the 1-based line/column of the offending position.
    """

    def __init__(
        self,
        message: str,
        *,
        source: str | None = None,
        line: int | None = None,
        column: int | None = None,
    ) -> None:
        self.source = source
        self.line = line
        self.column = column
        where = source or "<input>"
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


class OntologyError(SegSearchError):
    """An ontology document violates the domain-ontology contract."""


class AnnotationError(SegSearchError):
    """An annotation document violates the video-course contract."""


class OwlImportError(SegSearchError):
    """An OWL/RDF-XML document falls outside the supported subset."""


class IndexingError(SegSearchError):
    """The corpus cannot be turned into an index (e.g. nothing to index)."""


class IndexIOError(SegSearchError):
    """A persisted index file is unreadable, corrupt, or of a foreign version."""


class QueryError(SegSearchError):
    """A query is malformed or cannot be answered against this index."""


class UnknownConceptError(QueryError):
    """A concept id does not exist in the addressed domain ontology."""

    def __init__(self, concept_id: str, domain_id: str | None = None) -> None:
        self.concept_id = concept_id
        self.domain_id = domain_id
        suffix = f" in domain '{domain_id}'" if domain_id else ""
        super().__init__(f"unknown concept id '{concept_id}'{suffix}")


class DomainMismatchError(QueryError):
    """A query addresses a domain the index/corpus does not cover."""
