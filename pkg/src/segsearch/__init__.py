"""Concept-based indexing and semantic search over annotated video lessons.

The pipeline: load domain ontologies, infer relation closures, load segment
annotations, canonicalize them through sameAs, weight every (concept,
segment) pair, then answer concept queries by cosine over those weights.
"""

from .annotations import (
    AnnotatedCorpus,
    PedagogicalObject,
    PobKind,
    Segment,
    SegmentRef,
    VideoCourse,
    VideoLesson,
    build_corpus,
    canonicalize_corpus,
    parse_annotation,
)
from .engine import SearchEngine, build_engine
from .errors import (
    AnnotationError,
    DomainMismatchError,
    IndexingError,
    IndexIOError,
    OntologyError,
    OwlImportError,
    ParseError,
    QueryError,
    SegSearchError,
    UnknownConceptError,
)
from .indexer import (
    ConceptSegmentIndex,
    IndexStats,
    build_index,
    cf_isdf,
    count_stats,
    load_index,
    save_index,
)
from .inference import InferredFacts, canonicalize, infer, related_concepts
from .ontology import (
    DomainOntology,
    RelationEdge,
    RelationKind,
    TreeNode,
    concept_tree,
    load_domain_ontology,
    validate_ontology,
)
from .owl_import import import_owl_subset
from .search import (
    Query,
    RankedResult,
    cosine,
    expand_query,
    explain,
    make_query,
    search,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotatedCorpus",
    "AnnotationError",
    "ConceptSegmentIndex",
    "DomainMismatchError",
    "DomainOntology",
    "IndexIOError",
    "IndexStats",
    "IndexingError",
    "InferredFacts",
    "OntologyError",
    "OwlImportError",
    "ParseError",
    "PedagogicalObject",
    "PobKind",
    "Query",
    "QueryError",
    "RankedResult",
    "RelationEdge",
    "RelationKind",
    "SearchEngine",
    "SegSearchError",
    "Segment",
    "SegmentRef",
    "TreeNode",
    "UnknownConceptError",
    "VideoCourse",
    "VideoLesson",
    "build_corpus",
    "build_engine",
    "build_index",
    "canonicalize",
    "canonicalize_corpus",
    "cf_isdf",
    "concept_tree",
    "cosine",
    "count_stats",
    "expand_query",
    "explain",
    "import_owl_subset",
    "infer",
    "load_domain_ontology",
    "load_index",
    "make_query",
    "parse_annotation",
    "related_concepts",
    "save_index",
    "search",
    "validate_ontology",
]
