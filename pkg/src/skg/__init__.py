"""Semantic knowledge graph engine.

Nodes are document sets materialized from an inverted index at query time;
edges are their intersections, scored from corpus statistics.
"""

from .analysis import FieldKind, FieldSchema, Schema, analyze_text
from .docset import DocSet
from .engine import KnowledgeGraph
from .errors import (
    DocumentError,
    DuplicateIdError,
    IngestError,
    QuerySyntaxError,
    RequestError,
    SchemaError,
    ScoringError,
    SKGError,
    SnapshotFormatError,
    SnapshotVersionError,
)
from .index import Document, IndexSnapshot, IndexWriter, PostingsList, build_snapshot
from .persist import load_snapshot, save_snapshot
from .query import All, And, Not, Or, Phrase, Term, materialize, parse_query, print_query
from .scoring import (
    EdgeScore,
    PathState,
    ScorerKind,
    ScoringContext,
    antecedent_confidence,
    consequent_confidence,
    path_foreground,
    popularity,
    relatedness,
    sigmoid_normalize,
    z_score,
)
from .traversal import NodeSpec, TraversalRequest, TraversalResponse, Traverser, traverse

__version__ = "0.1.0"
