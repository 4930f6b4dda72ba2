"""Batch pipelines: ingestion, co-term cleansing, summarization, prediction."""

from __future__ import annotations

import json
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .analysis import analyze_text
from .errors import IngestError, SKGError
from .index import Document, IndexSnapshot, IndexWriter
from .query import (
    And, Not, Or, Phrase, QueryExpr, Term, _leaf_docs, evaluate, parse_query, print_query,
)
from .scoring import ScorerKind, ScoringContext, relatedness
from .traversal import NodeSpec, ScoredValue, TraversalRequest, Traverser

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5
DEFAULT_TFIDF_K = 5


# ---------------------------------------------------------------- ingestion

def read_jsonl(path) -> list[Document]:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                docs.append(Document.from_json(json.loads(line)))
            except (json.JSONDecodeError, SKGError) as exc:
                raise IngestError(str(exc), lineno) from exc
    return docs


def ingest_file(path, writer: IndexWriter) -> int:
    """Stage and commit every line of a JSONL file; all or nothing."""
    count = 0
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    writer.add_document(Document.from_json(json.loads(line)))
                except (json.JSONDecodeError, SKGError) as exc:
                    raise IngestError(str(exc), lineno) from exc
                count += 1
        writer.commit()
    except BaseException:
        writer.rollback()
        raise
    return count


# ---------------------------------------------------------------- cleansing

@dataclass(frozen=True)
class CoTermPair:
    term_a: str
    term_b: str
    field: str
    relatedness: float
    verdict: str  # kept | blacklisted | unknown

    def tsv(self) -> str:
        return f"{self.term_a}\t{self.term_b}\t{self.relatedness:.6f}\t{self.verdict}"


def read_pairs(path) -> list[tuple[str, str]]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise IngestError("expected two tab-separated terms", lineno)
            pairs.append((cols[0].strip(), cols[1].strip()))
    return pairs


def cleanse_pairs(snapshot: IndexSnapshot, pairs: Iterable[tuple[str, str]], field: str,
                  threshold: float = DEFAULT_THRESHOLD) -> list[CoTermPair]:
    """Score each co-term pair and blacklist those below ``threshold``.

    A pair whose terms match no document is reported with relatedness 0 and
    verdict ``unknown``.
    """
    snapshot.field(field)
    background = snapshot.all_docs()
    out = []
    for a, b in pairs:
        docs_a = _leaf_docs(snapshot, field, a.split())
        docs_b = _leaf_docs(snapshot, field, b.split())
        if not docs_a or not docs_b:
            out.append(CoTermPair(a, b, field, 0.0, "unknown"))
            continue
        r = relatedness(ScoringContext(docs_a, background), docs_b).relatedness
        out.append(CoTermPair(a, b, field, r, "blacklisted" if r < threshold else "kept"))
    return out


def blacklist_fraction(pairs: Sequence[CoTermPair]) -> float:
    scored = [p for p in pairs if p.verdict != "unknown"]
    if not scored:
        return 0.0
    return sum(p.verdict == "blacklisted" for p in scored) / len(scored)


# ---------------------------------------------------------------- summarization

@dataclass(frozen=True)
class SummaryEntry:
    phrase: str
    relatedness: float


def tfidf_foreground(snapshot: IndexSnapshot, field: str, doc_terms: Sequence[str],
                     k: int = DEFAULT_TFIDF_K) -> Or:
    """OR of the ``k`` terms with highest ``tf * ln(|D| / max(df, 1))``.

    ``tf`` counts occurrences in ``doc_terms``; ties go to the
    lexicographically smaller term.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    schema = snapshot.field(field).schema
    tf = Counter(t for raw in doc_terms for t, _ in analyze_text(raw, schema))
    if not tf:
        raise ValueError("document has no terms")
    n_docs = max(snapshot.doc_count, 1)
    scored = sorted(
        ((c * math.log(n_docs / max(snapshot.doc_frequency(field, t), 1)), t) for t, c in tf.items()),
        key=lambda st: (-st[0], st[1]),
    )
    return Or([Term(field, t) for _, t in scored[:k]])


def summarize_document(snapshot: IndexSnapshot, phrases: Sequence[str], field: str,
                       foreground_query: str | QueryExpr | None = None,
                       tfidf_k: int = DEFAULT_TFIDF_K) -> list[SummaryEntry]:
    """Rank a document's phrases by relatedness to the document's topic.

    The topic is ``foreground_query`` when given, otherwise the OR of the
    document's top tf-idf terms.
    """
    if not phrases:
        return []
    if foreground_query is None:
        fg_expr = tfidf_foreground(snapshot, field, phrases, tfidf_k)
    elif isinstance(foreground_query, str):
        fg_expr = parse_query(foreground_query)
    else:
        fg_expr = foreground_query
    fg = evaluate(fg_expr, snapshot)
    if not fg:
        logger.warning("foreground query matches no documents; all phrases score 0")
    ctx = ScoringContext(fg, snapshot.all_docs())
    entries = [
        SummaryEntry(p, relatedness(ctx, _leaf_docs(snapshot, field, p.split())).relatedness)
        for p in phrases
    ]
    # stable sort keeps input order among equal scores
    return sorted(entries, key=lambda e: -e.relatedness)


# ---------------------------------------------------------------- prediction

_RECENCY_RE = re.compile(r"^(.*)_(\d+)$")


def recency_document(doc_id: str, entries: Sequence[dict]) -> Document:
    """Flatten a history (most recent first) into ``field_1``, ``field_2``, ... fields."""
    fields = {}
    for i, entry in enumerate(entries, 1):
        for name, value in entry.items():
            fields[f"{name}_{i}"] = value
    return Document(doc_id, fields)


def shift_recency(expr: QueryExpr, delta: int) -> QueryExpr:
    """Rewrite every ``name_k`` field in ``expr`` to ``name_{k+delta}``."""
    def shift(field):
        m = _RECENCY_RE.match(field)
        if not m:
            raise ValueError(f"field {field!r} carries no recency index")
        return f"{m.group(1)}_{int(m.group(2)) + delta}"

    if isinstance(expr, Term):
        return Term(shift(expr.field), expr.term)
    if isinstance(expr, Phrase):
        return Phrase(shift(expr.field), expr.terms)
    if isinstance(expr, And):
        return And([shift_recency(c, delta) for c in expr.children])
    if isinstance(expr, Or):
        return Or([shift_recency(c, delta) for c in expr.children])
    if isinstance(expr, Not):
        return Not(shift_recency(expr.child, delta))
    return expr


def predict(snapshot: IndexSnapshot, start_query: str, target_field: str,
            scorer=ScorerKind.CONSEQUENT, min_count: int = 1, limit: int = 10,
            exclude_earlier: bool | None = None) -> list[ScoredValue]:
    """Association-rule traversal from a starting node into ``target_field``.

    Consequent scoring ranks ``start -> value`` rules; antecedent scoring ranks
    ``value -> start`` rules. For antecedent runs the starting node drops
    docs that already matched the query one recency step earlier, unless
    ``exclude_earlier`` is False.
    """
    scorer = ScorerKind(scorer)
    if scorer not in (ScorerKind.CONSEQUENT, ScorerKind.ANTECEDENT):
        raise ValueError("predict scores with 'consequent' or 'antecedent'")
    if exclude_earlier is None:
        exclude_earlier = scorer is ScorerKind.ANTECEDENT
    start = parse_query(start_query)
    if exclude_earlier:
        earlier = shift_recency(start, +1)
        try:
            evaluate(earlier, snapshot)
        except SKGError:
            logger.info("no earlier recency fields for %s; nothing excluded", start_query)
        else:
            start = And(start, Not(earlier))
    request = TraversalRequest(
        [print_query(start)],
        [NodeSpec(target_field, limit=limit, min_count=min_count, scorer=scorer)],
    )
    return Traverser(snapshot).traverse(request).nodes[0].values
