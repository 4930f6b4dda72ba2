"""Dual per-field indexes: positional terms-docs postings and docs-terms rows.

:class:`IndexWriter` stages documents and publishes immutable
:class:`IndexSnapshot` objects on :meth:`IndexWriter.commit`. Readers hold a
snapshot for as long as they like; later commits never touch it.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .analysis import FieldKind, FieldSchema, Schema, analyze_text
from .docset import DocSet
from .errors import DocumentError, DuplicateIdError, SchemaError

# Position skipped between consecutive values of a multi-valued text field so
# that phrases never match across value boundaries.
VALUE_POSITION_GAP = 1


@dataclass(frozen=True)
class Document:
    id: str
    fields: Mapping[str, object]

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise DocumentError("document id must be a nonempty string")
        if not self.fields:
            raise DocumentError(f"document {self.id!r} has no fields")
        clean = {}
        for name, value in self.fields.items():
            clean[name] = _normalize_value(self.id, name, value)
        object.__setattr__(self, "fields", clean)

    @classmethod
    def from_json(cls, obj) -> Document:
        if not isinstance(obj, dict):
            raise DocumentError(f"document must be a JSON object, got {type(obj).__name__}")
        if "id" not in obj:
            raise DocumentError("document is missing 'id'")
        body = {k: v for k, v in obj.items() if k != "id"}
        doc_id = obj["id"]
        if isinstance(doc_id, (int, float)) and not isinstance(doc_id, bool):
            doc_id = str(doc_id)
        return cls(doc_id, body)


def _normalize_value(doc_id, name, value):
    if isinstance(value, bool) or value is None:
        raise DocumentError(f"document {doc_id!r}: field {name!r} has unsupported value {value!r}")
    if isinstance(value, (int, float)):
        return str(value)
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)):
        return [_normalize_value(doc_id, name, v) for v in value]
    raise DocumentError(
        f"document {doc_id!r}: field {name!r} has unsupported type {type(value).__name__}"
    )


@dataclass(frozen=True)
class PostingsList:
    term: str
    entries: list[tuple[int, tuple[int, ...]]]

    @property
    def doc_frequency(self) -> int:
        return len(self.entries)


class FieldIndex:
    """Immutable inverted + forward index for one field.

    Term ids follow lexicographic term order. Postings and forward rows are
    CSR arrays: ``post_docs[post_ptr[t]:post_ptr[t+1]]`` are the docs holding
    term ``t``; ``fwd_terms[fwd_ptr[d]:fwd_ptr[d+1]]`` are the term ids of
    doc ``d``. Positional fields also carry ``positions`` sliced per posting
    entry by ``pos_ptr``.
    """

    def __init__(self, schema: FieldSchema, n_docs: int, terms: Sequence[str],
                 post_ptr, post_docs, fwd_ptr, fwd_terms, pos_ptr=None, positions=None):
        self.schema = schema
        self.n_docs = n_docs
        self.terms = list(terms)
        self.term_ids = {t: i for i, t in enumerate(self.terms)}
        self.post_ptr = np.asarray(post_ptr, dtype=np.int64)
        self.post_docs = np.asarray(post_docs, dtype=kernels.ID_DTYPE)
        self.fwd_ptr = np.asarray(fwd_ptr, dtype=np.int64)
        self.fwd_terms = np.asarray(fwd_terms, dtype=kernels.ID_DTYPE)
        self.pos_ptr = None if pos_ptr is None else np.asarray(pos_ptr, dtype=np.int64)
        self.positions = None if positions is None else np.asarray(positions, dtype=np.int32)
        self.doc_freq = np.diff(self.post_ptr)
        for arr in (self.post_ptr, self.post_docs, self.fwd_ptr, self.fwd_terms,
                    self.pos_ptr, self.positions, self.doc_freq):
            if arr is not None:
                arr.flags.writeable = False

    @property
    def name(self) -> str:
        return self.schema.name

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @classmethod
    def build(cls, schema: FieldSchema, n_docs: int, vocab: Sequence[str],
              raw_tids: np.ndarray, docs: np.ndarray, pos: np.ndarray) -> FieldIndex:
        """Build from parallel (raw term id, doc, position) arrays."""
        order = sorted(range(len(vocab)), key=vocab.__getitem__)
        rank = np.empty(len(vocab), dtype=np.int64)
        rank[order] = np.arange(len(vocab))
        terms = [vocab[i] for i in order]
        tids = rank[raw_tids] if len(raw_tids) else np.empty(0, dtype=np.int64)
        docs = np.asarray(docs, dtype=np.int64)
        pos = np.asarray(pos, dtype=np.int64)

        srt = np.lexsort((pos, docs, tids))
        tids, docs, pos = tids[srt], docs[srt], pos[srt]
        if len(tids):
            new_entry = np.ones(len(tids), dtype=bool)
            new_entry[1:] = (tids[1:] != tids[:-1]) | (docs[1:] != docs[:-1])
            entry_starts = np.flatnonzero(new_entry)
        else:
            entry_starts = np.empty(0, dtype=np.int64)
        e_tids = tids[entry_starts]
        e_docs = docs[entry_starts]
        post_ptr = np.zeros(len(terms) + 1, dtype=np.int64)
        np.cumsum(np.bincount(e_tids, minlength=len(terms)), out=post_ptr[1:])

        pos_ptr = positions = None
        if schema.positional:
            pos_ptr = np.append(entry_starts, len(tids)).astype(np.int64)
            positions = pos

        fwd_order = np.lexsort((e_tids, e_docs))
        fwd_terms = e_tids[fwd_order]
        fwd_ptr = np.zeros(n_docs + 1, dtype=np.int64)
        np.cumsum(np.bincount(e_docs, minlength=n_docs), out=fwd_ptr[1:])
        return cls(schema, n_docs, terms, post_ptr, e_docs, fwd_ptr, fwd_terms, pos_ptr, positions)

    def raw_triples(self):
        """Inverse of :meth:`build`: (term ids, docs, positions), with ``terms`` as vocab."""
        tids = np.repeat(np.arange(self.n_terms, dtype=np.int64), self.doc_freq)
        docs = self.post_docs.astype(np.int64)
        if self.schema.positional:
            per_entry = np.diff(self.pos_ptr)
            return np.repeat(tids, per_entry), np.repeat(docs, per_entry), self.positions.astype(np.int64)
        return tids, docs, np.zeros(len(docs), dtype=np.int64)

    def docs_for(self, tid: int) -> np.ndarray:
        return self.post_docs[self.post_ptr[tid]:self.post_ptr[tid + 1]]

    def positions_for(self, tid: int, doc_slice: np.ndarray | None = None):
        """Per-entry position arrays for term ``tid`` (optionally a subset of its entries)."""
        base = self.post_ptr[tid]
        idx = np.arange(base, self.post_ptr[tid + 1]) if doc_slice is None else base + doc_slice
        return [self.positions[self.pos_ptr[e]:self.pos_ptr[e + 1]] for e in idx]

    def term_counts(self, docs: DocSet) -> np.ndarray:
        """Number of ``docs`` holding each term, indexed by term id."""
        ids = docs.ids.astype(np.int64, copy=False)
        if len(ids) == self.n_docs:
            return self.doc_freq.astype(np.int64)
        return kernels.count_terms(self.fwd_ptr, self.fwd_terms, ids, self.n_terms)

    def __eq__(self, other):
        if not isinstance(other, FieldIndex):
            return NotImplemented
        same_pos = (self.pos_ptr is None) == (other.pos_ptr is None)
        if same_pos and self.pos_ptr is not None:
            same_pos = np.array_equal(self.pos_ptr, other.pos_ptr) and np.array_equal(
                self.positions, other.positions)
        return (self.schema == other.schema and self.n_docs == other.n_docs
                and self.terms == other.terms and same_pos
                and np.array_equal(self.post_ptr, other.post_ptr)
                and np.array_equal(self.post_docs, other.post_docs)
                and np.array_equal(self.fwd_ptr, other.fwd_ptr)
                and np.array_equal(self.fwd_terms, other.fwd_terms))


class IndexSnapshot:
    """One committed, immutable view of the corpus."""

    def __init__(self, schema: Schema, external_ids: Sequence[str],
                 fields: Mapping[str, FieldIndex], generation: int = 0):
        self.schema = schema.copy()
        self._external = list(external_ids)
        self._internal = {e: i for i, e in enumerate(self._external)}
        self.fields = dict(fields)
        self.generation = generation
        self._all = DocSet.full(len(self._external))

    @property
    def doc_count(self) -> int:
        return len(self._external)

    def field(self, name: str) -> FieldIndex:
        try:
            return self.fields[name]
        except KeyError:
            raise SchemaError(f"unknown field {name!r}") from None

    def all_docs(self) -> DocSet:
        return self._all

    def empty(self) -> DocSet:
        return DocSet.empty(self.doc_count)

    def docset(self, ids: Iterable[int]) -> DocSet:
        return DocSet(list(ids), self.doc_count)

    def internal_id(self, external_id: str) -> int:
        return self._internal[external_id]

    def external_id(self, internal_id: int) -> str:
        return self._external[internal_id]

    @property
    def external_ids(self) -> list[str]:
        return list(self._external)

    def docset_from_external(self, ids: Iterable[str]) -> DocSet:
        return DocSet([self._internal[e] for e in ids], self.doc_count)

    def to_external(self, docs: DocSet) -> list[str]:
        return [self._external[i] for i in docs]

    def term_docset(self, field: str, term: str) -> DocSet:
        fi = self.field(field)
        tid = fi.term_ids.get(term)
        if tid is None:
            return self.empty()
        return DocSet(fi.docs_for(tid), self.doc_count, trusted=True)

    def phrase_docset(self, field: str, terms: Sequence[str]) -> DocSet:
        """Docs where ``terms`` occur at consecutive ascending positions."""
        fi = self.field(field)
        if not terms:
            raise ValueError("empty phrase")
        if not fi.schema.positional:
            raise SchemaError(f"field {field!r} has no positions; phrases need analyzed_text")
        tids = [fi.term_ids.get(t) for t in terms]
        if any(t is None for t in tids):
            return self.empty()
        candidates = DocSet.intersect_all(
            DocSet(fi.docs_for(t), self.doc_count, trusted=True) for t in tids)
        if len(terms) == 1 or not candidates:
            return candidates
        cand = candidates.ids
        # Encode (doc, start position) as one int64 key and intersect per term.
        width = int(fi.positions.max()) + 2
        keys = None
        for offset, tid in enumerate(tids):
            entry = np.searchsorted(fi.docs_for(tid), cand)
            base = fi.post_ptr[tid] + entry
            starts, ends = fi.pos_ptr[base], fi.pos_ptr[base + 1]
            rows = kernels.gather_ranges(starts, ends)
            doc_of_row = np.repeat(cand.astype(np.int64), ends - starts)
            start_pos = fi.positions[rows].astype(np.int64) - offset
            ok = start_pos >= 0
            k = np.unique(doc_of_row[ok] * width + start_pos[ok])
            keys = k if keys is None else np.intersect1d(keys, k, assume_unique=True)
            if len(keys) == 0:
                return self.empty()
        return DocSet(np.unique(keys // width), self.doc_count, trusted=True)

    def postings(self, field: str, term: str) -> PostingsList:
        fi = self.field(field)
        tid = fi.term_ids.get(term)
        if tid is None:
            return PostingsList(term, [])
        docs = fi.docs_for(tid).tolist()
        if fi.schema.positional:
            pos = [tuple(p.tolist()) for p in fi.positions_for(tid)]
        else:
            pos = [()] * len(docs)
        return PostingsList(term, list(zip(docs, pos)))

    def doc_frequency(self, field: str, term: str) -> int:
        fi = self.field(field)
        tid = fi.term_ids.get(term)
        return 0 if tid is None else int(fi.doc_freq[tid])

    def forward(self, field: str, doc: int) -> list[str]:
        """Distinct terms of internal doc ``doc`` in ``field``, lexicographic."""
        fi = self.field(field)
        row = fi.fwd_terms[fi.fwd_ptr[doc]:fi.fwd_ptr[doc + 1]]
        return [fi.terms[t] for t in row]

    def field_terms(self, field: str) -> list[str]:
        return list(self.field(field).terms)

    def enumerate_field_terms(self, field: str, docs: DocSet) -> list[tuple[str, int]]:
        """Every term of ``field`` present in ``docs`` with its doc count there.

        Ordered by count descending, then term.
        """
        fi = self.field(field)
        counts = fi.term_counts(docs)
        hit = np.flatnonzero(counts)
        pairs = [(fi.terms[t], int(counts[t])) for t in hit]
        pairs.sort(key=lambda p: (-p[1], p[0]))
        return pairs

    def same_content(self, other: IndexSnapshot) -> bool:
        return (self.schema == other.schema and self._external == other._external
                and self.fields == other.fields)

    def __repr__(self):
        return (f"IndexSnapshot(docs={self.doc_count}, fields={list(self.fields)}, "
                f"generation={self.generation})")


@dataclass
class _FieldBuffer:
    vocab: list[str] = field(default_factory=list)
    vocab_ids: dict[str, int] = field(default_factory=dict)
    tids: list[np.ndarray] = field(default_factory=list)
    docs: list[np.ndarray] = field(default_factory=list)
    pos: list[np.ndarray] = field(default_factory=list)

    def term_id(self, term: str) -> int:
        tid = self.vocab_ids.get(term)
        if tid is None:
            tid = self.vocab_ids[term] = len(self.vocab)
            self.vocab.append(term)
        return tid

    def arrays(self):
        if not self.tids:
            e = np.empty(0, dtype=np.int64)
            return e, e, e
        return (np.concatenate(self.tids), np.concatenate(self.docs), np.concatenate(self.pos))

    def compact(self):
        if len(self.tids) > 1:
            t, d, p = self.arrays()
            self.tids, self.docs, self.pos = [t], [d], [p]


class IndexWriter:
    """Single writer. Stages documents; :meth:`commit` publishes a snapshot.

    Internal ids are dense and follow ingestion order. Readers call
    :attr:`snapshot` and never block on the writer.
    """

    def __init__(self, schema: Schema | None = None):
        self.schema = schema.copy() if schema is not None else Schema(closed=False)
        self._lock = threading.RLock()
        self._ids: list[str] = []
        self._id_set: set[str] = set()
        self._buffers: dict[str, _FieldBuffer] = {}
        self._pending: list[tuple[str, dict]] = []
        self._pending_ids: set[str] = set()
        self._generation = 0
        self._snapshot = IndexSnapshot(self.schema, [], self._build_fields(0), 0)

    @classmethod
    def from_snapshot(cls, snapshot: IndexSnapshot) -> IndexWriter:
        w = cls(snapshot.schema)
        w._ids = snapshot.external_ids
        w._id_set = set(w._ids)
        for name, fi in snapshot.fields.items():
            buf = _FieldBuffer(vocab=list(fi.terms), vocab_ids=dict(fi.term_ids))
            t, d, p = fi.raw_triples()
            buf.tids, buf.docs, buf.pos = [t], [d], [p]
            w._buffers[name] = buf
        w._generation = snapshot.generation
        w._snapshot = snapshot
        return w

    @property
    def snapshot(self) -> IndexSnapshot:
        return self._snapshot

    @property
    def pending_count(self) -> int:
        return len(self._pending)

    def _analyze(self, doc: Document, schema: Schema) -> dict:
        out = {}
        for name, value in doc.fields.items():
            fs = schema.resolve(name, value)
            values = value if isinstance(value, list) else [value]
            toks: list[tuple[str, int]] = []
            offset = 0
            for v in values:
                a = analyze_text(v, fs)
                if fs.positional:
                    toks.extend((t, p + offset) for t, p in a)
                    if a:
                        offset += a[-1][1] + 1 + VALUE_POSITION_GAP
                else:
                    toks.extend(a)
            out[name] = toks
        return out

    def add_document(self, doc: Document | dict) -> int:
        """Stage one document; returns the internal id it will receive."""
        return self.add_documents([doc])[0]

    def add_documents(self, docs: Iterable[Document | dict]) -> list[int]:
        """Stage a batch atomically: if any document is invalid nothing is staged."""
        with self._lock:
            schema = self.schema.copy()
            staged = []
            seen = set()
            for doc in docs:
                if not isinstance(doc, Document):
                    doc = Document.from_json(doc)
                if doc.id in self._id_set or doc.id in self._pending_ids or doc.id in seen:
                    raise DuplicateIdError(f"duplicate document id {doc.id!r}")
                seen.add(doc.id)
                staged.append((doc.id, self._analyze(doc, schema)))
            self.schema = schema
            first = len(self._ids) + len(self._pending)
            self._pending.extend(staged)
            self._pending_ids.update(seen)
            return list(range(first, first + len(staged)))

    def rollback(self) -> None:
        with self._lock:
            self._pending.clear()
            self._pending_ids.clear()
            self.schema = self._snapshot.schema.copy()

    def _build_fields(self, n_docs: int) -> dict[str, FieldIndex]:
        out = {}
        for fs in self.schema:
            buf = self._buffers.get(fs.name) or _FieldBuffer()
            t, d, p = buf.arrays()
            out[fs.name] = FieldIndex.build(fs, n_docs, buf.vocab, t, d, p)
        return out

    def commit(self) -> IndexSnapshot:
        with self._lock:
            if not self._pending and self.schema == self._snapshot.schema:
                return self._snapshot
            base = len(self._ids)
            added: dict[str, tuple[list, list, list]] = {}
            for offset, (_, analyzed) in enumerate(self._pending):
                doc = base + offset
                for name, toks in analyzed.items():
                    buf = self._buffers.setdefault(name, _FieldBuffer())
                    t, d, p = added.setdefault(name, ([], [], []))
                    for term, pos in toks:
                        t.append(buf.term_id(term))
                        d.append(doc)
                        p.append(pos)
            for name, (t, d, p) in added.items():
                buf = self._buffers[name]
                buf.tids.append(np.asarray(t, dtype=np.int64))
                buf.docs.append(np.asarray(d, dtype=np.int64))
                buf.pos.append(np.asarray(p, dtype=np.int64))
                buf.compact()
            ids = self._ids + [doc_id for doc_id, _ in self._pending]
            fields = self._build_fields(len(ids))
            self._generation += 1
            snap = IndexSnapshot(self.schema, ids, fields, self._generation)
            self._ids = ids
            self._id_set.update(self._pending_ids)
            self._pending.clear()
            self._pending_ids.clear()
            self._snapshot = snap
            return snap


def build_snapshot(docs: Iterable[Document | dict], schema: Schema | None = None) -> IndexSnapshot:
    """Convenience: index ``docs`` in one batch and commit."""
    w = IndexWriter(schema)
    w.add_documents(docs)
    return w.commit()


__all__ = [
    "Document",
    "FieldIndex",
    "FieldKind",
    "IndexSnapshot",
    "IndexWriter",
    "PostingsList",
    "build_snapshot",
]
