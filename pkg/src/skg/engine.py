"""A writer, its published snapshot, and traversal in one object."""

from __future__ import annotations

import threading
from typing import Iterable

from .analysis import Schema
from .index import Document, IndexSnapshot, IndexWriter
from .persist import load_snapshot, save_snapshot
from .scoring import ScorerKind
from .traversal import DEFAULT_DEPTH_CAP, TraversalResponse, Traverser


class KnowledgeGraph:
    """Single writer, many readers.

    :meth:`update` stages and commits a batch atomically; readers grab
    :attr:`snapshot` and keep using it regardless of later updates.
    """

    def __init__(self, schema: Schema | None = None, depth_cap: int = DEFAULT_DEPTH_CAP,
                 default_scorer=ScorerKind.RELATEDNESS):
        self._writer = IndexWriter(schema)
        self._write_lock = threading.Lock()
        self.depth_cap = depth_cap
        self.default_scorer = ScorerKind(default_scorer)

    @property
    def snapshot(self) -> IndexSnapshot:
        return self._writer.snapshot

    @property
    def schema(self) -> Schema:
        return self.snapshot.schema

    def update(self, docs: Iterable[Document | dict]) -> int:
        docs = list(docs)
        with self._write_lock:
            try:
                self._writer.add_documents(docs)
                self._writer.commit()
            except BaseException:
                self._writer.rollback()
                raise
        return len(docs)

    def traverser(self) -> Traverser:
        return Traverser(self.snapshot, self.depth_cap, self.default_scorer)

    def traverse(self, request) -> TraversalResponse:
        return self.traverser().traverse(request)

    def save(self, path):
        return save_snapshot(self.snapshot, path)

    def load(self, path) -> IndexSnapshot:
        snap = load_snapshot(path)
        with self._write_lock:
            self._writer = IndexWriter.from_snapshot(snap)
        return snap

    @classmethod
    def from_snapshot(cls, snapshot: IndexSnapshot, **kwargs) -> KnowledgeGraph:
        kg = cls(snapshot.schema, **kwargs)
        kg._writer = IndexWriter.from_snapshot(snapshot)
        return kg
