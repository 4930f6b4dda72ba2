"""Nested graph traversal: discover, score, rank and recurse.

A request names a starting node (query strings, AND-ed) and a tree of
levels. Each level discovers values of one field among the current
foreground, scores them with its scorer conditioned on the whole path, keeps
the top ``limit`` and appends any explicitly requested values. Every kept
value becomes the next hop for that level's children.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analysis import analyze_text
from .docset import DocSet
from .errors import RequestError, SchemaError
from .index import FieldIndex, IndexSnapshot
from .query import _leaf_docs, combine_starting_node, evaluate, parse_query
from .scoring import (
    EdgeScore,
    PathState,
    ScorerKind,
    ScoringContext,
    score_edge,
    sigmoid_normalize,
    z_from_counts,
)

DEFAULT_DEPTH_CAP = 5
DEFAULT_LIMIT = 10


@dataclass
class NodeSpec:
    type: str
    limit: int = DEFAULT_LIMIT
    discover_values: bool = True
    values: list[str] = field(default_factory=list)
    min_count: int = 1
    scorer: ScorerKind = ScorerKind.RELATEDNESS
    nodes: list[NodeSpec] = field(default_factory=list)

    _KEYS = ("type", "limit", "discover_values", "values", "min_count", "scorer", "nodes")

    def __post_init__(self):
        self.scorer = ScorerKind(self.scorer)
        if self.limit < 0:
            raise RequestError("limit must be >= 0")
        if self.min_count < 1:
            raise RequestError("min_count must be >= 1")
        if not self.discover_values and not self.values:
            raise RequestError(f"level {self.type!r} neither discovers values nor lists any")

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.nodes), default=0)

    @classmethod
    def from_json(cls, obj, default_scorer=ScorerKind.RELATEDNESS) -> NodeSpec:
        if not isinstance(obj, dict):
            raise RequestError("each node must be a JSON object")
        unknown = set(obj) - set(cls._KEYS)
        if unknown:
            raise RequestError(f"unknown node keys: {sorted(unknown)}")
        if not isinstance(obj.get("type"), str) or not obj["type"]:
            raise RequestError("node 'type' must be a nonempty string")
        values = obj.get("values", [])
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise RequestError("'values' must be a list of strings")
        scorer = obj.get("scorer", default_scorer)
        try:
            scorer = ScorerKind(scorer)
        except ValueError:
            raise RequestError(f"unknown scorer {scorer!r}") from None
        children = obj.get("nodes", [])
        if not isinstance(children, list):
            raise RequestError("'nodes' must be a list")
        discover = obj.get("discover_values", True)
        if not isinstance(discover, bool):
            raise RequestError("'discover_values' must be a boolean")
        return cls(
            type=obj["type"],
            limit=_count(obj, "limit", DEFAULT_LIMIT),
            discover_values=discover,
            values=list(values),
            min_count=_count(obj, "min_count", 1),
            scorer=scorer,
            nodes=[cls.from_json(c, default_scorer) for c in children],
        )


def _count(obj, key, default) -> int:
    v = obj.get(key, default)
    # counts may arrive as JSON doubles such as 3.0
    if isinstance(v, bool) or not isinstance(v, (int, float)) or v != int(v):
        raise RequestError(f"{key!r} must be an integer")
    return int(v)


@dataclass
class TraversalRequest:
    starting_node: list[str]
    nodes: list[NodeSpec]
    background: str | None = None

    def __post_init__(self):
        if not self.starting_node:
            raise RequestError("starting_node must list at least one query")

    def depth(self) -> int:
        return max((n.depth() for n in self.nodes), default=0)

    @classmethod
    def from_json(cls, obj, default_scorer=ScorerKind.RELATEDNESS) -> TraversalRequest:
        if not isinstance(obj, dict):
            raise RequestError("request must be a JSON object")
        unknown = set(obj) - {"starting_node", "nodes", "background"}
        if unknown:
            raise RequestError(f"unknown request keys: {sorted(unknown)}")
        start = obj.get("starting_node")
        if isinstance(start, str):
            start = [start]
        if not isinstance(start, list) or not all(isinstance(s, str) for s in start):
            raise RequestError("starting_node must be a list of query strings")
        bg = obj.get("background")
        if bg is not None and not isinstance(bg, str):
            raise RequestError("background must be a query string")
        nodes = obj.get("nodes", [])
        if not isinstance(nodes, list):
            raise RequestError("'nodes' must be a list")
        return cls(start, [NodeSpec.from_json(n, default_scorer) for n in nodes], bg)


@dataclass
class ScoredValue:
    name: str
    score: EdgeScore
    rank_score: float
    scorer: ScorerKind
    docs: DocSet
    state: PathState
    nodes: list[LevelResult] = field(default_factory=list)
    explicit: bool = False

    @property
    def foreground(self) -> DocSet:
        """Foreground handed to this value's children: the path so far, intersected."""
        return self.state.foreground()

    def to_json(self, with_children: bool) -> dict:
        out = {
            "name": self.name,
            "relatedness": self.score.relatedness,
            "popularity": self.score.popularity,
            "foreground_popularity": self.score.foreground_popularity,
            "background_popularity": self.score.background_popularity,
        }
        if self.scorer in (ScorerKind.CONSEQUENT, ScorerKind.ANTECEDENT):
            out["confidence"] = self.rank_score
        if with_children:
            out["nodes"] = [lvl.to_json() for lvl in self.nodes]
        return out


@dataclass
class LevelResult:
    spec: NodeSpec
    values: list[ScoredValue]

    def to_json(self) -> dict:
        return {
            "type": self.spec.type,
            "values": [v.to_json(bool(self.spec.nodes)) for v in self.values],
        }


@dataclass
class TraversalResponse:
    nodes: list[LevelResult]
    start: DocSet

    def to_json(self) -> dict:
        return {"nodes": [lvl.to_json() for lvl in self.nodes]}


def _state_of(ctx) -> PathState:
    if isinstance(ctx, PathState):
        return ctx
    if isinstance(ctx, ScoringContext):
        return PathState(ctx.foreground, ctx.background)
    raise TypeError(f"expected ScoringContext or PathState, got {type(ctx).__name__}")


def _score_terms(fi: FieldIndex, state: PathState, fg: DocSet, tids: np.ndarray,
                 fg_counts: np.ndarray, kind: ScorerKind):
    """Vectorized EdgeScore components and ranking scores for term ids."""
    bg = state.background
    y = fg_counts[tids]
    bg_counts = fi.term_counts(bg)[tids]
    n = len(fg)
    z = z_from_counts(y, n, bg_counts, len(bg))
    r = sigmoid_normalize(z)
    if kind is ScorerKind.RELATEDNESS:
        score = r
    elif kind is ScorerKind.POPULARITY:
        score = y.astype(np.float64)
    elif kind is ScorerKind.CONSEQUENT:
        score = y / n if n else np.zeros(len(tids))
    else:
        denom = state.antecedent_denominator()
        start_counts = fi.term_counts(state.start)[tids]
        score = start_counts / denom if denom else np.zeros(len(tids))
    return y, bg_counts, z, r, score


def _rank(tids, y, score) -> np.ndarray:
    # score desc, then foreground popularity desc, then term asc (term ids
    # follow lexicographic order)
    return np.lexsort((tids, -y, -score))


def discover_values(snapshot: IndexSnapshot, ctx, field: str, min_count: int = 1) -> list[str]:
    """Terms of ``field`` found in at least ``min_count`` foreground docs, lexicographic."""
    fi = snapshot.field(field)
    fg = _state_of(ctx).foreground()
    if not fg:
        return []
    counts = fi.term_counts(fg)
    return [fi.terms[t] for t in np.flatnonzero(counts >= max(min_count, 1))]


def score_and_rank(snapshot: IndexSnapshot, ctx, field: str, candidates: Sequence[str],
                   scorer=ScorerKind.RELATEDNESS, limit: int = DEFAULT_LIMIT,
                   explicit_values: Sequence[str] = ()) -> list[ScoredValue]:
    """Top ``limit`` of ``candidates`` by ``scorer``, then every explicit value."""
    fi = snapshot.field(field)
    state = _state_of(ctx)
    tids = np.array(sorted({fi.term_ids[c] for c in candidates if c in fi.term_ids}),
                    dtype=np.int64)
    return _level_values(snapshot, fi, state, tids, ScorerKind(scorer), limit, explicit_values)


def _level_values(snapshot, fi, state, tids, kind, limit, explicit_values, fg=None, fg_counts=None):
    fg = state.foreground() if fg is None else fg
    out: list[ScoredValue] = []
    if len(tids) and limit > 0:
        if fg_counts is None:
            fg_counts = fi.term_counts(fg)
        y, bgc, z, r, score = _score_terms(fi, state, fg, tids, fg_counts, kind)
        for i in _rank(tids, y, score)[:limit]:
            t = int(tids[i])
            docs = DocSet(fi.docs_for(t), snapshot.doc_count, trusted=True)
            es = EdgeScore(float(r[i]), int(y[i]), int(y[i]), int(bgc[i]), float(z[i]))
            out.append(ScoredValue(fi.terms[t], es, float(score[i]), kind, docs, state.extend(docs)))
    seen = {v.name for v in out}
    for raw in explicit_values:
        name, docs = _explicit_docs(snapshot, fi, raw)
        if name in seen:
            continue
        seen.add(name)
        if docs:
            es, s = score_edge(kind, state, docs)
        else:
            es, s = EdgeScore.zero(), 0.0
        out.append(ScoredValue(name, es, float(s), kind, docs, state.extend(docs), explicit=True))
    return out


def _explicit_docs(snapshot: IndexSnapshot, fi: FieldIndex, raw: str):
    terms = [t for t, _ in analyze_text(raw, fi.schema)]
    name = " ".join(terms) if terms else raw
    if not terms:
        return name, snapshot.empty()
    return name, _leaf_docs(snapshot, fi.name, [raw])


class Traverser:
    """Runs traversal requests against one snapshot."""

    def __init__(self, snapshot: IndexSnapshot, depth_cap: int = DEFAULT_DEPTH_CAP,
                 default_scorer=ScorerKind.RELATEDNESS):
        if depth_cap < 1:
            raise ValueError("depth cap must be >= 1")
        self.snapshot = snapshot
        self.depth_cap = depth_cap
        self.default_scorer = ScorerKind(default_scorer)

    def _check_fields(self, specs: Sequence[NodeSpec]) -> None:
        for spec in specs:
            if spec.type not in self.snapshot.fields:
                raise SchemaError(f"unknown field {spec.type!r}")
            self._check_fields(spec.nodes)

    def traverse(self, request: TraversalRequest | dict) -> TraversalResponse:
        if isinstance(request, dict):
            request = TraversalRequest.from_json(request, self.default_scorer)
        if request.depth() > self.depth_cap:
            raise RequestError(
                f"traversal depth {request.depth()} exceeds the cap of {self.depth_cap}")
        start_expr = combine_starting_node(request.starting_node)
        bg_expr = parse_query(request.background) if request.background else None
        self._check_fields(request.nodes)
        start = evaluate(start_expr, self.snapshot)
        background = self.snapshot.all_docs() if bg_expr is None else evaluate(bg_expr, self.snapshot)
        if not background:
            raise RequestError("background matches no documents")
        state = PathState(start, background)
        return TraversalResponse([self._level(spec, state) for spec in request.nodes], start)

    def _level(self, spec: NodeSpec, state: PathState) -> LevelResult:
        fi = self.snapshot.field(spec.type)
        fg = state.foreground()
        tids = np.empty(0, dtype=np.int64)
        fg_counts = None
        if spec.discover_values and spec.limit > 0 and fg:
            fg_counts = fi.term_counts(fg)
            tids = np.flatnonzero(fg_counts >= spec.min_count)
        values = _level_values(self.snapshot, fi, state, tids, spec.scorer, spec.limit,
                               spec.values, fg=fg, fg_counts=fg_counts)
        if spec.nodes:
            for v in values:
                v.nodes = [self._level(child, v.state) for child in spec.nodes]
        return LevelResult(spec, values)


def traverse(snapshot: IndexSnapshot, request, depth_cap: int = DEFAULT_DEPTH_CAP) -> TraversalResponse:
    return Traverser(snapshot, depth_cap).traverse(request)
