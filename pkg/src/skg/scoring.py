"""Edge scorers over foreground/background document sets.

The relatedness of a candidate node is the z statistic of its foreground
occurrence count against the rate expected from the background,

    z = (y - n*p) / sqrt(n*p*(1-p)),   n = |FG|, y = |FG & C|, p = |C & BG| / |BG|

squashed into (-1, 1) with ``tanh(z/2)``. Degenerate inputs (n = 0, p = 0,
p = 1) give z = 0. Candidates are always clipped to the background first.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .docset import DocSet
from .errors import ScoringError


class ScorerKind(str, enum.Enum):
    RELATEDNESS = "relatedness"
    POPULARITY = "popularity"
    CONSEQUENT = "consequent"
    ANTECEDENT = "antecedent"


@dataclass(frozen=True)
class ScoringContext:
    foreground: DocSet
    background: DocSet

    def __post_init__(self):
        if not self.background:
            raise ScoringError("background document set is empty")
        object.__setattr__(self, "foreground", self.foreground & self.background)

    @property
    def n(self) -> int:
        return len(self.foreground)


@dataclass(frozen=True)
class EdgeScore:
    relatedness: float
    popularity: int
    foreground_popularity: int
    background_popularity: int
    raw_z: float

    @classmethod
    def zero(cls) -> EdgeScore:
        return cls(0.0, 0, 0, 0, 0.0)


def z_from_counts(y, n, bg_count, bg_size):
    """z statistic from raw counts; works on scalars or numpy arrays."""
    y = np.asarray(y, dtype=np.float64)
    bg_count = np.asarray(bg_count, dtype=np.float64)
    p = bg_count / float(bg_size)
    var = float(n) * p * (1.0 - p)
    ok = (var > 0) & (n > 0)
    z = np.zeros(np.broadcast(y, p).shape, dtype=np.float64)
    np.divide(y - n * p, np.sqrt(var, where=ok, out=np.ones_like(var)), out=z, where=ok)
    return z if z.ndim else float(z)


def sigmoid_normalize(z):
    """Map z onto (-1, 1): ``2/(1+exp(-z)) - 1``, computed as ``tanh(z/2)``."""
    if isinstance(z, np.ndarray):
        return np.tanh(z / 2.0)
    return math.tanh(z / 2.0)


def z_score(ctx: ScoringContext, candidate: DocSet) -> float:
    cand = candidate & ctx.background
    y = ctx.foreground.intersection_size(cand)
    return z_from_counts(y, ctx.n, len(cand), len(ctx.background))


def relatedness(ctx: ScoringContext, candidate: DocSet) -> EdgeScore:
    cand = candidate & ctx.background
    y = ctx.foreground.intersection_size(cand)
    z = z_from_counts(y, ctx.n, len(cand), len(ctx.background))
    return EdgeScore(sigmoid_normalize(z), y, y, len(cand), z)


def popularity(ctx: ScoringContext, candidate: DocSet) -> int:
    return ctx.foreground.intersection_size(candidate & ctx.background)


def consequent_confidence(ctx: ScoringContext, candidate: DocSet) -> float:
    """Confidence of the rule foreground -> candidate: |FG & C| / |FG|."""
    if ctx.n == 0:
        raise ScoringError("consequent confidence undefined for an empty foreground")
    return popularity(ctx, candidate) / ctx.n


@dataclass(frozen=True)
class PathState:
    """Where a traversal stands: the starting node plus the nodes chosen since.

    ``start`` holds the starting node's docs (clipped to the background) and
    ``intermediates`` every later node on the path, in order.
    """

    start: DocSet
    background: DocSet
    intermediates: tuple[DocSet, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "start", self.start & self.background)

    def extend(self, docs: DocSet) -> PathState:
        return PathState(self.start, self.background, self.intermediates + (docs,))

    @property
    def at_start(self) -> bool:
        return not self.intermediates

    def foreground(self) -> DocSet:
        return path_foreground((self.start,) + self.intermediates)

    def antecedent_denominator(self) -> int:
        if self.at_start:
            return len(self.background)
        return len(DocSet.intersect_all(self.intermediates + (self.background,)))

    def context(self) -> ScoringContext:
        return ScoringContext(self.foreground(), self.background)


def antecedent_confidence(state: PathState, candidate: DocSet) -> float:
    """Confidence of the rule (path nodes after the start, candidate) -> start.

    ``|C & start| / |BG|`` at the starting node, otherwise
    ``|C & start| / |intersection of the later path nodes & BG|``. The
    numerator is not restricted to the later nodes, so the ratio can exceed 1.
    """
    denom = state.antecedent_denominator()
    if denom == 0:
        raise ScoringError("antecedent confidence has an empty denominator")
    return state.start.intersection_size(candidate & state.background) / denom


def path_foreground(path: Sequence[DocSet]) -> DocSet:
    """Foreground for scoring the next hop: every node on the path intersected."""
    if len(path) == 0:
        raise ValueError("path must contain at least one node")
    return DocSet.intersect_all(path)


def score_edge(kind: ScorerKind, state: PathState, candidate: DocSet) -> tuple[EdgeScore, float]:
    """EdgeScore plus the ranking score of ``kind`` for one candidate on a path.

    Confidence scorers return 0 where their denominator is empty, so a
    traversal over an empty foreground degrades to zeros instead of failing.
    """
    kind = ScorerKind(kind)
    ctx = state.context()
    es = relatedness(ctx, candidate)
    if kind is ScorerKind.RELATEDNESS:
        return es, es.relatedness
    if kind is ScorerKind.POPULARITY:
        return es, float(es.popularity)
    if kind is ScorerKind.CONSEQUENT:
        return es, (es.popularity / ctx.n) if ctx.n else 0.0
    denom = state.antecedent_denominator()
    return es, (antecedent_confidence(state, candidate) if denom else 0.0)
