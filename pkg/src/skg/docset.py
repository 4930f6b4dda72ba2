"""Ordered sets of internal document ids."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from . import kernels

# Above this fraction of the universe both operands go through a boolean mask.
DENSE_FRACTION = 1 / 16
# Size ratio at which intersection switches from linear merge to galloping.
GALLOP_RATIO = 8


def _as_ids(ids) -> np.ndarray:
    arr = np.asarray(ids, dtype=kernels.ID_DTYPE)
    if arr.ndim != 1:
        raise ValueError("doc ids must be one-dimensional")
    return arr


class DocSet:
    """Sorted, duplicate-free document ids drawn from ``range(universe)``.

    Instances are immutable. Binary operations require both sides to share a
    universe, i.e. to come from the same snapshot.
    """

    __slots__ = ("_ids", "universe")

    def __init__(self, ids, universe: int, *, trusted: bool = False):
        arr = _as_ids(ids)
        if not trusted:
            arr = np.unique(arr)
            if len(arr) and (arr[0] < 0 or arr[-1] >= universe):
                raise ValueError(f"doc id out of range for universe of {universe}")
        arr.flags.writeable = False
        self._ids = arr
        self.universe = int(universe)

    @classmethod
    def empty(cls, universe: int) -> DocSet:
        return cls(np.empty(0, dtype=kernels.ID_DTYPE), universe, trusted=True)

    @classmethod
    def full(cls, universe: int) -> DocSet:
        return cls(np.arange(universe, dtype=kernels.ID_DTYPE), universe, trusted=True)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> DocSet:
        return cls(np.flatnonzero(mask).astype(kernels.ID_DTYPE), len(mask), trusted=True)

    @property
    def ids(self) -> np.ndarray:
        return self._ids

    def mask(self) -> np.ndarray:
        m = np.zeros(self.universe, dtype=bool)
        m[self._ids] = True
        return m

    def _dense(self) -> bool:
        return len(self._ids) > self.universe * DENSE_FRACTION

    def _check(self, other: DocSet) -> None:
        if not isinstance(other, DocSet):
            raise TypeError(f"expected DocSet, got {type(other).__name__}")
        if other.universe != self.universe:
            raise ValueError("DocSets come from different snapshots")

    def intersect(self, other: DocSet) -> DocSet:
        self._check(other)
        a, b = self._ids, other._ids
        if len(a) > len(b):
            a, b = b, a
        if len(a) == 0:
            return DocSet.empty(self.universe)
        if self._dense() and other._dense():
            # probe the larger side's bitset with the smaller side
            big = np.zeros(self.universe, dtype=bool)
            big[b] = True
            out = a[big[a]]
        elif len(b) >= GALLOP_RATIO * len(a):
            out = kernels.intersect_gallop(a, b)
        else:
            out = kernels.intersect_merge(a, b)
        return DocSet(out, self.universe, trusted=True)

    def union(self, other: DocSet) -> DocSet:
        self._check(other)
        if len(other._ids) == 0:
            return self
        if len(self._ids) == 0:
            return other
        if self._dense() or other._dense():
            m = self.mask()
            m[other._ids] = True
            return DocSet.from_mask(m)
        return DocSet(kernels.union(self._ids, other._ids), self.universe, trusted=True)

    def difference(self, other: DocSet) -> DocSet:
        self._check(other)
        if len(self._ids) == 0 or len(other._ids) == 0:
            return self
        if other._dense():
            m = other.mask()
            return DocSet(self._ids[~m[self._ids]], self.universe, trusted=True)
        return DocSet(kernels.difference(self._ids, other._ids), self.universe, trusted=True)

    def complement(self) -> DocSet:
        m = np.ones(self.universe, dtype=bool)
        m[self._ids] = False
        return DocSet.from_mask(m)

    def intersection_size(self, other: DocSet) -> int:
        self._check(other)
        return int(kernels.intersect_count(self._ids, other._ids))

    @staticmethod
    def intersect_all(sets: Iterable[DocSet]) -> DocSet:
        """Intersect smallest-first so every step shrinks the working set."""
        ordered = sorted(sets, key=len)
        if not ordered:
            raise ValueError("intersect_all needs at least one DocSet")
        acc = ordered[0]
        for s in ordered[1:]:
            if not acc:
                break
            acc = acc.intersect(s)
        return acc

    __and__ = intersect
    __or__ = union
    __sub__ = difference

    def cardinality(self) -> int:
        return len(self._ids)

    def __len__(self) -> int:
        return len(self._ids)

    def __bool__(self) -> bool:
        return len(self._ids) > 0

    def __iter__(self):
        return iter(self._ids.tolist())

    def __contains__(self, doc) -> bool:
        i = np.searchsorted(self._ids, doc)
        return bool(i < len(self._ids) and self._ids[i] == doc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DocSet):
            return NotImplemented
        return self.universe == other.universe and np.array_equal(self._ids, other._ids)

    def __hash__(self):
        return hash((self.universe, self._ids.tobytes()))

    def __repr__(self) -> str:
        shown = self._ids[:8].tolist()
        more = ", ..." if len(self._ids) > 8 else ""
        return f"DocSet({shown}{more}, n={len(self._ids)}, universe={self.universe})"
