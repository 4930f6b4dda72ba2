"""Numba-compiled kernels; signatures mirror ``_kernels_numpy``."""

import numpy as np
from numba import njit

ID_DTYPE = np.int32


@njit(cache=True, nogil=True)
def intersect_merge(a, b):
    out = np.empty(min(len(a), len(b)), dtype=np.int32)
    i = j = k = 0
    while i < len(a) and j < len(b):
        x, y = a[i], b[j]
        if x == y:
            out[k] = x
            k += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return out[:k]


@njit(cache=True, nogil=True)
def _gallop(big, lo, target):
    # smallest index >= lo with big[index] >= target
    n = len(big)
    step = 1
    hi = lo
    while hi < n and big[hi] < target:
        lo = hi + 1
        hi += step
        step <<= 1
    if hi > n:
        hi = n
    while lo < hi:
        mid = (lo + hi) >> 1
        if big[mid] < target:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True, nogil=True)
def intersect_gallop(small, big):
    out = np.empty(len(small), dtype=np.int32)
    k = 0
    pos = 0
    n = len(big)
    for i in range(len(small)):
        x = small[i]
        pos = _gallop(big, pos, x)
        if pos >= n:
            break
        if big[pos] == x:
            out[k] = x
            k += 1
            pos += 1
    return out[:k]


@njit(cache=True, nogil=True)
def intersect_count(a, b):
    i = j = k = 0
    while i < len(a) and j < len(b):
        x, y = a[i], b[j]
        if x == y:
            k += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return k


@njit(cache=True, nogil=True)
def union(a, b):
    out = np.empty(len(a) + len(b), dtype=np.int32)
    i = j = k = 0
    while i < len(a) and j < len(b):
        x, y = a[i], b[j]
        if x == y:
            out[k] = x
            i += 1
            j += 1
        elif x < y:
            out[k] = x
            i += 1
        else:
            out[k] = y
            j += 1
        k += 1
    while i < len(a):
        out[k] = a[i]
        i += 1
        k += 1
    while j < len(b):
        out[k] = b[j]
        j += 1
        k += 1
    return out[:k]


@njit(cache=True, nogil=True)
def difference(a, b):
    out = np.empty(len(a), dtype=np.int32)
    i = j = k = 0
    while i < len(a):
        x = a[i]
        while j < len(b) and b[j] < x:
            j += 1
        if j == len(b) or b[j] != x:
            out[k] = x
            k += 1
        i += 1
    return out[:k]


@njit(cache=True, nogil=True)
def gather_ranges(starts, ends):
    total = 0
    for i in range(len(starts)):
        if ends[i] > starts[i]:
            total += ends[i] - starts[i]
    out = np.empty(total, dtype=np.int64)
    k = 0
    for i in range(len(starts)):
        for r in range(starts[i], ends[i]):
            out[k] = r
            k += 1
    return out


@njit(cache=True, nogil=True)
def count_terms(ptr, term_ids, docs, n_terms):
    counts = np.zeros(n_terms, dtype=np.int64)
    for i in range(len(docs)):
        d = docs[i]
        for r in range(ptr[d], ptr[d + 1]):
            counts[term_ids[r]] += 1
    return counts
