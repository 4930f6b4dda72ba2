"""Pure-numpy implementations of the hot set and counting kernels.

Every function here has a twin in ``_kernels_numba`` with an identical
signature; ``skg.kernels`` picks one of the two at import time.
"""

import numpy as np

ID_DTYPE = np.int32


def intersect_merge(a, b):
    return np.intersect1d(a, b, assume_unique=True).astype(ID_DTYPE, copy=False)


def intersect_gallop(small, big):
    if len(small) == 0 or len(big) == 0:
        return np.empty(0, dtype=ID_DTYPE)
    idx = np.searchsorted(big, small)
    np.minimum(idx, len(big) - 1, out=idx)
    return small[big[idx] == small].astype(ID_DTYPE, copy=False)


def intersect_count(a, b):
    if len(a) > len(b):
        a, b = b, a
    if len(a) == 0:
        return 0
    idx = np.searchsorted(b, a)
    np.minimum(idx, len(b) - 1, out=idx)
    return int(np.count_nonzero(b[idx] == a))


def union(a, b):
    return np.union1d(a, b).astype(ID_DTYPE, copy=False)


def difference(a, b):
    return np.setdiff1d(a, b, assume_unique=True).astype(ID_DTYPE, copy=False)


def gather_ranges(starts, ends):
    """Concatenate ``arange(s, e)`` for every (s, e) pair."""
    lengths = ends - starts
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    keep = lengths > 0
    starts, lengths = starts[keep], lengths[keep]
    offsets = np.cumsum(lengths) - lengths
    out = np.ones(total, dtype=np.int64)
    out[0] = starts[0]
    # jump from the end of one range to the start of the next
    out[offsets[1:]] = starts[1:] - (starts[:-1] + lengths[:-1] - 1)
    return np.cumsum(out)


def count_terms(ptr, term_ids, docs, n_terms):
    """Per-term count of ``docs`` whose forward row contains the term."""
    if len(docs) == 0:
        return np.zeros(n_terms, dtype=np.int64)
    rows = gather_ranges(ptr[docs], ptr[docs + 1])
    return np.bincount(term_ids[rows], minlength=n_terms).astype(np.int64, copy=False)
