"""Kernel dispatch.

Numba-compiled kernels are used when numba imports cleanly, unless the
environment variable ``SKG_DISABLE_NUMBA`` is set to a truthy value, in which
case the pure-numpy twins are used. ``BACKEND`` names the active choice.
"""

import logging
import os

from . import _kernels_numpy

logger = logging.getLogger(__name__)


def _numba_requested():
    flag = os.environ.get("SKG_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


_impl = _kernels_numpy
BACKEND = "numpy"
if _numba_requested():
    try:
        from . import _kernels_numba as _impl  # noqa: F811

        BACKEND = "numba"
    except ImportError:
        logger.warning("numba unavailable; using numpy kernels")

ID_DTYPE = _kernels_numpy.ID_DTYPE

intersect_merge = _impl.intersect_merge
intersect_gallop = _impl.intersect_gallop
intersect_count = _impl.intersect_count
union = _impl.union
difference = _impl.difference
gather_ranges = _impl.gather_ranges
count_terms = _impl.count_terms

__all__ = [
    "BACKEND",
    "ID_DTYPE",
    "intersect_merge",
    "intersect_gallop",
    "intersect_count",
    "union",
    "difference",
    "gather_ranges",
    "count_terms",
]
