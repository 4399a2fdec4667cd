"""Sequence similarity and distance kernels for lifecycle traces.

Two metrics are provided:

* LCS length — a similarity score (higher means the traces are closer).
* DTW warping distance with 0/1 element cost (lower means closer).

The hot DP loops live in a compiled Cython extension with a pure-Python
fallback. The compiled backend is picked at import time when available;
set ``BUGMINE_FORCE_PURE=1`` to force the fallback (used by the benchmark).
"""

from __future__ import annotations

import enum
import os
from typing import Sequence

import numpy as np

from . import _pykernels
from .reference import dtw_distance_bruteforce, lcs_length_bruteforce

if os.environ.get("BUGMINE_FORCE_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

#: Name of the active kernel backend: "compiled" or "pure".
BACKEND: str = _impl.BACKEND_NAME


class Metric(enum.Enum):
    """Which kernel scores a trace pair, and how scores are ordered."""

    LCS = "lcs"
    DTW = "dtw"

    @property
    def higher_is_closer(self) -> bool:
        return self is Metric.LCS

    def better(self, a: int, b: int) -> bool:
        """True if score ``a`` is strictly closer than ``b`` under this metric."""
        return a > b if self is Metric.LCS else a < b


def _encode_pair(s1: Sequence, s2: Sequence) -> tuple[list[int], list[int]]:
    table: dict = {}
    a = [table.setdefault(sym, len(table)) for sym in s1]
    b = [table.setdefault(sym, len(table)) for sym in s2]
    return a, b


def lcs_length(s1: Sequence, s2: Sequence) -> int:
    """Length of the longest common subsequence (not necessarily contiguous).

    Symmetric; bounded by ``min(len(s1), len(s2))``; empty inputs score 0.
    """
    if not s1 or not s2:
        return 0
    a, b = _encode_pair(s1, s2)
    return int(_impl.lcs(a, b))


def dtw_distance(s1: Sequence, s2: Sequence) -> int:
    """Minimum total 0/1 cost over all warping paths between the sequences.

    Symmetric; 0 exactly when one sequence is the other with elements
    repeated in place. Raises ValueError on empty input.
    """
    if not s1 or not s2:
        raise ValueError("dtw_distance requires non-empty sequences")
    a, b = _encode_pair(s1, s2)
    return int(_impl.dtw(a, b))


def _activities(trace) -> Sequence:
    return getattr(trace, "activities", trace)


def similarity_matrix(traces: Sequence, metric: Metric) -> np.ndarray:
    """Pairwise score matrix over traces (Trace objects or raw sequences).

    Symmetric; the diagonal is the trace length for LCS and 0 for DTW.
    """
    if len(traces) == 0:
        raise ValueError("similarity_matrix requires at least one trace")
    table: dict = {}
    encoded = [
        _impl.prepare([table.setdefault(sym, len(table)) for sym in _activities(t)])
        for t in traces
    ]
    n = len(encoded)
    kernel = _impl.lcs if metric is Metric.LCS else _impl.dtw
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        if metric is Metric.LCS:
            out[i, i] = len(encoded[i])
        for j in range(i + 1, n):
            score = kernel(encoded[i], encoded[j])
            out[i, j] = score
            out[j, i] = score
    return out


__all__ = [
    "BACKEND",
    "Metric",
    "dtw_distance",
    "dtw_distance_bruteforce",
    "lcs_length",
    "lcs_length_bruteforce",
    "similarity_matrix",
]
