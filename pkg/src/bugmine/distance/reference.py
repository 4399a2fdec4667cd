"""Brute-force reference implementations of the distance kernels.

These enumerate the full search space instead of running the DP recurrences,
so they stay independent of the fast kernels and serve as test oracles.
Only practical for short sequences (length <= ~8).
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence


def _is_subsequence(needle: Sequence, haystack: Sequence) -> bool:
    it = iter(haystack)
    return all(any(sym == h for h in it) for sym in needle)


def lcs_length_bruteforce(s1: Sequence, s2: Sequence) -> int:
    """Longest common subsequence length by enumerating subsequences of s1."""
    if len(s1) > len(s2):
        s1, s2 = s2, s1
    n = len(s1)
    for length in range(n, 0, -1):
        for picked in combinations(range(n), length):
            if _is_subsequence([s1[i] for i in picked], s2):
                return length
    return 0


def dtw_distance_bruteforce(s1: Sequence, s2: Sequence) -> int:
    """Minimum 0/1 warping cost by exhaustive search over all warping paths."""
    if not s1 or not s2:
        raise ValueError("dtw requires non-empty sequences")
    n, m = len(s1), len(s2)

    def walk(i: int, j: int) -> int:
        cost = 0 if s1[i] == s2[j] else 1
        if i == n - 1 and j == m - 1:
            return cost
        best = None
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            ni, nj = i + di, j + dj
            if ni < n and nj < m:
                tail = walk(ni, nj)
                if best is None or tail < best:
                    best = tail
        return cost + best

    return walk(0, 0)
