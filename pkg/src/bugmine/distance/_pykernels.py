"""Pure-Python fallback for the sequence distance kernels.

Same interface as the compiled ``_ckernels`` extension: sequences arrive as
lists of small non-negative ints (symbol ids). All scores are exact integers.
"""

from __future__ import annotations

BACKEND_NAME = "pure"


def prepare(ids: list[int]) -> list[int]:
    """Return the container the kernels below expect (a plain list)."""
    return ids


def lcs(a: list[int], b: list[int]) -> int:
    """Length of the longest common subsequence of ``a`` and ``b``."""
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return 0
    prev = [0] * (m + 1)
    curr = [0] * (m + 1)
    for i in range(n):
        ai = a[i]
        for j in range(m):
            if ai == b[j]:
                curr[j + 1] = prev[j] + 1
            else:
                left = curr[j]
                up = prev[j + 1]
                curr[j + 1] = left if left >= up else up
        prev, curr = curr, prev
    return prev[m]


def dtw(a: list[int], b: list[int]) -> int:
    """Minimum-cost warping distance under the 0/1 element cost.

    Cost 0 where symbols match, 1 otherwise; paths obey the usual
    monotonicity, continuity and boundary conditions.
    """
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        raise ValueError("dtw requires non-empty sequences")
    prev = [0] * m
    curr = [0] * m
    a0 = a[0]
    acc = 0
    for j in range(m):
        acc += 0 if a0 == b[j] else 1
        prev[j] = acc
    for i in range(1, n):
        ai = a[i]
        curr[0] = prev[0] + (0 if ai == b[0] else 1)
        for j in range(1, m):
            best = prev[j]
            if curr[j - 1] < best:
                best = curr[j - 1]
            if prev[j - 1] < best:
                best = prev[j - 1]
            curr[j] = best + (0 if ai == b[j] else 1)
        prev, curr = curr, prev
    return prev[m - 1]
