# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled sequence distance kernels (LCS length and 0/1-cost DTW).

Same interface as ``_pykernels``: sequences are lists of small non-negative
ints, or the ``array('i', ...)`` buffers produced by :func:`prepare`.
"""

from cpython cimport array
import array as _array

BACKEND_NAME = "compiled"

cdef array.array _INT_TEMPLATE = _array.array("i", [])


def prepare(ids):
    """Encode a symbol-id list once into the buffer the kernels consume."""
    return _array.array("i", ids)


cdef array.array _as_i32(object seq):
    if type(seq) is _array.array:
        return <array.array> seq
    return _array.array("i", seq)


def lcs(object sa, object sb):
    """Length of the longest common subsequence of ``sa`` and ``sb``."""
    cdef array.array aa = _as_i32(sa)
    cdef array.array ab = _as_i32(sb)
    if len(aa) == 0 or len(ab) == 0:
        return 0
    return _lcs_impl(aa, ab)


def dtw(object sa, object sb):
    """Minimum-cost warping distance under the 0/1 element cost."""
    cdef array.array aa = _as_i32(sa)
    cdef array.array ab = _as_i32(sb)
    if len(aa) == 0 or len(ab) == 0:
        raise ValueError("dtw requires non-empty sequences")
    return _dtw_impl(aa, ab)


cdef long _lcs_impl(int[::1] a, int[::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    cdef Py_ssize_t i, j
    cdef int ai, left, up
    cdef array.array prev_arr = array.clone(_INT_TEMPLATE, m + 1, zero=True)
    cdef array.array curr_arr = array.clone(_INT_TEMPLATE, m + 1, zero=True)
    cdef int[::1] prev = prev_arr
    cdef int[::1] curr = curr_arr
    cdef int[::1] tmp
    for i in range(n):
        ai = a[i]
        for j in range(m):
            if ai == b[j]:
                curr[j + 1] = prev[j] + 1
            else:
                left = curr[j]
                up = prev[j + 1]
                curr[j + 1] = left if left >= up else up
        tmp = prev
        prev = curr
        curr = tmp
    return prev[m]


cdef long _dtw_impl(int[::1] a, int[::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    cdef Py_ssize_t i, j
    cdef int ai, best, acc
    cdef array.array prev_arr = array.clone(_INT_TEMPLATE, m, zero=True)
    cdef array.array curr_arr = array.clone(_INT_TEMPLATE, m, zero=True)
    cdef int[::1] prev = prev_arr
    cdef int[::1] curr = curr_arr
    cdef int[::1] tmp
    ai = a[0]
    acc = 0
    for j in range(m):
        acc += 0 if ai == b[j] else 1
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
        tmp = prev
        prev = curr
        curr = tmp
    return prev[m - 1]
