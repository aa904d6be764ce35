# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernel: Levenshtein distance over integer-encoded token
sequences.  Article-scale texts run to ~1000 tokens per side, so the O(n*m)
inner loop dominates benchmark and editor latency; everything else in the
package stays pure Python.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc


def edit_distance_i32(int[:] a, int[:] b):
    """Levenshtein distance between two int sequences (unit costs)."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n

    cdef Py_ssize_t i, j
    cdef int sub, best, add, dele
    cdef int *prev = <int *> PyMem_Malloc((m + 1) * sizeof(int))
    cdef int *curr = <int *> PyMem_Malloc((m + 1) * sizeof(int))
    if prev == NULL or curr == NULL:
        PyMem_Free(prev)
        PyMem_Free(curr)
        raise MemoryError()

    try:
        for j in range(m + 1):
            prev[j] = <int> j
        for i in range(1, n + 1):
            curr[0] = <int> i
            for j in range(1, m + 1):
                sub = prev[j - 1]
                if a[i - 1] != b[j - 1]:
                    sub += 1
                add = curr[j - 1] + 1
                dele = prev[j] + 1
                best = sub
                if add < best:
                    best = add
                if dele < best:
                    best = dele
                curr[j] = best
            prev, curr = curr, prev
        return prev[m]
    finally:
        PyMem_Free(prev)
        PyMem_Free(curr)
