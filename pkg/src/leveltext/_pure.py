"""Pure-Python fallback for the compiled edit-distance kernel.

Mirrors ``_speedups.edit_distance_i32`` exactly; used when the extension was
not built or ``LEVELTEXT_PURE=1`` is set.
"""

from collections.abc import Sequence


def edit_distance_i32(a: Sequence[int], b: Sequence[int]) -> int:
    """Levenshtein distance between two int sequences (unit costs)."""
    n, m = len(a), len(b)
    if n == 0:
        return m
    if m == 0:
        return n
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        curr = [i] + [0] * m
        ai = a[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (ai != b[j - 1])
            add = curr[j - 1] + 1
            dele = prev[j] + 1
            curr[j] = min(sub, add, dele)
        prev = curr
    return prev[m]
