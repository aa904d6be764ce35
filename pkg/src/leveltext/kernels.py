"""Edit-distance kernel with backend selection at import time.

The compiled extension (``leveltext._speedups``) is preferred; the pure-Python
fallback is used when the extension is missing or ``LEVELTEXT_PURE=1`` is set.
Both backends implement the same two-row Levenshtein DP over integer-encoded
sequences, so results are identical either way (see tests/test_kernels.py).
"""

import os
from array import array
from collections.abc import Sequence

if os.environ.get("LEVELTEXT_PURE"):
    from leveltext import _pure as _backend

    BACKEND = "pure"
else:
    try:
        from leveltext import _speedups as _backend  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from leveltext import _pure as _backend  # type: ignore[no-redef]

        BACKEND = "pure"


def _encode(a: Sequence[str], b: Sequence[str]) -> tuple[array, array]:
    ids: dict[str, int] = {}
    enc_a = array("i", (ids.setdefault(t, len(ids)) for t in a))
    enc_b = array("i", (ids.setdefault(t, len(ids)) for t in b))
    return enc_a, enc_b


def token_edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Levenshtein distance between two token sequences."""
    if a == b:
        return 0
    enc_a, enc_b = _encode(a, b)
    return _backend.edit_distance_i32(enc_a, enc_b)
