"""Hot kernels with a compiled core and a pure-Python fallback.

The Cython extension is optional; if it failed to build we fall back
to the Python implementation at import time.  ``BACKEND`` records
which one is active.
"""

from ._lcs_py import lcs_length as _lcs_py

try:
    from ._lcs_cy import lcs_length_ids as _lcs_ids_cy
    BACKEND = "cython"
except ImportError:
    _lcs_ids_cy = None
    BACKEND = "python"


def lcs_length(a, b) -> int:
    """Longest-common-subsequence length of two token lists."""
    if _lcs_ids_cy is not None:
        import numpy as np

        # interning maps arbitrary hashables to ids for the typed kernel
        table = {}
        def ids(seq):
            out = np.empty(len(seq), dtype=np.int64)
            for i, tok in enumerate(seq):
                out[i] = table.setdefault(tok, len(table))
            return out

        return _lcs_ids_cy(ids(a), ids(b))
    return _lcs_py(a, b)


def lcs_length_python(a, b) -> int:
    """Fallback implementation, exposed for benchmarking and tests."""
    return _lcs_py(a, b)
