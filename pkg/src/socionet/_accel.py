"""Backend selection for the hot kernels.

Set ``SOCIONET_BACKEND=numpy`` to force the pure-numpy path, or
``SOCIONET_BACKEND=numba`` to require numba. The default uses numba when it
imports cleanly and falls back to numpy otherwise.
"""
import os

_requested = os.environ.get("SOCIONET_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ImportError(f"SOCIONET_BACKEND must be auto, numba or numpy, got {_requested!r}")

try:
    if _requested == "numpy":
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:
    if _requested == "numba":
        raise
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def njit(fn):
    """Compile ``fn`` with numba when available; otherwise return it unchanged."""
    if HAVE_NUMBA:
        return _njit(cache=True, nogil=True)(fn)
    return fn
