"""Switch between numba-compiled kernels and their plain Python twins.

Set RZ_STRATA_NO_NUMBA=1 to run every kernel as ordinary Python.  The kernel
source is identical in both modes, so the fallback is a faithful oracle for
the compiled path (only slower).
"""

import os

_DISABLED = os.environ.get("RZ_STRATA_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    import numba as _nb

    HAVE_NUMBA = True
except ImportError:
    _nb = None
    HAVE_NUMBA = False


def njit(fn):
    """Compile `fn` with numba when available, otherwise return it unchanged."""
    if HAVE_NUMBA:
        return _nb.njit(cache=True)(fn)
    return fn


def py_version(fn):
    """Return the uncompiled Python function behind a kernel."""
    return getattr(fn, "py_func", fn)


def thread_cap():
    """Parallelism cap from RZ_STRATA_THREADS (defaults to 1)."""
    try:
        return max(1, int(os.environ.get("RZ_STRATA_THREADS", "1")))
    except ValueError:
        return 1
