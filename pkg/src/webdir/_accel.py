"""Backend selection for the numeric kernels.

Set ``WEBDIR_DISABLE_NUMBA=1`` to force the pure-numpy path even when numba
is installed. The flag is read once at import time.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional speedup
    numba = None

HAVE_NUMBA = numba is not None
DISABLED = os.environ.get("WEBDIR_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
USE_NUMBA = HAVE_NUMBA and not DISABLED


def njit(fn):
    """Compile ``fn`` in nopython mode when numba is importable, else return it as is."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
