"""Kernel backend selection.

The element loops in :mod:`lagpme.kernels` exist twice: once as numba
``@njit`` functions and once as vectorised numpy. Which one is used is decided
at import time from the ``LAGPME_BACKEND`` environment variable:

* ``LAGPME_BACKEND=numba``  (default when numba imports)
* ``LAGPME_BACKEND=numpy``  (pure numpy, no JIT)

Both paths produce identical results up to floating point summation order.
"""

import os

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is installed in CI
    HAVE_NUMBA = False

_requested = os.environ.get("LAGPME_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"LAGPME_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"
