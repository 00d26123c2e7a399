"""Backend switch for the scalar/loop kernels.

Set ``CATBITFLIP_BACKEND=numpy`` to bypass numba and run the vectorized
numpy fallbacks instead.  Dense linear algebra always goes through LAPACK.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

BACKEND = os.environ.get("CATBITFLIP_BACKEND", "numba").strip().lower()
if BACKEND not in ("numba", "numpy"):
    raise ValueError(f"CATBITFLIP_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")
if numba is None:
    BACKEND = "numpy"

USE_NUMBA = BACKEND == "numba"


def njit(func):
    """Compile ``func`` with numba when available, otherwise return it unchanged."""
    if numba is None:
        return func
    return numba.njit(cache=True)(func)


def select(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl
