"""Backend switch for the compiled kernels.

Set ``QWSCATTER_DISABLE_NUMBA=1`` to force the pure-numpy code paths. When
numba is missing the numpy paths are used automatically.
"""

import os

_FLAG = os.environ.get("QWSCATTER_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    import numba

    HAS_NUMBA = True
    # the system TBB is too old for numba; prefer OpenMP
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not NUMBA_DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator.

    The decorated function is always compiled lazily, so importing this package
    never pays the JIT cost when the numpy backend is selected.
    """
    if HAS_NUMBA:
        return numba.njit(*args, **kwargs)

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func


prange = numba.prange if HAS_NUMBA else range


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
