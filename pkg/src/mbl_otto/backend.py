"""Numba/numpy backend selection for the hot kernels.

Every hot kernel in :mod:`mbl_otto._kernels` ships in two implementations:
a numba ``@njit`` loop and a vectorized pure-numpy fallback.  The active
implementation is chosen once, at import time, from the environment variable
``MBL_OTTO_BACKEND``:

* ``numba``  - require numba; raise if it cannot be imported
* ``numpy``  - force the pure-numpy fallback
* ``auto`` (or unset) - use numba when importable, numpy otherwise

``mbl-otto bench`` times both paths side by side regardless of the flag.
"""

import os

ENV_VAR = "MBL_OTTO_BACKEND"

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    numba = None
    HAS_NUMBA = False


def _resolve(value):
    value = (value or "auto").strip().lower()
    if value not in ("auto", "numba", "numpy"):
        raise RuntimeError(f"{ENV_VAR} must be auto, numba or numpy, got {value!r}")
    if value == "numba" and not HAS_NUMBA:
        raise RuntimeError(f"{ENV_VAR}=numba but numba is not importable")
    if value == "auto":
        return "numba" if HAS_NUMBA else "numpy"
    return value


BACKEND = _resolve(os.environ.get(ENV_VAR))
USE_NUMBA = BACKEND == "numba"


def njit(**kwargs):
    """numba.njit with project defaults, or identity when numba is absent."""
    if not HAS_NUMBA:
        return lambda f: f
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    return numba.njit(**kwargs)
