"""Backend selection for the hot kernels.

Set ``OPTOQHT_BACKEND=numpy`` to force the pure-numpy path. The default is
``numba`` whenever numba can be imported.
"""
import os

BACKEND_ENV = "OPTOQHT_BACKEND"

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False


def requested_backend():
    value = os.environ.get(BACKEND_ENV, "numba").strip().lower()
    if value not in ("numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {value!r}")
    return value


def active_backend():
    if requested_backend() == "numba" and HAVE_NUMBA:
        return "numba"
    return "numpy"
