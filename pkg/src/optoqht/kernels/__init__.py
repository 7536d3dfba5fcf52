"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import from ``OPTOQHT_BACKEND`` (``numba`` by
default, ``numpy`` to disable JIT). Both implementations stay importable as
``kernels.numpy_impl`` / ``kernels.numba_impl`` for cross-checking and
benchmarking.
"""
from .. import _backend
from . import _numpy as numpy_impl

if _backend.HAVE_NUMBA:
    from . import _numba as numba_impl
else:  # pragma: no cover
    numba_impl = None

BACKEND = _backend.active_backend()
_impl = numba_impl if BACKEND == "numba" else numpy_impl

expm = _impl.expm
transition_and_noise = _impl.transition_and_noise
gammainc_pair = _impl.gammainc_pair
count_rejections = _impl.count_rejections
neg_laplacian_kernel_sums = _impl.neg_laplacian_kernel_sums


def implementations():
    """Return ``{name: module}`` for every importable backend."""
    out = {"numpy": numpy_impl}
    if numba_impl is not None:
        out["numba"] = numba_impl
    return out


__all__ = [
    "BACKEND",
    "count_rejections",
    "expm",
    "gammainc_pair",
    "implementations",
    "neg_laplacian_kernel_sums",
    "transition_and_noise",
]
