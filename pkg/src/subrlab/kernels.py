"""Backend selection for the hot integration kernels.

The env flag ``SUBRLAB_NUMBA`` picks the implementation: any of
``0/false/off/no`` forces the pure-numpy path, everything else (including
unset) uses the numba-compiled path when numba imports cleanly.  Both
backends export the same functions; ``benchmarks/bench_kernels.py`` times
them side by side.
"""

import os

import numpy as np

from . import _kernels_numpy

_flag = os.environ.get("SUBRLAB_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "off", "no")

if _want_numba:
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - depends on environment
        _impl = _kernels_numpy
        BACKEND = "numpy"
else:
    _impl = _kernels_numpy
    BACKEND = "numpy"


def geodesic_paths(kappa, p0, ab0, lam, h, nsteps):
    """Batched CC-geodesic integration; dispatches on the chart type."""
    p0 = np.ascontiguousarray(p0, dtype=np.float64)
    ab0 = np.ascontiguousarray(ab0, dtype=np.float64)
    if kappa == 1:
        return _impl.geodesic_paths_sphere(p0, ab0, float(lam), float(h), int(nsteps))
    return _impl.geodesic_paths_disk(float(kappa), p0, ab0, float(lam), float(h), int(nsteps))


def riemexp_many(kappa, p0, w0, lengths, nsteps):
    """Batched Riemannian exponential with per-row signed lengths."""
    p0 = np.ascontiguousarray(p0, dtype=np.float64)
    w0 = np.ascontiguousarray(w0, dtype=np.float64)
    lengths = np.ascontiguousarray(lengths, dtype=np.float64)
    if kappa == 1:
        return _impl.riemexp_sphere(p0, w0, lengths, int(nsteps))
    return _impl.riemexp_disk(float(kappa), p0, w0, lengths, int(nsteps))


def jacobi_paths(kappa, lam, ab0, V0, Vp0, h, nsteps):
    """Batched CC-Jacobi integration in frame components."""
    ab0 = np.ascontiguousarray(ab0, dtype=np.float64)
    V0 = np.ascontiguousarray(V0, dtype=np.float64)
    Vp0 = np.ascontiguousarray(Vp0, dtype=np.float64)
    return _impl.jacobi_paths(float(kappa), float(lam), ab0, V0, Vp0, float(h), int(nsteps))
