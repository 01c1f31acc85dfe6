"""Finite-difference stencils on uniform grids.

Interior nodes use 4th-order centered stencils; the two nodes nearest a
non-periodic edge fall back to 2nd-order (centered where possible,
one-sided at the very edge).  Periodic axes use the 4th-order centered
stencil everywhere via wrap-around.
"""

import numpy as np


def _roll(f, k, axis):
    return np.roll(f, -k, axis=axis)


def diff1(f, h, axis=0, periodic=False):
    """First derivative of sampled values along ``axis``."""
    f = np.asarray(f, dtype=np.float64)
    if periodic:
        return (-_roll(f, 2, axis) + 8.0 * _roll(f, 1, axis)
                - 8.0 * _roll(f, -1, axis) + _roll(f, -2, axis)) / (12.0 * h)
    n = f.shape[axis]
    if n < 5:
        raise ValueError("need at least 5 samples along the axis")
    out = np.empty_like(f)
    sl = [slice(None)] * f.ndim

    def at(i):
        sl2 = list(sl)
        sl2[axis] = i
        return tuple(sl2)

    out[at(slice(2, n - 2))] = (
        -f[at(slice(4, n))] + 8.0 * f[at(slice(3, n - 1))]
        - 8.0 * f[at(slice(1, n - 3))] + f[at(slice(0, n - 4))]
    ) / (12.0 * h)
    out[at(0)] = (-3.0 * f[at(0)] + 4.0 * f[at(1)] - f[at(2)]) / (2.0 * h)
    out[at(1)] = (f[at(2)] - f[at(0)]) / (2.0 * h)
    out[at(n - 2)] = (f[at(n - 1)] - f[at(n - 3)]) / (2.0 * h)
    out[at(n - 1)] = (3.0 * f[at(n - 1)] - 4.0 * f[at(n - 2)] + f[at(n - 3)]) / (2.0 * h)
    return out


def diff2(f, h, axis=0, periodic=False):
    """Second derivative of sampled values along ``axis``."""
    f = np.asarray(f, dtype=np.float64)
    if periodic:
        return (-_roll(f, 2, axis) + 16.0 * _roll(f, 1, axis) - 30.0 * f
                + 16.0 * _roll(f, -1, axis) - _roll(f, -2, axis)) / (12.0 * h * h)
    n = f.shape[axis]
    if n < 5:
        raise ValueError("need at least 5 samples along the axis")
    out = np.empty_like(f)
    sl = [slice(None)] * f.ndim

    def at(i):
        sl2 = list(sl)
        sl2[axis] = i
        return tuple(sl2)

    out[at(slice(2, n - 2))] = (
        -f[at(slice(4, n))] + 16.0 * f[at(slice(3, n - 1))] - 30.0 * f[at(slice(2, n - 2))]
        + 16.0 * f[at(slice(1, n - 3))] - f[at(slice(0, n - 4))]
    ) / (12.0 * h * h)
    out[at(0)] = (2.0 * f[at(0)] - 5.0 * f[at(1)] + 4.0 * f[at(2)] - f[at(3)]) / (h * h)
    out[at(1)] = (f[at(2)] - 2.0 * f[at(1)] + f[at(0)]) / (h * h)
    out[at(n - 2)] = (f[at(n - 1)] - 2.0 * f[at(n - 2)] + f[at(n - 3)]) / (h * h)
    out[at(n - 1)] = (2.0 * f[at(n - 1)] - 5.0 * f[at(n - 2)] + 4.0 * f[at(n - 3)] - f[at(n - 4)]) / (h * h)
    return out


def richardson_dirderiv(func, x, v, h=1e-4):
    """Directional derivative of a vector-valued ``func`` at ``x`` along ``v``.

    Central differences at steps h and h/2 combined by one Richardson
    extrapolation step, giving O(h^4) truncation.
    """
    x = np.asarray(x, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)

    def central(hh):
        return (np.asarray(func(x + hh * v)) - np.asarray(func(x - hh * v))) / (2.0 * hh)

    d1 = central(h)
    d2 = central(0.5 * h)
    return (4.0 * d2 - d1) / 3.0
