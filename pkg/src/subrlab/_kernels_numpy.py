"""Pure-numpy implementations of the hot integration kernels.

Every function here is vectorized over a leading batch axis and mirrors the
numba backend in ``_kernels_numba`` exactly (same names, same signatures,
same step rules), so the two can be swapped by the ``SUBRLAB_NUMBA`` flag
and compared bit-for-bit-ish in tests.

Conventions
-----------
* Disk-type charts (kappa <= 0): coordinates (x, y, t), frame

      X = (1/rho) (cos(2Kt) dx - sin(2Kt) dy) + (y cos(2Kt) + x sin(2Kt)) dt
      Y = (1/rho) (sin(2Kt) dx + cos(2Kt) dy) + (y sin(2Kt) - x cos(2Kt)) dt
      T = dt,            1/rho = 1 + kappa (x^2 + y^2).

* Sphere chart (kappa == 1): coordinates (x1, y1, x2, y2) on S^3 with

      X = (-x2,  y2, x1, -y1),  Y = (-y2, -x2, y1, x1),  T = (-y1, x1, -y2, x2).

* Horizontal velocities are carried as frame components (a, b) which rotate
  exactly: (a + ib)(s) = exp(-2i*lam*s) (a0 + ib0).  Positions are advanced
  with classical RK4 using the exact (a, b) at stage times.
"""

import numpy as np

DOMAIN_EPS = 1e-14


def _ab_at(a0, b0, lam, s):
    c = np.cos(2.0 * lam * s)
    sn = np.sin(2.0 * lam * s)
    return a0 * c + b0 * sn, b0 * c - a0 * sn


def _vel_disk(kappa, p, a, b):
    x = p[:, 0]
    y = p[:, 1]
    t = p[:, 2]
    ct = np.cos(2.0 * kappa * t)
    st = np.sin(2.0 * kappa * t)
    inv_rho = 1.0 + kappa * (x * x + y * y)
    v = np.empty_like(p)
    v[:, 0] = inv_rho * (a * ct + b * st)
    v[:, 1] = inv_rho * (-a * st + b * ct)
    v[:, 2] = a * (y * ct + x * st) + b * (y * st - x * ct)
    return v


def _vel_sphere(p, a, b):
    x1 = p[:, 0]
    y1 = p[:, 1]
    x2 = p[:, 2]
    y2 = p[:, 3]
    v = np.empty_like(p)
    v[:, 0] = -a * x2 - b * y2
    v[:, 1] = a * y2 - b * x2
    v[:, 2] = a * x1 + b * y1
    v[:, 3] = -a * y1 + b * x1
    return v


def geodesic_paths_disk(kappa, p0, ab0, lam, h, nsteps):
    """Integrate CC-geodesics of curvature lam in a disk-type chart.

    Returns (pts[m, nsteps+1, 3], ab[m, nsteps+1, 2], exit_idx[m]).
    exit_idx is -1 when the row never left the chart, otherwise the index of
    the first invalid sample; samples from there on repeat the last valid one.
    """
    m = p0.shape[0]
    pts = np.empty((m, nsteps + 1, 3))
    pts[:, 0] = p0
    a0 = ab0[:, 0].copy()
    b0 = ab0[:, 1].copy()
    exit_idx = np.full(m, -1, dtype=np.int64)
    alive = np.ones(m, dtype=bool)
    p = p0.astype(np.float64, copy=True)
    for j in range(nsteps):
        s = j * h
        a1, b1 = _ab_at(a0, b0, lam, s)
        a2, b2 = _ab_at(a0, b0, lam, s + 0.5 * h)
        a3, b3 = _ab_at(a0, b0, lam, s + h)
        k1 = _vel_disk(kappa, p, a1, b1)
        k2 = _vel_disk(kappa, p + 0.5 * h * k1, a2, b2)
        k3 = _vel_disk(kappa, p + 0.5 * h * k2, a2, b2)
        k4 = _vel_disk(kappa, p + h * k3, a3, b3)
        p_new = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if kappa < 0:
            dom = 1.0 + kappa * (p_new[:, 0] ** 2 + p_new[:, 1] ** 2)
            leaving = alive & (dom <= DOMAIN_EPS)
            if np.any(leaving):
                exit_idx[leaving] = j + 1
                alive = alive & ~leaving
        p = np.where(alive[:, None], p_new, p)
        pts[:, j + 1] = p
    s_all = h * np.arange(nsteps + 1)
    ab = np.empty((m, nsteps + 1, 2))
    ca = np.cos(2.0 * lam * s_all)
    sa = np.sin(2.0 * lam * s_all)
    ab[:, :, 0] = a0[:, None] * ca[None, :] + b0[:, None] * sa[None, :]
    ab[:, :, 1] = b0[:, None] * ca[None, :] - a0[:, None] * sa[None, :]
    return pts, ab, exit_idx


def geodesic_paths_sphere(p0, ab0, lam, h, nsteps):
    """Same as geodesic_paths_disk for the unit-sphere chart (kappa = 1).

    Positions are renormalized to the unit sphere after every step.
    """
    m = p0.shape[0]
    pts = np.empty((m, nsteps + 1, 4))
    pts[:, 0] = p0
    a0 = ab0[:, 0].copy()
    b0 = ab0[:, 1].copy()
    p = p0.astype(np.float64, copy=True)
    for j in range(nsteps):
        s = j * h
        a1, b1 = _ab_at(a0, b0, lam, s)
        a2, b2 = _ab_at(a0, b0, lam, s + 0.5 * h)
        a3, b3 = _ab_at(a0, b0, lam, s + h)
        k1 = _vel_sphere(p, a1, b1)
        k2 = _vel_sphere(p + 0.5 * h * k1, a2, b2)
        k3 = _vel_sphere(p + 0.5 * h * k2, a2, b2)
        k4 = _vel_sphere(p + h * k3, a3, b3)
        p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        p /= np.linalg.norm(p, axis=1)[:, None]
        pts[:, j + 1] = p
    s_all = h * np.arange(nsteps + 1)
    ab = np.empty((m, nsteps + 1, 2))
    ca = np.cos(2.0 * lam * s_all)
    sa = np.sin(2.0 * lam * s_all)
    ab[:, :, 0] = a0[:, None] * ca[None, :] + b0[:, None] * sa[None, :]
    ab[:, :, 1] = b0[:, None] * ca[None, :] - a0[:, None] * sa[None, :]
    exit_idx = np.full(m, -1, dtype=np.int64)
    return pts, ab, exit_idx


def _exp_rhs_disk(kappa, p, w):
    dp = _vel_disk(kappa, p, w[:, 0], w[:, 1])
    dp[:, 2] += w[:, 2]
    dw = np.empty_like(w)
    dw[:, 0] = (2.0 - 2.0 * kappa) * w[:, 1] * w[:, 2]
    dw[:, 1] = (2.0 * kappa - 2.0) * w[:, 0] * w[:, 2]
    dw[:, 2] = 0.0
    return dp, dw


def _exp_rhs_sphere(p, w):
    dp = _vel_sphere(p, w[:, 0], w[:, 1])
    dp[:, 0] += w[:, 2] * (-p[:, 1])
    dp[:, 1] += w[:, 2] * p[:, 0]
    dp[:, 2] += w[:, 2] * (-p[:, 3])
    dp[:, 3] += w[:, 2] * p[:, 2]
    dw = np.empty_like(w)
    dw[:, 0] = 0.0 * w[:, 1] * w[:, 2]
    dw[:, 1] = 0.0 * w[:, 0] * w[:, 2]
    dw[:, 2] = 0.0
    return dp, dw


def riemexp_disk(kappa, p0, w0, lengths, nsteps):
    """Riemannian exponential in a disk-type chart, one geodesic per row.

    w0 holds frame components of the initial velocity; lengths may be signed
    and differ per row (per-row step h_i = lengths_i / nsteps).  Returns
    (endpoints[m,3], end_velocity_frame[m,3], exited[m] bool).
    """
    p = p0.astype(np.float64, copy=True)
    w = w0.astype(np.float64, copy=True)
    hs = (lengths / nsteps)[:, None]
    exited = np.zeros(p0.shape[0], dtype=bool)
    for _ in range(nsteps):
        dp1, dw1 = _exp_rhs_disk(kappa, p, w)
        dp2, dw2 = _exp_rhs_disk(kappa, p + 0.5 * hs * dp1, w + 0.5 * hs * dw1)
        dp3, dw3 = _exp_rhs_disk(kappa, p + 0.5 * hs * dp2, w + 0.5 * hs * dw2)
        dp4, dw4 = _exp_rhs_disk(kappa, p + hs * dp3, w + hs * dw3)
        p_new = p + (hs / 6.0) * (dp1 + 2.0 * dp2 + 2.0 * dp3 + dp4)
        w = w + (hs / 6.0) * (dw1 + 2.0 * dw2 + 2.0 * dw3 + dw4)
        if kappa < 0:
            dom = 1.0 + kappa * (p_new[:, 0] ** 2 + p_new[:, 1] ** 2)
            exited |= dom <= DOMAIN_EPS
            p = np.where(exited[:, None], p, p_new)
        else:
            p = p_new
    return p, w, exited


def riemexp_sphere(p0, w0, lengths, nsteps):
    """Riemannian exponential on the unit-sphere chart (kappa = 1)."""
    p = p0.astype(np.float64, copy=True)
    w = w0.astype(np.float64, copy=True)
    hs = (lengths / nsteps)[:, None]
    for _ in range(nsteps):
        dp1, dw1 = _exp_rhs_sphere(p, w)
        dp2, dw2 = _exp_rhs_sphere(p + 0.5 * hs * dp1, w + 0.5 * hs * dw1)
        dp3, dw3 = _exp_rhs_sphere(p + 0.5 * hs * dp2, w + 0.5 * hs * dw2)
        dp4, dw4 = _exp_rhs_sphere(p + hs * dp3, w + hs * dw3)
        p = p + (hs / 6.0) * (dp1 + 2.0 * dp2 + 2.0 * dp3 + dp4)
        w = w + (hs / 6.0) * (dw1 + 2.0 * dw2 + 2.0 * dw3 + dw4)
        p /= np.linalg.norm(p, axis=1)[:, None]
    exited = np.zeros(p0.shape[0], dtype=bool)
    return p, w, exited


def _gamma_contract(kappa, u, w):
    """Connection contraction: out_k = sum_ij u_i w_j <D_{e_i} e_j, e_k>."""
    out = np.empty_like(w)
    out[..., 0] = -u[..., 1] * w[..., 2] + (2.0 * kappa - 1.0) * u[..., 2] * w[..., 1]
    out[..., 1] = u[..., 0] * w[..., 2] + (1.0 - 2.0 * kappa) * u[..., 2] * w[..., 0]
    out[..., 2] = -u[..., 0] * w[..., 1] + u[..., 1] * w[..., 0]
    return out


def _jacobi_rhs(kappa, lam, a, b, v, q):
    u = np.stack([a, b, np.zeros_like(a)], axis=-1)
    ju = np.stack([-b, a, np.zeros_like(a)], axis=-1)
    v_ju = -b * v[:, 0] + a * v[:, 1]
    v_u = a * v[:, 0] + b * v[:, 1]
    # V'' = -R(gd, V)gd - 2 lam (J(V') - <V, gd> T)
    r = np.empty_like(v)
    r[:, 0] = -(4.0 * kappa - 3.0) * v_ju * ju[:, 0] - 2.0 * lam * (-q[:, 1])
    r[:, 1] = -(4.0 * kappa - 3.0) * v_ju * ju[:, 1] - 2.0 * lam * (q[:, 0])
    r[:, 2] = -v[:, 2] + 2.0 * lam * v_u
    dv = q - _gamma_contract(kappa, u, v)
    dq = r - _gamma_contract(kappa, u, q)
    return dv, dq


def jacobi_paths(kappa, lam, ab0, V0, Vp0, h, nsteps):
    """Integrate the CC-Jacobi system in frame components along a geodesic.

    The coefficients depend only on the exact velocity components (a, b)(s),
    never on the position, so no geodesic trace is consumed here.  Returns
    (V[m, nsteps+1, 3], Vp[m, nsteps+1, 3]) with Vp the covariant derivative.
    """
    m = V0.shape[0]
    a0 = ab0[:, 0]
    b0 = ab0[:, 1]
    V = np.empty((m, nsteps + 1, 3))
    Vp = np.empty((m, nsteps + 1, 3))
    v = V0.astype(np.float64, copy=True)
    q = Vp0.astype(np.float64, copy=True)
    V[:, 0] = v
    Vp[:, 0] = q
    for j in range(nsteps):
        s = j * h
        a1, b1 = _ab_at(a0, b0, lam, s)
        a2, b2 = _ab_at(a0, b0, lam, s + 0.5 * h)
        a3, b3 = _ab_at(a0, b0, lam, s + h)
        dv1, dq1 = _jacobi_rhs(kappa, lam, a1, b1, v, q)
        dv2, dq2 = _jacobi_rhs(kappa, lam, a2, b2, v + 0.5 * h * dv1, q + 0.5 * h * dq1)
        dv3, dq3 = _jacobi_rhs(kappa, lam, a2, b2, v + 0.5 * h * dv2, q + 0.5 * h * dq2)
        dv4, dq4 = _jacobi_rhs(kappa, lam, a3, b3, v + h * dv3, q + h * dq3)
        v = v + (h / 6.0) * (dv1 + 2.0 * dv2 + 2.0 * dv3 + dv4)
        q = q + (h / 6.0) * (dq1 + 2.0 * dq2 + 2.0 * dq3 + dq4)
        V[:, j + 1] = v
        Vp[:, j + 1] = q
    return V, Vp
