"""Numba-compiled implementations of the hot integration kernels.

Mirror of ``_kernels_numpy`` (same function names, signatures and step
rules) with explicit per-row loops compiled by ``@njit``.  See that module
for the chart and frame conventions.
"""

import numpy as np
from numba import njit

DOMAIN_EPS = 1e-14


@njit(cache=True)
def _vel_disk_one(kappa, x, y, t, a, b, out):
    ct = np.cos(2.0 * kappa * t)
    st = np.sin(2.0 * kappa * t)
    inv_rho = 1.0 + kappa * (x * x + y * y)
    out[0] = inv_rho * (a * ct + b * st)
    out[1] = inv_rho * (-a * st + b * ct)
    out[2] = a * (y * ct + x * st) + b * (y * st - x * ct)


@njit(cache=True)
def _vel_sphere_one(p, a, b, out):
    x1, y1, x2, y2 = p[0], p[1], p[2], p[3]
    out[0] = -a * x2 - b * y2
    out[1] = a * y2 - b * x2
    out[2] = a * x1 + b * y1
    out[3] = -a * y1 + b * x1


@njit(cache=True)
def geodesic_paths_disk(kappa, p0, ab0, lam, h, nsteps):
    m = p0.shape[0]
    pts = np.empty((m, nsteps + 1, 3))
    ab = np.empty((m, nsteps + 1, 2))
    exit_idx = np.full(m, -1, dtype=np.int64)
    k1 = np.empty(3)
    k2 = np.empty(3)
    k3 = np.empty(3)
    k4 = np.empty(3)
    q = np.empty(3)
    for i in range(m):
        a0 = ab0[i, 0]
        b0 = ab0[i, 1]
        p = p0[i].copy()
        pts[i, 0] = p
        alive = True
        for j in range(nsteps + 1):
            ang = 2.0 * lam * (j * h)
            ab[i, j, 0] = a0 * np.cos(ang) + b0 * np.sin(ang)
            ab[i, j, 1] = b0 * np.cos(ang) - a0 * np.sin(ang)
        for j in range(nsteps):
            if not alive:
                pts[i, j + 1] = p
                continue
            s = j * h
            ang1 = 2.0 * lam * s
            ang2 = 2.0 * lam * (s + 0.5 * h)
            ang3 = 2.0 * lam * (s + h)
            a1 = a0 * np.cos(ang1) + b0 * np.sin(ang1)
            b1 = b0 * np.cos(ang1) - a0 * np.sin(ang1)
            a2 = a0 * np.cos(ang2) + b0 * np.sin(ang2)
            b2 = b0 * np.cos(ang2) - a0 * np.sin(ang2)
            a3 = a0 * np.cos(ang3) + b0 * np.sin(ang3)
            b3 = b0 * np.cos(ang3) - a0 * np.sin(ang3)
            _vel_disk_one(kappa, p[0], p[1], p[2], a1, b1, k1)
            for c in range(3):
                q[c] = p[c] + 0.5 * h * k1[c]
            _vel_disk_one(kappa, q[0], q[1], q[2], a2, b2, k2)
            for c in range(3):
                q[c] = p[c] + 0.5 * h * k2[c]
            _vel_disk_one(kappa, q[0], q[1], q[2], a2, b2, k3)
            for c in range(3):
                q[c] = p[c] + h * k3[c]
            _vel_disk_one(kappa, q[0], q[1], q[2], a3, b3, k4)
            for c in range(3):
                q[c] = p[c] + (h / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c])
            if kappa < 0:
                dom = 1.0 + kappa * (q[0] * q[0] + q[1] * q[1])
                if dom <= DOMAIN_EPS:
                    exit_idx[i] = j + 1
                    alive = False
                    pts[i, j + 1] = p
                    continue
            for c in range(3):
                p[c] = q[c]
            pts[i, j + 1] = p
    return pts, ab, exit_idx


@njit(cache=True)
def geodesic_paths_sphere(p0, ab0, lam, h, nsteps):
    m = p0.shape[0]
    pts = np.empty((m, nsteps + 1, 4))
    ab = np.empty((m, nsteps + 1, 2))
    exit_idx = np.full(m, -1, dtype=np.int64)
    k1 = np.empty(4)
    k2 = np.empty(4)
    k3 = np.empty(4)
    k4 = np.empty(4)
    q = np.empty(4)
    for i in range(m):
        a0 = ab0[i, 0]
        b0 = ab0[i, 1]
        p = p0[i].copy()
        pts[i, 0] = p
        for j in range(nsteps + 1):
            ang = 2.0 * lam * (j * h)
            ab[i, j, 0] = a0 * np.cos(ang) + b0 * np.sin(ang)
            ab[i, j, 1] = b0 * np.cos(ang) - a0 * np.sin(ang)
        for j in range(nsteps):
            s = j * h
            ang1 = 2.0 * lam * s
            ang2 = 2.0 * lam * (s + 0.5 * h)
            ang3 = 2.0 * lam * (s + h)
            a1 = a0 * np.cos(ang1) + b0 * np.sin(ang1)
            b1 = b0 * np.cos(ang1) - a0 * np.sin(ang1)
            a2 = a0 * np.cos(ang2) + b0 * np.sin(ang2)
            b2 = b0 * np.cos(ang2) - a0 * np.sin(ang2)
            a3 = a0 * np.cos(ang3) + b0 * np.sin(ang3)
            b3 = b0 * np.cos(ang3) - a0 * np.sin(ang3)
            _vel_sphere_one(p, a1, b1, k1)
            for c in range(4):
                q[c] = p[c] + 0.5 * h * k1[c]
            _vel_sphere_one(q, a2, b2, k2)
            for c in range(4):
                q[c] = p[c] + 0.5 * h * k2[c]
            _vel_sphere_one(q, a2, b2, k3)
            for c in range(4):
                q[c] = p[c] + h * k3[c]
            _vel_sphere_one(q, a3, b3, k4)
            nrm = 0.0
            for c in range(4):
                p[c] = p[c] + (h / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c])
                nrm += p[c] * p[c]
            nrm = np.sqrt(nrm)
            for c in range(4):
                p[c] /= nrm
            pts[i, j + 1] = p
    return pts, ab, exit_idx


@njit(cache=True)
def _exp_rhs_disk_one(kappa, p, w, dp, dw):
    _vel_disk_one(kappa, p[0], p[1], p[2], w[0], w[1], dp)
    dp[2] += w[2]
    dw[0] = (2.0 - 2.0 * kappa) * w[1] * w[2]
    dw[1] = (2.0 * kappa - 2.0) * w[0] * w[2]
    dw[2] = 0.0


@njit(cache=True)
def riemexp_disk(kappa, p0, w0, lengths, nsteps):
    m = p0.shape[0]
    pout = np.empty((m, 3))
    wout = np.empty((m, 3))
    exited = np.zeros(m, dtype=np.bool_)
    dp1 = np.empty(3)
    dw1 = np.empty(3)
    dp2 = np.empty(3)
    dw2 = np.empty(3)
    dp3 = np.empty(3)
    dw3 = np.empty(3)
    dp4 = np.empty(3)
    dw4 = np.empty(3)
    pq = np.empty(3)
    wq = np.empty(3)
    for i in range(m):
        h = lengths[i] / nsteps
        p = p0[i].copy()
        w = w0[i].copy()
        for _ in range(nsteps):
            _exp_rhs_disk_one(kappa, p, w, dp1, dw1)
            for c in range(3):
                pq[c] = p[c] + 0.5 * h * dp1[c]
                wq[c] = w[c] + 0.5 * h * dw1[c]
            _exp_rhs_disk_one(kappa, pq, wq, dp2, dw2)
            for c in range(3):
                pq[c] = p[c] + 0.5 * h * dp2[c]
                wq[c] = w[c] + 0.5 * h * dw2[c]
            _exp_rhs_disk_one(kappa, pq, wq, dp3, dw3)
            for c in range(3):
                pq[c] = p[c] + h * dp3[c]
                wq[c] = w[c] + h * dw3[c]
            _exp_rhs_disk_one(kappa, pq, wq, dp4, dw4)
            ok = True
            for c in range(3):
                pq[c] = p[c] + (h / 6.0) * (dp1[c] + 2.0 * dp2[c] + 2.0 * dp3[c] + dp4[c])
                w[c] = w[c] + (h / 6.0) * (dw1[c] + 2.0 * dw2[c] + 2.0 * dw3[c] + dw4[c])
            if kappa < 0:
                dom = 1.0 + kappa * (pq[0] * pq[0] + pq[1] * pq[1])
                if dom <= DOMAIN_EPS:
                    exited[i] = True
                    ok = False
            if ok:
                for c in range(3):
                    p[c] = pq[c]
        pout[i] = p
        wout[i] = w
    return pout, wout, exited


@njit(cache=True)
def _exp_rhs_sphere_one(p, w, dp, dw):
    _vel_sphere_one(p, w[0], w[1], dp)
    dp[0] += w[2] * (-p[1])
    dp[1] += w[2] * p[0]
    dp[2] += w[2] * (-p[3])
    dp[3] += w[2] * p[2]
    dw[0] = 0.0
    dw[1] = 0.0
    dw[2] = 0.0


@njit(cache=True)
def riemexp_sphere(p0, w0, lengths, nsteps):
    m = p0.shape[0]
    pout = np.empty((m, 4))
    wout = np.empty((m, 3))
    exited = np.zeros(m, dtype=np.bool_)
    dp1 = np.empty(4)
    dp2 = np.empty(4)
    dp3 = np.empty(4)
    dp4 = np.empty(4)
    dw = np.empty(3)
    pq = np.empty(4)
    for i in range(m):
        h = lengths[i] / nsteps
        p = p0[i].copy()
        w = w0[i].copy()
        for _ in range(nsteps):
            # frame velocity components are constant on the round sphere
            _exp_rhs_sphere_one(p, w, dp1, dw)
            for c in range(4):
                pq[c] = p[c] + 0.5 * h * dp1[c]
            _exp_rhs_sphere_one(pq, w, dp2, dw)
            for c in range(4):
                pq[c] = p[c] + 0.5 * h * dp2[c]
            _exp_rhs_sphere_one(pq, w, dp3, dw)
            for c in range(4):
                pq[c] = p[c] + h * dp3[c]
            _exp_rhs_sphere_one(pq, w, dp4, dw)
            nrm = 0.0
            for c in range(4):
                p[c] = p[c] + (h / 6.0) * (dp1[c] + 2.0 * dp2[c] + 2.0 * dp3[c] + dp4[c])
                nrm += p[c] * p[c]
            nrm = np.sqrt(nrm)
            for c in range(4):
                p[c] /= nrm
        pout[i] = p
        wout[i] = w
    return pout, wout, exited


@njit(cache=True)
def _jacobi_rhs_one(kappa, lam, a, b, v, q, dv, dq):
    v_ju = -b * v[0] + a * v[1]
    v_u = a * v[0] + b * v[1]
    r0 = -(4.0 * kappa - 3.0) * v_ju * (-b) + 2.0 * lam * q[1]
    r1 = -(4.0 * kappa - 3.0) * v_ju * a - 2.0 * lam * q[0]
    r2 = -v[2] + 2.0 * lam * v_u
    # dX = covariant derivative minus connection drag along gd = (a, b, 0)
    dv[0] = q[0] + b * v[2]
    dv[1] = q[1] - a * v[2]
    dv[2] = q[2] - b * v[0] + a * v[1]
    dq[0] = r0 + b * q[2]
    dq[1] = r1 - a * q[2]
    dq[2] = r2 - b * q[0] + a * q[1]


@njit(cache=True)
def jacobi_paths(kappa, lam, ab0, V0, Vp0, h, nsteps):
    m = V0.shape[0]
    V = np.empty((m, nsteps + 1, 3))
    Vp = np.empty((m, nsteps + 1, 3))
    dv1 = np.empty(3)
    dq1 = np.empty(3)
    dv2 = np.empty(3)
    dq2 = np.empty(3)
    dv3 = np.empty(3)
    dq3 = np.empty(3)
    dv4 = np.empty(3)
    dq4 = np.empty(3)
    vq = np.empty(3)
    qq = np.empty(3)
    for i in range(m):
        a0 = ab0[i, 0]
        b0 = ab0[i, 1]
        v = V0[i].copy()
        q = Vp0[i].copy()
        V[i, 0] = v
        Vp[i, 0] = q
        for j in range(nsteps):
            s = j * h
            ang1 = 2.0 * lam * s
            ang2 = 2.0 * lam * (s + 0.5 * h)
            ang3 = 2.0 * lam * (s + h)
            a1 = a0 * np.cos(ang1) + b0 * np.sin(ang1)
            b1 = b0 * np.cos(ang1) - a0 * np.sin(ang1)
            a2 = a0 * np.cos(ang2) + b0 * np.sin(ang2)
            b2 = b0 * np.cos(ang2) - a0 * np.sin(ang2)
            a3 = a0 * np.cos(ang3) + b0 * np.sin(ang3)
            b3 = b0 * np.cos(ang3) - a0 * np.sin(ang3)
            _jacobi_rhs_one(kappa, lam, a1, b1, v, q, dv1, dq1)
            for c in range(3):
                vq[c] = v[c] + 0.5 * h * dv1[c]
                qq[c] = q[c] + 0.5 * h * dq1[c]
            _jacobi_rhs_one(kappa, lam, a2, b2, vq, qq, dv2, dq2)
            for c in range(3):
                vq[c] = v[c] + 0.5 * h * dv2[c]
                qq[c] = q[c] + 0.5 * h * dq2[c]
            _jacobi_rhs_one(kappa, lam, a2, b2, vq, qq, dv3, dq3)
            for c in range(3):
                vq[c] = v[c] + h * dv3[c]
                qq[c] = q[c] + h * dq3[c]
            _jacobi_rhs_one(kappa, lam, a3, b3, vq, qq, dv4, dq4)
            for c in range(3):
                v[c] = v[c] + (h / 6.0) * (dv1[c] + 2.0 * dv2[c] + 2.0 * dv3[c] + dv4[c])
                q[c] = q[c] + (h / 6.0) * (dq1[c] + 2.0 * dq2[c] + 2.0 * dq3[c] + dq4[c])
            V[i, j + 1] = v
            Vp[i, j + 1] = q
    return V, Vp
