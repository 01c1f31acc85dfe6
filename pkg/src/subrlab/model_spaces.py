"""The three sub-Riemannian space forms and their Riemannian scaffolding.

``ModelSpace(kappa)`` with kappa in {-1, 0, 1} carries:

* a chart --- the disk product {1 + kappa (x^2+y^2) > 0} x R for kappa <= 0,
  the unit sphere in R^4 for kappa = 1;
* the orthonormal frame {X, Y, T} (X, Y horizontal, T the Reeb field);
* the complex structure J with J(X) = Y, J(Y) = -X, J(T) = 0;
* the Levi-Civita connection of the extended metric, tabulated in the frame;
* the curvature tensor, with the sign convention
  R(U,V)W = D_V D_U W - D_U D_V W + D_[U,V] W.

The Webster scalar curvature of ModelSpace(kappa) is kappa at every point.
All values are plain floats / numpy arrays; everything here is pure and
immutable, so concurrent evaluation is safe.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ChartDomainViolation, ChartExit
from . import kernels

DOMAIN_EPS = 1e-14
SPHERE_TOL = 1e-8


@dataclass(frozen=True)
class ModelSpace:
    kappa: int

    def __post_init__(self):
        if self.kappa not in (-1, 0, 1):
            raise ValueError("kappa must be -1, 0 or 1")

    @property
    def chart_kind(self):
        return "sphere_embedded" if self.kappa == 1 else "disk_product"

    @property
    def dim_coords(self):
        return 4 if self.kappa == 1 else 3

    def webster_curvature(self, p=None):
        return float(self.kappa)


@dataclass(frozen=True)
class Point:
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=np.float64))

    def to_json(self):
        return [float(v) for v in self.coords]


@dataclass(frozen=True)
class FrameVector:
    """Tangent vector stored as components (a, b, c) in the frame {X, Y, T}."""

    a: float
    b: float
    c: float
    base: Point

    @property
    def comps(self):
        return np.array([self.a, self.b, self.c])

    def norm(self):
        return float(np.sqrt(self.a * self.a + self.b * self.b + self.c * self.c))

    def horizontal(self, tol=1e-12):
        return abs(self.c) <= tol

    def vertical(self, tol=1e-12):
        return abs(self.a) <= tol and abs(self.b) <= tol

    def to_json(self):
        return [float(self.a), float(self.b), float(self.c)]


def point(space, *coords):
    p = Point(np.array(coords, dtype=np.float64))
    require_in_domain(space, p)
    return p


def in_domain(space, p):
    c = np.asarray(p.coords if isinstance(p, Point) else p, dtype=np.float64)
    if space.kappa == 1:
        return c.shape[-1] == 4 and abs(np.linalg.norm(c) - 1.0) <= SPHERE_TOL
    if c.shape[-1] != 3:
        return False
    return 1.0 + space.kappa * (c[0] ** 2 + c[1] ** 2) > DOMAIN_EPS


def require_in_domain(space, p):
    if not in_domain(space, p):
        raise ChartDomainViolation(
            f"point {np.asarray(p.coords if isinstance(p, Point) else p)} outside the "
            f"chart of M({space.kappa})"
        )


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------

def frames_many(space, pts):
    """Frame matrix E with columns (X, Y, T) at each point of ``pts[m, d]``."""
    pts = np.asarray(pts, dtype=np.float64)
    m = pts.shape[0]
    if space.kappa == 1:
        x1, y1, x2, y2 = pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3]
        E = np.empty((m, 4, 3))
        E[:, 0, 0], E[:, 1, 0], E[:, 2, 0], E[:, 3, 0] = -x2, y2, x1, -y1
        E[:, 0, 1], E[:, 1, 1], E[:, 2, 1], E[:, 3, 1] = -y2, -x2, y1, x1
        E[:, 0, 2], E[:, 1, 2], E[:, 2, 2], E[:, 3, 2] = -y1, x1, -y2, x2
        return E
    k = space.kappa
    x, y, t = pts[:, 0], pts[:, 1], pts[:, 2]
    ct = np.cos(2.0 * k * t)
    st = np.sin(2.0 * k * t)
    inv_rho = 1.0 + k * (x * x + y * y)
    E = np.zeros((m, 3, 3))
    E[:, 0, 0] = inv_rho * ct
    E[:, 1, 0] = -inv_rho * st
    E[:, 2, 0] = y * ct + x * st
    E[:, 0, 1] = inv_rho * st
    E[:, 1, 1] = inv_rho * ct
    E[:, 2, 1] = y * st - x * ct
    E[:, 2, 2] = 1.0
    return E


def frame_at(space, p):
    """The frame fields X, Y, T at ``p`` as coordinate vectors."""
    require_in_domain(space, p)
    E = frames_many(space, p.coords[None, :])[0]
    return E[:, 0].copy(), E[:, 1].copy(), E[:, 2].copy()


def coords_to_frame(space, pts, vecs):
    """Express coordinate vectors ``vecs`` in the frame at ``pts`` (batched)."""
    E = frames_many(space, np.atleast_2d(pts))
    v = np.atleast_2d(vecs)
    if space.kappa == 1:
        # the frame is Euclidean-orthonormal on the round sphere
        return np.einsum("mdk,md->mk", E, v)
    return np.linalg.solve(E, v[..., None])[..., 0]


def frame_to_coords(space, pts, comps):
    E = frames_many(space, np.atleast_2d(pts))
    return np.einsum("mdk,mk->md", E, np.atleast_2d(comps))


def _frame_jacobians(space, p):
    """d(frame field)/d(coords) at p; shape (3, d, d), field index first."""
    c = np.asarray(p.coords, dtype=np.float64)
    if space.kappa == 1:
        AX = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
        AY = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float)
        AT = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
        return np.stack([AX, AY, AT])
    k = space.kappa
    x, y, t = c
    ct = np.cos(2.0 * k * t)
    st = np.sin(2.0 * k * t)
    inv_rho = 1.0 + k * (x * x + y * y)
    JX = np.array([
        [2 * k * x * ct, 2 * k * y * ct, -2 * k * inv_rho * st],
        [-2 * k * x * st, -2 * k * y * st, -2 * k * inv_rho * ct],
        [st, ct, 2 * k * (x * ct - y * st)],
    ])
    JY = np.array([
        [2 * k * x * st, 2 * k * y * st, 2 * k * inv_rho * ct],
        [2 * k * x * ct, 2 * k * y * ct, -2 * k * inv_rho * st],
        [-ct, st, 2 * k * (y * ct + x * st)],
    ])
    JT = np.zeros((3, 3))
    return np.stack([JX, JY, JT])


def bracket(space, pair, p):
    """Lie bracket [E_i, E_j] at p, by analytic differentiation of the frames.

    Returns a FrameVector; serves as a consistency check of the structure
    constants [X,Y] = -2T, [X,T] = 2 kappa Y, [Y,T] = -2 kappa X.
    """
    require_in_domain(space, p)
    i, j = pair
    jac = _frame_jacobians(space, p)
    E = frames_many(space, p.coords[None, :])[0]
    vec = jac[j] @ E[:, i] - jac[i] @ E[:, j]
    comps = coords_to_frame(space, p.coords[None, :], vec[None, :])[0]
    return FrameVector(comps[0], comps[1], comps[2], p)


def j_rotate(v):
    """The complex structure J: (a, b, c) -> (-b, a, 0)."""
    if isinstance(v, FrameVector):
        return FrameVector(-v.b, v.a, 0.0, v.base)
    v = np.asarray(v, dtype=np.float64)
    out = np.zeros_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


# ---------------------------------------------------------------------------
# connection and curvature
# ---------------------------------------------------------------------------

def _connection_coefficients(kappa):
    """Frozen table Gamma[i, j, k] = <D_{e_i} e_j, e_k> in the frame order X, Y, T."""
    g = np.zeros((3, 3, 3))
    g[0, 1, 2] = -1.0
    g[1, 0, 2] = 1.0
    g[0, 2, 1] = 1.0
    g[1, 2, 0] = -1.0
    g[2, 0, 1] = 1.0 - 2.0 * kappa
    g[2, 1, 0] = 2.0 * kappa - 1.0
    return g


@dataclass(frozen=True)
class ConnectionTable:
    kappa: int
    coefficients: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.coefficients is None:
            object.__setattr__(self, "coefficients", _connection_coefficients(self.kappa))

    def coefficient(self, i, j, k):
        return float(self.coefficients[i, j, k])


def connection_table(space):
    return ConnectionTable(space.kappa)


def gamma_contract(kappa, u, w):
    """out_k = sum_ij u_i w_j Gamma[i, j, k]; broadcasts over leading axes."""
    u = np.asarray(u, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    out = np.empty(np.broadcast_shapes(u.shape, w.shape))
    out[..., 0] = -u[..., 1] * w[..., 2] + (2.0 * kappa - 1.0) * u[..., 2] * w[..., 1]
    out[..., 1] = u[..., 0] * w[..., 2] + (1.0 - 2.0 * kappa) * u[..., 2] * w[..., 0]
    out[..., 2] = -u[..., 0] * w[..., 1] + u[..., 1] * w[..., 0]
    return out


def covariant_derivative(table, u, v, dv):
    """D_u v from the coefficient table plus the derivative terms.

    ``v`` are the frame components of the field at the base point of ``u``
    and ``dv`` their directional derivatives along ``u``.
    """
    u_c = u.comps if isinstance(u, FrameVector) else np.asarray(u, dtype=np.float64)
    v_c = v.comps if isinstance(v, FrameVector) else np.asarray(v, dtype=np.float64)
    dv = np.asarray(dv, dtype=np.float64)
    out = dv + gamma_contract(table.kappa, u_c, v_c)
    if isinstance(u, FrameVector):
        return FrameVector(out[0], out[1], out[2], u.base)
    return out


def curvature_tensor(kappa):
    """R[i, j, k, l] with R(e_i, e_j) e_k = sum_l R[i,j,k,l] e_l."""
    g = _connection_coefficients(kappa)
    C = np.zeros((3, 3, 3))
    C[0, 1, 2] = -2.0
    C[1, 0, 2] = 2.0
    C[0, 2, 1] = 2.0 * kappa
    C[2, 0, 1] = -2.0 * kappa
    C[1, 2, 0] = -2.0 * kappa
    C[2, 1, 0] = 2.0 * kappa
    R = np.zeros((3, 3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                # R(e_i,e_j)e_k = D_{e_j} D_{e_i} e_k - D_{e_i} D_{e_j} e_k
                #                 + D_{[e_i,e_j]} e_k
                term = np.zeros(3)
                for l in range(3):
                    term += g[i, k, l] * g[j, l] - g[j, k, l] * g[i, l] + C[i, j, l] * g[l, k]
                R[i, j, k] = term
    return R


def curvature(space, u, v, w):
    """R(u, v) w at the common base point (paper-sign convention)."""
    R = curvature_tensor(space.kappa)
    uc = u.comps if isinstance(u, FrameVector) else np.asarray(u, dtype=np.float64)
    vc = v.comps if isinstance(v, FrameVector) else np.asarray(v, dtype=np.float64)
    wc = w.comps if isinstance(w, FrameVector) else np.asarray(w, dtype=np.float64)
    out = np.einsum("i,j,k,ijkl->l", uc, vc, wc, R)
    if isinstance(u, FrameVector):
        return FrameVector(out[0], out[1], out[2], u.base)
    return out


def ricci(space, u, v):
    """Ric(u, v): trace of w -> R(u, w) v."""
    R = curvature_tensor(space.kappa)
    uc = u.comps if isinstance(u, FrameVector) else np.asarray(u, dtype=np.float64)
    vc = v.comps if isinstance(v, FrameVector) else np.asarray(v, dtype=np.float64)
    return float(np.einsum("i,k,ijkj->", uc, vc, R))


# ---------------------------------------------------------------------------
# contact data (independent route to the metric, used by consistency checks)
# ---------------------------------------------------------------------------

def eta(space, p, vec):
    """The contact form evaluated on a coordinate vector."""
    c = np.asarray(p.coords if isinstance(p, Point) else p, dtype=np.float64)
    v = np.asarray(vec, dtype=np.float64)
    if space.kappa == 1:
        return float(c[0] * v[1] - c[1] * v[0] + c[2] * v[3] - c[3] * v[2])
    rho = 1.0 / (1.0 + space.kappa * (c[0] ** 2 + c[1] ** 2))
    return float(rho * (c[0] * v[1] - c[1] * v[0]) + v[2])


def deta(space, p, u, v):
    """d(eta)(u, v) with the 1/2 normalization of the exterior derivative."""
    c = np.asarray(p.coords if isinstance(p, Point) else p, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if space.kappa == 1:
        return float(u[0] * v[1] - u[1] * v[0] + u[2] * v[3] - u[3] * v[2])
    k = space.kappa
    x, y = c[0], c[1]
    rho = 1.0 / (1.0 + k * (x * x + y * y))
    grad_rho = -2.0 * k * rho * rho * np.array([x, y])

    def du_eta(a, b):
        # directional derivative along a of q -> eta_q(b), constant b
        return (grad_rho @ a[:2]) * (x * b[1] - y * b[0]) + rho * (a[0] * b[1] - a[1] * b[0])

    return 0.5 * (du_eta(u, v) - du_eta(v, u))


def j_coords(space, p, vec):
    """J applied to a coordinate vector (vertical part killed)."""
    c = np.asarray(p.coords if isinstance(p, Point) else p, dtype=np.float64)
    comps = coords_to_frame(space, c[None, :], np.asarray(vec, dtype=np.float64)[None, :])[0]
    return frame_to_coords(space, c[None, :], j_rotate(comps)[None, :])[0]


def metric_from_contact(space, p, u, v):
    """<u, v> built from eta, d(eta) and J only: d(eta)(u, J v) + eta(u) eta(v)."""
    return deta(space, p, u, j_coords(space, p, v)) + eta(space, p, u) * eta(space, p, v)


# ---------------------------------------------------------------------------
# Riemannian exponential and Reeb flow
# ---------------------------------------------------------------------------

def riemannian_exp(space, p, v, length, step=1e-3, return_velocity=False):
    """Endpoint of the Riemannian geodesic of the extended metric.

    ``v`` is a FrameVector (or components) at ``p``; the geodesic is
    integrated in frame components for parameter ``length``.
    """
    require_in_domain(space, p)
    comps = v.comps if isinstance(v, FrameVector) else np.asarray(v, dtype=np.float64)
    coords = (p.coords if isinstance(p, Point) else np.asarray(p, dtype=np.float64))
    if length == 0.0:
        out = Point(coords.copy())
        return (out, FrameVector(*comps, out)) if return_velocity else out
    nsteps = max(8, int(np.ceil(abs(length) / step)))
    pts, w, exited = kernels.riemexp_many(
        space.kappa, coords[None, :], comps[None, :], np.array([length]), nsteps
    )
    if exited[0]:
        raise ChartExit("Riemannian geodesic left the chart", exit_s=length)
    out = Point(pts[0])
    if return_velocity:
        return out, FrameVector(w[0, 0], w[0, 1], w[0, 2], out)
    return out


def reeb_flow(space, pts, tau):
    """Flow of the Reeb field T for time tau applied to coordinate points."""
    pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
    if space.kappa == 1:
        ct, st = np.cos(tau), np.sin(tau)
        out = np.empty_like(pts)
        out[:, 0] = pts[:, 0] * ct - pts[:, 1] * st
        out[:, 1] = pts[:, 0] * st + pts[:, 1] * ct
        out[:, 2] = pts[:, 2] * ct - pts[:, 3] * st
        out[:, 3] = pts[:, 2] * st + pts[:, 3] * ct
        return out
    out = pts.copy()
    out[:, 2] += tau
    return out
