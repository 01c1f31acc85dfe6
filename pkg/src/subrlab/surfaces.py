"""Ruled CMC surfaces and their per-node horizontal geometry.

A patch is a grid F(eps, s) whose s-rows are CC-geodesics of a common
curvature H (the rulings = characteristic curves) and whose eps-derivative
V = dF/deps is the variational field of the ruling family.  All geometric
data at a node derives from (V, gamma') through the normal formula

    N = (|V|^2 - <V, gamma'>^2)^{-1/2} (<V,T> J(gamma') - <V,J(gamma')> T),

with the orientation fixed so that <V, T> < 0; then the characteristic
field is Z = gamma' (the s-direction), the area element is
dSigma = f_eps deps ds with f_eps = <V, S> > 0, and f_eps = -<V,T>/|N_h|.

Shape-operator entries come from covariant grid derivatives of N: B(U) =
-D_U N with D along the s-axis (direction Z) and the eps-axis (direction V).
Vertical cylinders flow a CC-geodesic along the Reeb field, which makes
V = -T exact and yields <N,T> = 0, <B(Z),S> = 1, H = lambda.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from . import model_spaces as ms
from .errors import ChartExit, SingularAfterDisplacement, SingularPoint
from .stencils import diff1

SINGULAR_TOL = 1e-6
EXP_STEPS = 32


@dataclass(frozen=True)
class SurfacePatch:
    space: ms.ModelSpace
    eps: np.ndarray           # (m,)
    s: np.ndarray             # (n,)
    points: np.ndarray        # (m, n, d)
    velocity: np.ndarray      # (m, n, 3) frame components of dF/ds (unit horizontal)
    V_field: np.ndarray       # (m, n, 3) frame components of dF/deps
    H: float                  # curvature of the rulings
    closed_s: bool = False
    singular_tol: float = SINGULAR_TOL
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def shape(self):
        return self.points.shape[:2]

    @property
    def d_eps(self):
        return float(self.eps[1] - self.eps[0])

    @property
    def d_s(self):
        return float(self.s[1] - self.s[0])

    def quad_weights(self):
        """Trapezoid product weights; the s-axis is periodic when closed."""
        m, n = self.shape
        we = np.full(m, self.d_eps)
        we[0] *= 0.5
        we[-1] *= 0.5
        if self.closed_s:
            wsp = np.full(n, self.d_s)
        else:
            wsp = np.full(n, self.d_s)
            wsp[0] *= 0.5
            wsp[-1] *= 0.5
        return np.outer(we, wsp)

    def geometry(self):
        if "geom" not in self._cache:
            self._cache["geom"] = _compute_geometry(self)
        return self._cache["geom"]

    def integrate(self, values):
        """Surface integral of per-node values against dSigma = f_eps deps ds."""
        g = self.geometry()
        return float(np.sum(self.quad_weights() * values * g.f_eps))

    def write_csv(self, path):
        import csv
        g = self.geometry()
        names = ["x1", "y1", "x2", "y2"] if self.space.kappa == 1 else ["x", "y", "t"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["eps", "s"] + names + ["Nh", "NT", "H", "BZZ", "BZS", "BSS", "f_eps"])
            m, n = self.shape
            for i in range(m):
                for j in range(n):
                    w.writerow([repr(float(self.eps[i])), repr(float(self.s[j]))]
                               + [repr(float(v)) for v in self.points[i, j]]
                               + [repr(float(g.Nh[i, j])), repr(float(g.NT[i, j])),
                                  repr(float(g.Hfield[i, j])), repr(float(g.BZZ[i, j])),
                                  repr(float(g.BZS[i, j])), repr(float(g.BSS[i, j])),
                                  repr(float(g.f_eps[i, j]))])

    def manifest(self):
        g = self.geometry()
        return {
            "kappa": self.space.kappa,
            "H": self.H,
            "closed_s": self.closed_s,
            "shape": [int(v) for v in self.shape],
            "eps_range": [float(self.eps[0]), float(self.eps[-1])],
            "s_range": [float(self.s[0]), float(self.s[-1])],
            "singular_nodes": int(np.count_nonzero(g.singular)),
        }


@dataclass(frozen=True)
class GridGeometry:
    N: np.ndarray
    Nh: np.ndarray
    NT: np.ndarray
    nu_h: np.ndarray
    Z: np.ndarray
    S: np.ndarray
    BZZ: np.ndarray
    BZS: np.ndarray
    BSS: np.ndarray
    Hfield: np.ndarray
    f_eps: np.ndarray
    VZ: np.ndarray            # <V, Z>
    singular: np.ndarray      # bool mask


@dataclass(frozen=True)
class SurfacePointData:
    N: np.ndarray
    Nh_norm: float
    NT: float
    nu_h: np.ndarray
    Z: np.ndarray
    S: np.ndarray
    BZZ: float
    BZS: float
    BSS: float
    H: float
    f_eps: float
    singular: bool


def covariant_grid_derivative(kappa, W, direction, h, axis, periodic=False):
    """Covariant derivative of a frame-component field along a grid axis."""
    dW = diff1(W, h, axis=axis, periodic=periodic)
    return dW + ms.gamma_contract(kappa, direction, W)


def _compute_geometry(patch: SurfacePatch) -> GridGeometry:
    kappa = patch.space.kappa
    vel = patch.velocity
    V = patch.V_field
    a = vel[..., 0]
    b = vel[..., 1]
    ju = np.stack([-b, a, np.zeros_like(a)], axis=-1)
    c1 = np.einsum("mnk,mnk->mn", V, vel)
    c2 = np.einsum("mnk,mnk->mn", V, ju)
    c3 = V[..., 2]
    f_eps = np.hypot(c2, c3)
    bad = (c3 >= 0.0) | (f_eps < 1e-300)
    with np.errstate(invalid="ignore", divide="ignore"):
        N = (c3[..., None] * ju - c2[..., None] * np.stack(
            [np.zeros_like(a), np.zeros_like(a), np.ones_like(a)], axis=-1)) / f_eps[..., None]
        Nh = -c3 / f_eps
        NT = -c2 / f_eps
    singular = bad | (np.abs(Nh) < patch.singular_tol)
    nu_h = -ju
    Z = vel
    S = NT[..., None] * nu_h - Nh[..., None] * np.stack(
        [np.zeros_like(a), np.zeros_like(a), np.ones_like(a)], axis=-1)
    DZN = covariant_grid_derivative(kappa, N, vel, patch.d_s, axis=1, periodic=patch.closed_s)
    DVN = covariant_grid_derivative(kappa, N, V, patch.d_eps, axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        DSN = (DVN - c1[..., None] * DZN) / f_eps[..., None]
        BZZ = -np.einsum("mnk,mnk->mn", DZN, Z)
        BZS = -np.einsum("mnk,mnk->mn", DZN, S)
        BSS = -np.einsum("mnk,mnk->mn", DSN, S)
        Hfield = 0.5 * BZZ / Nh
    return GridGeometry(N, Nh, NT, nu_h, Z, S, BZZ, BZS, BSS, Hfield, f_eps, c1, singular)


def point_geometry(patch, node):
    """All per-point geometric data at grid node (i, j)."""
    i, j = node
    g = patch.geometry()
    if g.singular[i, j]:
        raise SingularPoint(f"node {node} has |N_h| below {patch.singular_tol:g}")
    return SurfacePointData(
        N=g.N[i, j].copy(), Nh_norm=float(g.Nh[i, j]), NT=float(g.NT[i, j]),
        nu_h=g.nu_h[i, j].copy(), Z=g.Z[i, j].copy(), S=g.S[i, j].copy(),
        BZZ=float(g.BZZ[i, j]), BZS=float(g.BZS[i, j]), BSS=float(g.BSS[i, j]),
        H=float(g.Hfield[i, j]), f_eps=float(g.f_eps[i, j]),
        singular=bool(g.singular[i, j]),
    )


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def _integrate_rows(space, starts, dirs, lam, s_grid):
    """Integrate one geodesic per row, sampled on s_grid (must contain 0)."""
    s_grid = np.asarray(s_grid, dtype=np.float64)
    ds = s_grid[1] - s_grid[0]
    i0_arr = np.where(np.abs(s_grid) < 1e-12 * max(1.0, abs(ds)))[0]
    if i0_arr.size != 1:
        raise ValueError("s grid must contain 0 exactly once")
    i0 = int(i0_arr[0])
    m = starts.shape[0]
    n = s_grid.shape[0]
    d = starts.shape[1]
    pts = np.empty((m, n, d))
    ab = np.empty((m, n, 2))
    if i0 < n - 1:
        fw, abf, exf = kernels.geodesic_paths(space.kappa, starts, dirs, lam, ds, n - 1 - i0)
        if np.any(exf >= 0):
            j = int(exf[exf >= 0].min())
            raise ChartExit("ruling left the chart", exit_s=float(j * ds))
        pts[:, i0:], ab[:, i0:] = fw, abf
    else:
        pts[:, i0], ab[:, i0] = starts, dirs
    if i0 > 0:
        bw, abb, exb = kernels.geodesic_paths(space.kappa, starts, dirs, lam, -ds, i0)
        if np.any(exb >= 0):
            j = int(exb[exb >= 0].min())
            raise ChartExit("ruling left the chart", exit_s=float(-j * ds))
        pts[:, :i0 + 1] = bw[:, ::-1]
        ab[:, :i0 + 1] = abb[:, ::-1]
    return pts, ab


def _v_field_by_fd(space, eps, points):
    """dF/deps in frame components by differencing rows of chart points."""
    d_eps = eps[1] - eps[0]
    dcoords = diff1(points, d_eps, axis=0)
    m, n, d = points.shape
    comps = ms.coords_to_frame(space, points.reshape(-1, d), dcoords.reshape(-1, d))
    return comps.reshape(m, n, 3)


def build_ruled_surface(space, alpha, H, eps_grid, s_grid, closed_s=False):
    """Rule a surface by CC-geodesics of curvature H through alpha.

    ``alpha(eps)`` returns (Point, horizontal unit FrameVector).  Each
    eps-row of the grid is the geodesic with those initial conditions; the
    variational field V is obtained by centered differences across rows.
    The eps-axis is flipped automatically when needed so that <V,T> < 0.
    """
    eps_grid = np.asarray(eps_grid, dtype=np.float64)
    s_grid = np.asarray(s_grid, dtype=np.float64)
    starts = []
    dirs = []
    for e in eps_grid:
        p, u = alpha(float(e))
        starts.append(p.coords)
        dirs.append([u.a, u.b])
    starts = np.asarray(starts)
    dirs = np.asarray(dirs)
    pts, ab = _integrate_rows(space, starts, dirs, H, s_grid)
    vel = np.concatenate([ab, np.zeros(ab.shape[:2] + (1,))], axis=2)
    V = _v_field_by_fd(space, eps_grid, pts)
    if np.nanmin(V[..., 2]) > 0.0:
        # reverse the family parameter so the orientation convention <V,T> < 0 holds
        eps_grid = (-eps_grid)[::-1].copy()
        pts = pts[::-1].copy()
        vel = vel[::-1].copy()
        V = _v_field_by_fd(space, eps_grid, pts)
    if float(np.max(np.linalg.norm(V, axis=2))) < 1e-10:
        raise ValueError("degenerate alpha: V vanishes, the map is not an immersion")
    return SurfacePatch(space, eps_grid, s_grid, pts, vel, V, float(H), closed_s)


def build_vertical_cylinder(space, gamma, fiber_grid, closed_s=False):
    """Flow a CC-geodesic trace along the Reeb field T.

    The resulting vertical patch has <N,T> = 0, <B(Z),S> = 1 and constant
    mean curvature equal to the curvature of ``gamma``.  The fiber parameter
    runs along -T so that <V, T> = -1 matches the orientation convention.
    """
    fiber_grid = np.asarray(fiber_grid, dtype=np.float64)
    m = fiber_grid.shape[0]
    n = gamma.n_samples
    d = gamma.points.shape[1]
    pts = np.empty((m, n, d))
    vel_coords = gamma.velocity_coords()
    vel = np.empty((m, n, 3))
    for i, e in enumerate(fiber_grid):
        moved = ms.reeb_flow(space, gamma.points, -float(e))
        pts[i] = moved
        if space.kappa == 1:
            vc = _rotate_sphere_vec(vel_coords, -float(e))
        else:
            vc = vel_coords  # the t-translation pushforward is the identity
        vel[i] = ms.coords_to_frame(space, moved, vc)
    V = np.zeros((m, n, 3))
    V[..., 2] = -1.0
    return SurfacePatch(space, fiber_grid, gamma.s.copy(), pts, vel, V,
                        float(gamma.lam), closed_s)


def _rotate_sphere_vec(vecs, tau):
    ct, st = np.cos(tau), np.sin(tau)
    out = np.empty_like(vecs)
    out[:, 0] = vecs[:, 0] * ct - vecs[:, 1] * st
    out[:, 1] = vecs[:, 0] * st + vecs[:, 1] * ct
    out[:, 2] = vecs[:, 2] * ct - vecs[:, 3] * st
    out[:, 3] = vecs[:, 2] * st + vecs[:, 3] * ct
    return out


# ---------------------------------------------------------------------------
# area, variations, volume
# ---------------------------------------------------------------------------

def sr_area(patch, region=None):
    """Sub-Riemannian area: trapezoid quadrature of |N_h| f_eps over the grid."""
    g = patch.geometry()
    w = patch.quad_weights()
    mask = np.zeros(patch.shape, dtype=bool)
    if region is None:
        mask[:] = True
    else:
        i0, i1, j0, j1 = region
        mask[i0:i1, j0:j1] = True
    if np.any(g.singular & mask):
        raise SingularPoint("integration region touches singular nodes")
    return float(np.sum((w * g.Nh * g.f_eps)[mask]))


@dataclass(frozen=True)
class VariationSpec:
    u: np.ndarray
    s_values: tuple
    omega_kind: str = "linear"

    def __post_init__(self):
        if self.omega_kind not in ("linear", "volume_corrected"):
            raise ValueError("omega_kind must be 'linear' or 'volume_corrected'")


def check_compact_support(patch, u, collar=2):
    """Require u to vanish on a boundary collar (eps always; s unless closed)."""
    u = np.asarray(u)
    if np.any(u[:collar, :] != 0.0) or np.any(u[-collar:, :] != 0.0):
        raise ValueError(f"u must vanish on an eps-collar of {collar} cells")
    if not patch.closed_s:
        if np.any(u[:, :collar] != 0.0) or np.any(u[:, -collar:] != 0.0):
            raise ValueError(f"u must vanish on an s-collar of {collar} cells")


def _displaced_frames(patch, lengths, nsteps=EXP_STEPS):
    """Displace all nodes along N by per-node lengths; return induced data.

    Returns (area_integrand, inner_U_N) where area_integrand is
    |N'_h| |E1 x E2| per node and inner_U_N is (w_end . cross), the volume
    integrand per unit u (cross = frame cross product of the FD tangents).
    """
    g = patch.geometry()
    if np.any(g.singular & (np.asarray(lengths) != 0.0)):
        raise SingularPoint("variation support touches singular nodes")
    m, n = patch.shape
    d = patch.points.shape[2]
    flat_p = patch.points.reshape(-1, d)
    flat_n = g.N.reshape(-1, 3)
    flat_len = np.asarray(lengths, dtype=np.float64).reshape(-1)
    pts2, w_end, exited = kernels.riemexp_many(patch.space.kappa, flat_p, flat_n, flat_len, nsteps)
    if np.any(exited):
        raise ChartExit("displaced node left the chart", exit_s=float(np.max(np.abs(flat_len))))
    pts2 = pts2.reshape(m, n, d)
    E1 = diff1(pts2, patch.d_eps, axis=0)
    E2 = diff1(pts2, patch.d_s, axis=1, periodic=patch.closed_s)
    flat2 = pts2.reshape(-1, d)
    c1 = ms.coords_to_frame(patch.space, flat2, E1.reshape(-1, d)).reshape(m, n, 3)
    c2 = ms.coords_to_frame(patch.space, flat2, E2.reshape(-1, d)).reshape(m, n, 3)
    cross = np.cross(c1, c2)
    cross_norm = np.linalg.norm(cross, axis=2)
    area_integrand = np.hypot(cross[..., 0], cross[..., 1])
    moved = np.asarray(lengths) != 0.0
    if np.any((area_integrand[moved] / np.maximum(cross_norm[moved], 1e-300))
              < patch.singular_tol):
        raise SingularAfterDisplacement("a displaced node became singular")
    inner_U_N = np.einsum("mnk,mnk->mn", w_end.reshape(m, n, 3), cross)
    return area_integrand, inner_U_N


def _area_displaced(patch, lengths):
    area_integrand, _ = _displaced_frames(patch, lengths)
    return float(np.sum(patch.quad_weights() * area_integrand))


def _volume_along(patch, u_like, lengths, nsimp=4):
    """Signed volume swept along the straight displacement path tau*lengths.

    Composite Simpson in tau over [0, 1] of  sum W u_like (w_end . cross).
    The swept volume between the surface and its displaced image depends
    only on the endpoint displacement, so the straight path is general.
    """
    w = patch.quad_weights()
    taus = np.linspace(0.0, 1.0, 2 * nsimp + 1)
    vals = np.empty(taus.shape[0])
    for k, tau in enumerate(taus):
        _, inner = _displaced_frames(patch, tau * lengths)
        vals[k] = float(np.sum(w * u_like * inner))
    h = taus[1] - taus[0]
    simpson = (h / 3.0) * (vals[0] + vals[-1] + 4.0 * vals[1::2].sum() + 2.0 * vals[2:-1:2].sum())
    return simpson


def mean_zero_projection(patch, u, bump=None):
    """Project u onto mean-zero by subtracting a multiple of an interior bump."""
    g = patch.geometry()
    w = patch.quad_weights()
    if bump is None:
        bump = interior_bump(patch)
    iu = float(np.sum(w * g.f_eps * u))
    ib = float(np.sum(w * g.f_eps * bump))
    return u - (iu / ib) * bump


def _bump_profile(x):
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def interior_bump(patch, radius_frac=0.3):
    """Smooth bump supported well inside the grid (all of s when closed)."""
    e0 = 0.5 * (patch.eps[0] + patch.eps[-1])
    re = radius_frac * (patch.eps[-1] - patch.eps[0])
    fe = _bump_profile((patch.eps - e0) / re)
    if patch.closed_s:
        fs = np.ones_like(patch.s)
    else:
        s0 = 0.5 * (patch.s[0] + patch.s[-1])
        rs = radius_frac * (patch.s[-1] - patch.s[0])
        fs = _bump_profile((patch.s - s0) / rs)
    return np.outer(fe, fs)


def normal_variation_functionals(patch, spec: VariationSpec, nsimp=4):
    """Evaluate (s, A(s), Vol(s)) for the normal variation exp(omega(s, p) N).

    ``linear`` uses omega(s, p) = s u(p); ``volume_corrected`` adds an
    interior-bump multiple chosen per s so the swept volume vanishes.
    """
    u = np.asarray(spec.u, dtype=np.float64)
    check_compact_support(patch, u)
    out = []
    bump = interior_bump(patch) if spec.omega_kind == "volume_corrected" else None
    for s_val in spec.s_values:
        if spec.omega_kind == "linear":
            lengths = s_val * u
            area = _area_displaced(patch, lengths)
            vol = _volume_along(patch, lengths, lengths, nsimp=nsimp)
        else:
            lengths, vol = _solve_volume_corrected(patch, u, float(s_val), bump, nsimp)
            area = _area_displaced(patch, lengths)
        out.append((float(s_val), area, vol))
    return out


def _solve_volume_corrected(patch, u, s_val, bump, nsimp):
    if s_val == 0.0:
        return 0.0 * u, 0.0

    def vol_of(c):
        lengths = s_val * u + c * bump
        return lengths, _volume_along(patch, lengths, lengths, nsimp=nsimp)

    c0, c1 = 0.0, 0.0
    l0, v0 = vol_of(c0)
    if abs(v0) < 1e-14:
        return l0, v0
    c1 = -v0 / _volume_along(patch, bump, 0.0 * u, nsimp=nsimp)
    l1, v1 = vol_of(c1)
    for _ in range(8):
        if abs(v1) < 1e-12 or v1 == v0:
            break
        c2 = c1 - v1 * (c1 - c0) / (v1 - v0)
        c0, v0, c1 = c1, v1, c2
        l1, v1 = vol_of(c1)
    return l1, v1
