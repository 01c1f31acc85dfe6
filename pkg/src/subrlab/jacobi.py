"""CC-Jacobi fields along CC-geodesics.

A variation by CC-geodesics of the same curvature lam has variational field
V solving

    V'' + R(gamma', V) gamma' + 2 lam (J(V') - <V, gamma'> T) = 0,

with the conserved quantity lam <V, T> + <V, gamma'> along the geodesic.
The vertical component f = <V, T> obeys f''' + mu f' = 0 with
mu = 4 (lam^2 + K), whose closed forms (sinh/cosh, polynomial, sin/cos by
the sign of mu) are provided by :func:`vertical_closed_form`.

Everything integrates in frame components, where the curvature term reduces
to the horizontal-vector identity of the space forms, so the coefficients
depend on (a, b)(s) only and never on the position.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from . import model_spaces as ms
from .errors import ChartExit, MisalignedBase

MU_BRANCH_TOL = 1e-12


@dataclass(frozen=True)
class JacobiState:
    V: ms.FrameVector
    Vprime: ms.FrameVector
    s: float = 0.0


@dataclass(frozen=True)
class JacobiTrace:
    geodesic: "object"          # GeodesicTrace the field lives on
    V: np.ndarray               # (n, 3) frame components
    Vprime: np.ndarray          # (n, 3) covariant derivative components
    conserved: np.ndarray       # (n,) lam <V,T> + <V, gamma'>
    mu: float

    @property
    def s(self):
        return self.geodesic.s

    @property
    def f(self):
        """Vertical component <V, T> per sample."""
        return self.V[:, 2]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "Va", "Vb", "Vc", "f", "conserved"])
            for i in range(self.s.shape[0]):
                w.writerow([repr(float(self.s[i]))]
                           + [repr(float(v)) for v in self.V[i]]
                           + [repr(float(self.V[i, 2])), repr(float(self.conserved[i]))])

    def to_json(self):
        return {
            "kappa": self.geodesic.space.kappa,
            "lambda": self.geodesic.lam,
            "mu": self.mu,
            "samples": [
                [float(self.s[i]), [float(v) for v in self.V[i]],
                 [float(v) for v in self.Vprime[i]], float(self.conserved[i])]
                for i in range(self.s.shape[0])
            ],
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=1)
            fh.write("\n")


def _conserved(lam, ab, V):
    return lam * V[:, 2] + ab[:, 0] * V[:, 0] + ab[:, 1] * V[:, 1]


def integrate_jacobi(trace, initial: JacobiState) -> JacobiTrace:
    """Integrate the CC-Jacobi equation along a geodesic trace."""
    if np.linalg.norm(initial.V.base.coords - trace.points[0]) > 1e-9:
        raise MisalignedBase("initial Jacobi data is not based at the trace start")
    lam = trace.lam
    kappa = trace.space.kappa
    nsteps = trace.n_samples - 1
    V, Vp = kernels.jacobi_paths(
        kappa, lam, trace.ab[0][None, :],
        initial.V.comps[None, :], initial.Vprime.comps[None, :],
        trace.step, nsteps,
    )
    V, Vp = V[0], Vp[0]
    return JacobiTrace(trace, V, Vp, _conserved(lam, trace.ab, V),
                       mu=4.0 * (lam * lam + kappa))


@dataclass(frozen=True)
class VerticalClosedForm:
    """Closed form of the vertical component f = <V, T>.

    Branch by the sign of mu = 4 (lam^2 + K):
      mu < 0:  f = (a sinh(r s) + b cosh(r s)) / r + c,  r = sqrt(-mu)
      mu = 0:  f = a s^2 + b s + c
      mu > 0:  f = (a sin(r s) - b cos(r s)) / r + c,    r = sqrt(mu)
    with the coefficients fixed by f(0), f'(0), f''(0).
    """

    mu: float
    a: float
    b: float
    c: float

    @property
    def branch(self):
        if abs(self.mu) < MU_BRANCH_TOL:
            return "polynomial"
        return "trigonometric" if self.mu > 0 else "hyperbolic"

    def __call__(self, s):
        s = np.asarray(s, dtype=np.float64)
        if self.branch == "polynomial":
            return self.a * s * s + self.b * s + self.c
        if self.mu > 0:
            r = np.sqrt(self.mu)
            return (self.a * np.sin(r * s) - self.b * np.cos(r * s)) / r + self.c
        r = np.sqrt(-self.mu)
        return (self.a * np.sinh(r * s) + self.b * np.cosh(r * s)) / r + self.c

    def derivative(self, s, order=1):
        s = np.asarray(s, dtype=np.float64)
        if self.branch == "polynomial":
            if order == 1:
                return 2.0 * self.a * s + self.b
            if order == 2:
                return 2.0 * self.a * np.ones_like(s)
            raise ValueError("order must be 1 or 2")
        if self.mu > 0:
            r = np.sqrt(self.mu)
            if order == 1:
                return self.a * np.cos(r * s) + self.b * np.sin(r * s)
            if order == 2:
                return r * (-self.a * np.sin(r * s) + self.b * np.cos(r * s))
        else:
            r = np.sqrt(-self.mu)
            if order == 1:
                return self.a * np.cosh(r * s) + self.b * np.sinh(r * s)
            if order == 2:
                return r * (self.a * np.sinh(r * s) + self.b * np.cosh(r * s))
        raise ValueError("order must be 1 or 2")


def vertical_closed_form(mu, f0, f0p, f0pp) -> VerticalClosedForm:
    """Coefficients of the closed-form vertical component from initial data."""
    if abs(mu) < MU_BRANCH_TOL:
        return VerticalClosedForm(0.0, 0.5 * f0pp, f0p, f0)
    if mu > 0:
        r = np.sqrt(mu)
        return VerticalClosedForm(mu, f0p, f0pp / r, f0 + f0pp / mu)
    r = np.sqrt(-mu)
    return VerticalClosedForm(mu, f0p, f0pp / r, f0 + f0pp / mu)


def family_initial_state(trace, V0, dU0):
    """Admissible Jacobi data for a variation through the trace start.

    A field coming from a family of unit-speed CC-geodesics satisfies the
    pointwise constraints <V', gamma'> = 0 and <V', T> = <V, J(gamma')>.
    Given the transversal velocity ``V0`` (frame components) and the rotation
    rate ``dU0`` of the initial horizontal directions (component derivative
    of (a, b, 0) along the family), this assembles V'(0) = D_V gamma'(0) and
    returns a JacobiState whose conserved quantity is genuinely constant.
    """
    V0 = np.asarray(V0, dtype=np.float64)
    dU0 = np.asarray(dU0, dtype=np.float64).copy()
    u0 = np.array([trace.ab[0, 0], trace.ab[0, 1], 0.0])
    # directions stay unit and horizontal: project their derivative accordingly
    dU0[2] = 0.0
    dU0 -= (dU0 @ u0) * u0
    Vp0 = dU0 + ms.gamma_contract(trace.space.kappa, V0, u0)
    p0 = trace.point_at(0)
    return JacobiState(ms.FrameVector(*V0, p0), ms.FrameVector(*Vp0, p0))


def seed_f_derivatives(lam, ab0, V0, Vp0):
    """(f(0), f'(0), f''(0)) for closed-form seeding, from the exact identities

    f' = 2 <V, J(gamma')> and f'' = 2 (<V', J(gamma')> + 2 lam <V, gamma'> - <V, T>).
    """
    a, b = ab0
    ju = np.array([-b, a, 0.0])
    u = np.array([a, b, 0.0])
    f0 = V0[2]
    f0p = 2.0 * float(V0 @ ju)
    f0pp = 2.0 * (float(Vp0 @ ju) + 2.0 * lam * float(V0 @ u) - f0)
    return f0, f0p, f0pp


@dataclass(frozen=True)
class FamilySamples:
    """Finite-difference samples of a geodesic-family variational field."""

    s: np.ndarray
    V: np.ndarray          # (n, 3) frame components at the center geodesic
    V0: np.ndarray         # (3,) measured initial value
    Vp0: np.ndarray        # (3,) measured initial covariant derivative

    @property
    def f(self):
        return self.V[:, 2]


def family_oracle(space, alpha, lam, eps, s_grid) -> FamilySamples:
    """Differentiate a family of CC-geodesics through curve ``alpha`` directly.

    ``alpha(e)`` must return (Point, horizontal unit FrameVector).  Central
    finite differences across e in {-eps, 0, +eps} give V(s) independently of
    the Jacobi integrator, for use as its oracle.
    """
    s_grid = np.asarray(s_grid, dtype=np.float64)
    h = s_grid[1] - s_grid[0]
    nsteps = s_grid.shape[0] - 1
    starts, dirs = [], []
    for e in (-eps, 0.0, eps):
        p, u = alpha(e)
        starts.append(p.coords)
        dirs.append([u.a, u.b])
    starts = np.asarray(starts)
    dirs = np.asarray(dirs)
    pts, _, exit_idx = kernels.geodesic_paths(space.kappa, starts, dirs, lam, h, nsteps)
    if np.any(exit_idx >= 0):
        j = int(exit_idx[exit_idx >= 0].min())
        raise ChartExit("family member left the chart", exit_s=float(j * h))
    dcoords = (pts[2] - pts[0]) / (2.0 * eps)
    # for kappa=1 the chord's O(eps^2) radial part is orthogonal to the frame,
    # so expressing in frame components discards it
    V = ms.coords_to_frame(space, pts[1], dcoords)
    # measured initial data: V(0) from the position FD, V'(0) = D_V gamma'(0)
    V0 = V[0]
    du = (np.array([dirs[2, 0], dirs[2, 1], 0.0]) - np.array([dirs[0, 0], dirs[0, 1], 0.0])) / (2.0 * eps)
    u0 = np.array([dirs[1, 0], dirs[1, 1], 0.0])
    Vp0 = du + ms.gamma_contract(space.kappa, V0, u0)
    return FamilySamples(s_grid.copy(), V, V0, Vp0)
