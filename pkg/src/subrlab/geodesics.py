"""Carnot-Caratheodory geodesics of prescribed curvature.

A CC-geodesic of curvature ``lam`` is a unit-speed horizontal curve with
gamma'' + 2 lam J(gamma') = 0 (prime = covariant derivative along the
curve).  In the frame {X, Y, T} the velocity components (a, b) rotate at
rate 2 lam while the position follows dp/ds = a X(p) + b Y(p); the kernel
integrates the coupled system with fixed-step RK4, carrying (a, b) by the
exact rotation so a^2 + b^2 = 1 holds identically.

Both <gamma', T> = 0 and |gamma'| = 1 are constants of the motion.  The
drift report re-measures them from the integrated positions (4th-order
finite differences re-expressed in the frame), which is an honest estimate
of the integration error rather than a restatement of the stored (a, b).
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from . import model_spaces as ms
from .errors import ChartExit, DegenerateProjection, StepTooLarge
from .stencils import diff1, diff2

DRIFT_BUDGET = 1e-6


@dataclass(frozen=True)
class GeodesicSpec:
    space: ms.ModelSpace
    start: ms.Point
    direction: ms.FrameVector
    lam: float
    s_max: float
    step: float = 1e-3

    def __post_init__(self):
        ms.require_in_domain(self.space, self.start)
        if abs(self.direction.c) > 1e-12:
            raise ValueError("initial direction must be horizontal")
        if abs(self.direction.norm() - 1.0) > 1e-12:
            raise ValueError("initial direction must be unit")
        if self.step <= 0 or self.s_max <= 0:
            raise ValueError("step and s_max must be positive")


@dataclass(frozen=True)
class DriftReport:
    max_speed_dev: float
    max_vertical_dev: float

    def to_json(self):
        return {"max_speed_dev": self.max_speed_dev,
                "max_vertical_dev": self.max_vertical_dev}


@dataclass(frozen=True)
class GeodesicTrace:
    space: ms.ModelSpace
    lam: float
    step: float
    s: np.ndarray          # (n,)
    points: np.ndarray     # (n, d) chart coordinates
    ab: np.ndarray         # (n, 2) horizontal velocity components
    drift_report: DriftReport

    @property
    def n_samples(self):
        return self.s.shape[0]

    def point_at(self, i):
        return ms.Point(self.points[i])

    def velocity_at(self, i):
        return ms.FrameVector(self.ab[i, 0], self.ab[i, 1], 0.0, self.point_at(i))

    @property
    def samples(self):
        return [(float(self.s[i]), self.point_at(i), self.velocity_at(i))
                for i in range(self.n_samples)]

    def velocity_coords(self):
        comps = np.concatenate([self.ab, np.zeros((self.n_samples, 1))], axis=1)
        return ms.frame_to_coords(self.space, self.points, comps)

    def write_csv(self, path):
        names = ["x1", "y1", "x2", "y2"] if self.space.kappa == 1 else ["x", "y", "t"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s"] + names + ["a", "b", "c"])
            for i in range(self.n_samples):
                w.writerow([repr(float(self.s[i]))]
                           + [repr(float(v)) for v in self.points[i]]
                           + [repr(float(self.ab[i, 0])), repr(float(self.ab[i, 1])), "0.0"])

    def to_json(self):
        return {
            "kappa": self.space.kappa,
            "lambda": self.lam,
            "step": self.step,
            "drift_report": self.drift_report.to_json(),
            "samples": [
                [float(self.s[i]), [float(v) for v in self.points[i]],
                 [float(self.ab[i, 0]), float(self.ab[i, 1]), 0.0]]
                for i in range(self.n_samples)
            ],
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=1)
            fh.write("\n")


CHART_CONDITION_FLOOR = 1e-4


def _measure_drift(space, pts, ab, h):
    """Re-measure |gamma'| and <gamma', T> from the integrated positions.

    Restricted to samples where the disk chart is numerically well
    conditioned (1 + kappa r^2 above CHART_CONDITION_FLOOR): closer to the
    boundary the frame solve amplifies roundoff past the drift tolerance and
    the measurement stops meaning anything.  No samples are excluded for
    kappa in {0, 1}.
    """
    if pts.shape[0] < 7:
        return DriftReport(0.0, 0.0)
    vel = diff1(pts, h, axis=0)
    inner = slice(2, -2)
    p_in, v_in = pts[inner], vel[inner]
    if space.kappa < 0:
        ok = 1.0 + space.kappa * (p_in[:, 0] ** 2 + p_in[:, 1] ** 2) > CHART_CONDITION_FLOOR
        if not np.any(ok):
            return DriftReport(0.0, 0.0)
        p_in, v_in = p_in[ok], v_in[ok]
    comps = ms.coords_to_frame(space, p_in, v_in)
    speed = np.linalg.norm(comps, axis=1)
    return DriftReport(float(np.abs(speed - 1.0).max()),
                       float(np.abs(comps[:, 2]).max()))


def integrate_geodesic(spec: GeodesicSpec) -> GeodesicTrace:
    """Integrate a CC-geodesic on the uniform grid {0, step, ..., s_max}."""
    nsteps = int(round(spec.s_max / spec.step))
    ab0 = np.array([[spec.direction.a, spec.direction.b]])
    pts, ab, exit_idx = kernels.geodesic_paths(
        spec.space.kappa, spec.start.coords[None, :], ab0, spec.lam, spec.step, nsteps
    )
    s = spec.step * np.arange(nsteps + 1)
    if exit_idx[0] >= 0:
        j = int(exit_idx[0])
        partial = GeodesicTrace(spec.space, spec.lam, spec.step, s[:j],
                                pts[0, :j].copy(), ab[0, :j].copy(),
                                _measure_drift(spec.space, pts[0, :j], ab[0, :j], spec.step))
        raise ChartExit(f"geodesic left the chart of M({spec.space.kappa}) at s={s[j]:.6g}",
                        exit_s=float(s[j]), partial=partial)
    drift = _measure_drift(spec.space, pts[0], ab[0], spec.step)
    if max(drift.max_speed_dev, drift.max_vertical_dev) > DRIFT_BUDGET:
        raise StepTooLarge(
            f"measured drift {max(drift.max_speed_dev, drift.max_vertical_dev):.3e} exceeds "
            f"{DRIFT_BUDGET:g}; halve the step size"
        )
    return GeodesicTrace(spec.space, spec.lam, spec.step, s, pts[0], ab[0], drift)


# ---------------------------------------------------------------------------
# projection to the base surface
# ---------------------------------------------------------------------------

def hopf_projection(pts):
    """The submersion of the sphere chart onto the unit 2-sphere."""
    x1, y1, x2, y2 = pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3]
    out = np.empty((pts.shape[0], 3))
    out[:, 0] = x1 * x1 + y1 * y1 - x2 * x2 - y2 * y2
    out[:, 1] = 2.0 * (x2 * y1 - x1 * y2)
    out[:, 2] = 2.0 * (x1 * x2 + y1 * y2)
    return out


def _hopf_push(pts, vecs):
    x1, y1, x2, y2 = pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3]
    v1, w1, v2, w2 = vecs[:, 0], vecs[:, 1], vecs[:, 2], vecs[:, 3]
    out = np.empty((pts.shape[0], 3))
    out[:, 0] = 2.0 * (x1 * v1 + y1 * w1 - x2 * v2 - y2 * w2)
    out[:, 1] = 2.0 * (v2 * y1 + x2 * w1 - v1 * y2 - x1 * w2)
    out[:, 2] = 2.0 * (v1 * x2 + x1 * v2 + w1 * y2 + y1 * w2)
    return out


def projection_curvature_samples(space, trace):
    """Geodesic curvature of the projected curve, one value per interior sample.

    The projection is the drop-t map for kappa <= 0 and the Hopf submersion
    for kappa = 1; the normal is n = -d(pi)(J(gamma')).  For a trace of
    curvature lam the result is the constant 2*lam.
    """
    if trace.n_samples < 5:
        raise ValueError("need at least 5 samples")
    h = trace.step
    jg = ms.frame_to_coords(space, trace.points,
                            np.stack([-trace.ab[:, 1], trace.ab[:, 0],
                                      np.zeros(trace.n_samples)], axis=1))
    inner = slice(2, -2)
    if space.kappa == 1:
        alpha = hopf_projection(trace.points)
        d1a = diff1(alpha, h, axis=0)
        d2a = diff2(alpha, h, axis=0)
        speed_g = 0.5 * np.linalg.norm(d1a, axis=1)
        if np.any(speed_g[inner] < 1e-8):
            raise DegenerateProjection("projected speed below 1e-8")
        acov = d2a - np.einsum("ij,ij->i", d2a, alpha)[:, None] * alpha
        n_raw = -_hopf_push(trace.points, jg)
        nn = np.linalg.norm(n_raw, axis=1)
        # base metric is the quarter round metric: g = euc/4, |n|_g = |n|/2
        curv = 0.5 * np.einsum("ij,ij->i", acov, n_raw) / nn
        return curv[inner]
    x = trace.points[:, 0]
    y = trace.points[:, 1]
    dx = diff1(x, h)
    dy = diff1(y, h)
    ddx = diff2(x, h)
    ddy = diff2(y, h)
    inv_rho = 1.0 + space.kappa * (x * x + y * y)
    phx = -2.0 * space.kappa * x / inv_rho
    phy = -2.0 * space.kappa * y / inv_rho
    ax = ddx + phx * (dx * dx - dy * dy) + 2.0 * phy * dx * dy
    ay = ddy + phy * (dy * dy - dx * dx) + 2.0 * phx * dx * dy
    speed_g = np.sqrt(dx * dx + dy * dy) / inv_rho
    if np.any(speed_g[inner] < 1e-8):
        raise DegenerateProjection("projected speed below 1e-8")
    nx = -jg[:, 0]
    ny = -jg[:, 1]
    nn = np.sqrt(nx * nx + ny * ny)
    curv = (ax * nx + ay * ny) / (inv_rho * nn)
    return curv[inner]


def projection_curvature(space, trace):
    """Mean geodesic curvature of the projected trace over interior samples."""
    return float(projection_curvature_samples(space, trace).mean())


# ---------------------------------------------------------------------------
# closed / injective classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Completeness:
    kind: str                 # "injective" | "closed" | "undetermined"
    period: float = None


def classify_completeness(trace, period_tol=1e-6):
    """Detect the first phase-space return of a trace.

    Scans the distance (in chart coordinates of position and velocity) to the
    initial state; a parabolic refinement of d^2 around each local minimum
    decides whether it is a genuine return.
    """
    needed = 4.0 * np.pi / max(1.0, abs(2.0 * trace.lam))
    if trace.s[-1] < needed - 1e-9:
        raise ValueError(f"trace must cover s_max >= {needed:.6g}")
    state = np.concatenate([trace.points, trace.velocity_coords()], axis=1)
    d = np.linalg.norm(state - state[0], axis=1)
    d2 = d * d
    n = d.shape[0]
    best = None
    for j in range(1, n - 1):
        if trace.s[j] < 10.0 * trace.step:
            continue
        if d[j] <= d[j - 1] and d[j] <= d[j + 1] and d[j] < 0.1:
            denom = d2[j + 1] - 2.0 * d2[j] + d2[j - 1]
            if denom <= 0:
                s_star, v_star = trace.s[j], d2[j]
            else:
                delta = 0.5 * (d2[j - 1] - d2[j + 1]) / denom
                s_star = trace.s[j] + delta * trace.step
                v_star = d2[j] - 0.25 * (d2[j - 1] - d2[j + 1]) * delta
            d_star = np.sqrt(max(v_star, 0.0))
            if d_star < period_tol:
                best = float(s_star)
                break
    if best is not None:
        return Completeness("closed", best)
    tail = d[trace.s >= 1.0]
    if tail.size and tail.min() > 10.0 * period_tol:
        return Completeness("injective")
    return Completeness("undetermined")
