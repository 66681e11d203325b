"""Gaussian normal foliations off a base hypersurface and the splitting verifier.

Each fiber node of the base surface launches a unit-speed geodesic along
the chosen normal.  Alongside the geodesic the coordinate Jacobian
``J_A = dx/dq^A`` of the normal exponential map is integrated (the Jacobi
equation written in chart components), so the slices ``{t} x N`` come with
their tangent frames, induced metrics and second fundamental forms without
any finite differencing across fibers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp

from . import dual
from .diffgeo import christoffel, christoffel_derivative, curvature, eval_metric
from .errors import CausticDetected, GeodesicExitedDomain, InvalidParam, NumericalError, UnsupportedTopology
from .hypersurface import EmbeddedSurface, SurfaceGeometry, Topology, frame_geometry, second_fundamental_form
from .initial_data import DataTag, InitialDataSet
from .parallel import chunks, pmap
from .stability import assemble_from_geometry, evolution_rhs, grid_scalar_curvature
from .torus import TorusGrid

RTOL = 1e-10
ATOL = 1e-12
CAUSTIC_RATIO = 1e-10
CHUNK = 256


@dataclass(frozen=True)
class NormalFoliation:
    """Slices ``{t} x N`` sampled at ``t_grid`` on the base fiber grid.

    Arrays are indexed ``[slice, node, ...]``; ``frames`` holds the pushed
    fiber coordinate frames (columns), ``frame_rates`` their t-derivatives.
    """

    base: EmbeddedSurface
    t_grid: np.ndarray
    nodes: np.ndarray
    grid_shape: tuple[int, ...]
    points: np.ndarray = field(repr=False)
    velocity: np.ndarray = field(repr=False)
    frames: np.ndarray = field(repr=False)
    frame_rates: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    h_slices: np.ndarray = field(repr=False)
    A_slices: np.ndarray = field(repr=False)

    @property
    def geodesic_paths(self) -> np.ndarray:
        """``(node, slice, n)`` chart points along each normal geodesic."""
        return np.swapaxes(self.points, 0, 1)

    @property
    def slices(self) -> int:
        return len(self.t_grid)

    def slice_geometry(self, i: int, ids: InitialDataSet | None = None) -> SurfaceGeometry:
        x = self.points[i]
        nu = self.velocity[i] / self.psi[i][:, None]
        return frame_geometry(self.base.ambient, self.nodes, x, self.frames[i], nu, self.A_slices[i], ids)

    def torus_grid(self) -> TorusGrid:
        if self.base.topology is not Topology.TORUS:
            raise UnsupportedTopology("grid operators need a torus base")
        return TorusGrid(self.base.dim, self.grid_shape[0])


@dataclass(frozen=True)
class SplitReport:
    eps: float
    warp_rate: float
    max_theta: float
    max_chi: float
    max_lapse_dev: float
    max_warp_dev: float
    ricci_flat_dev: float
    tol: float
    verdict: bool
    reason: str
    slices: int
    delta_max: float
    assumptions: tuple[str, ...] = ("base is locally weakly outermost (input assumption, not checked)",)

    def to_dict(self) -> dict:
        return {
            "eps": self.eps, "warp_rate": self.warp_rate, "max_theta": self.max_theta,
            "max_chi": self.max_chi, "max_lapse_dev": self.max_lapse_dev,
            "max_warp_dev": self.max_warp_dev, "ricci_flat_dev": self.ricci_flat_dev,
            "tol": self.tol, "verdict": self.verdict, "reason": self.reason,
            "slices": self.slices, "delta_max": self.delta_max, "assumptions": list(self.assumptions),
        }


# -- geodesic + Jacobi flow --------------------------------------------------------
def _flow_rhs(metric, n: int, d: int, B: int):
    def rhs(_t, y):
        Y = y.reshape(B, 2 * n + 2 * n * d)
        x, v = Y[:, :n], Y[:, n:2 * n]
        J = Y[:, 2 * n:2 * n + n * d].reshape(B, n, d)
        Jd = Y[:, 2 * n + n * d:].reshape(B, n, d)
        g, dg, ddg = dual.jet(metric.components, x, order=2)
        gi = np.linalg.inv(g)
        G = christoffel(gi, dg)
        dG = christoffel_derivative(gi, dg, ddg)
        acc = -np.einsum("bkij,bi,bj->bk", G, v, v)
        Jdd = (-np.einsum("bmkij,bi,bj,bma->bka", dG, v, v, J)
               - 2.0 * np.einsum("bkij,bi,bja->bka", G, v, Jd))
        return np.concatenate([v, acc, Jd.reshape(B, -1), Jdd.reshape(B, -1)], axis=1).reshape(-1)
    return rhs


def _caustic_event(metric, n: int, d: int, B: int, det0: np.ndarray):
    def event(_t, y):
        Y = y.reshape(B, 2 * n + 2 * n * d)
        x = Y[:, :n]
        J = Y[:, 2 * n:2 * n + n * d].reshape(B, n, d)
        (g,) = dual.jet(metric.components, x, order=0)
        h = np.einsum("bia,bij,bjc->bac", J, g, J)
        ratio = np.linalg.det(h) / det0
        if not np.all(np.isfinite(ratio)):
            return -1.0
        return float(np.min(ratio) - CAUSTIC_RATIO)
    event.terminal = True
    event.direction = -1
    return event


def _integrate_chunk(metric, y0: np.ndarray, det0: np.ndarray, t_grid: np.ndarray, n: int, d: int):
    B = y0.shape[0]
    sol = solve_ivp(_flow_rhs(metric, n, d, B), (0.0, float(t_grid[-1])), y0.reshape(-1), method="RK45",
                    t_eval=t_grid, rtol=RTOL, atol=ATOL, events=_caustic_event(metric, n, d, B, det0))
    if sol.status == 1:
        t_hit = float(sol.t_events[0][0])
        raise CausticDetected(f"normal exponential map degenerates at t = {t_hit:.6g}")
    if sol.status != 0:
        raise NumericalError(f"geodesic integration failed: {sol.message}")
    return np.moveaxis(sol.y.reshape(B, 2 * n + 2 * n * d, -1), -1, 0)


def build_normal_foliation(m, N: EmbeddedSurface, delta_max: float = 1.0, steps: int = 17,
                           resolution: int | None = None) -> NormalFoliation:
    """Integrate unit normal geodesics from every fiber node of ``N``.

    ``m`` is the ambient metric (must match ``N.ambient``).  ``steps`` slices
    are recorded at equispaced ``t`` in ``[0, delta_max]``.
    """
    if not delta_max > 0:
        raise InvalidParam("delta_max must be positive")
    if steps < 2:
        raise InvalidParam("need at least two slices")
    if m is not N.ambient:
        N = EmbeddedSurface(m, N.immersion, N.orientation, N.topology, N.normal_choice, N.level, N.label)
    q, shape = N.fiber_grid(resolution)
    geo = second_fundamental_form(N, q)
    n, d = m.dim, N.dim
    _, G = _christoffel(m, geo.points)
    shape_op = np.einsum("bia,bac,bcd->bid", geo.tangents, geo.h_inv, geo.A)
    Jd0 = shape_op - np.einsum("bkij,bia,bj->bka", G, geo.tangents, geo.normal)
    y0 = np.concatenate([geo.points, geo.normal, geo.tangents.reshape(len(q), -1), Jd0.reshape(len(q), -1)], axis=1)
    det0 = np.linalg.det(geo.induced_h)
    t_grid = np.linspace(0.0, float(delta_max), steps)
    parts = pmap(lambda s: _integrate_chunk(m, y0[s], det0[s], t_grid, n, d), chunks(len(q), CHUNK))
    Y = np.concatenate(parts, axis=1)  # (slice, node, state)
    x, v = Y[..., :n], Y[..., n:2 * n]
    J = Y[..., 2 * n:2 * n + n * d].reshape(*Y.shape[:2], n, d)
    Jd = Y[..., 2 * n + n * d:].reshape(*Y.shape[:2], n, d)
    inside = np.asarray(m.domain(x), dtype=bool)
    if not np.all(inside):
        k = int(np.argmax(~np.all(inside, axis=1)))
        raise GeodesicExitedDomain(f"normal geodesics leave the chart domain by t = {t_grid[k]:.6g}")
    ev = eval_metric(m, x)
    _, Gx = _christoffel(m, x)
    psi = np.sqrt(np.einsum("sbi,sbij,sbj->sb", v, ev.g, v))
    h = np.einsum("sbia,sbij,sbjc->sbac", J, ev.g, J)
    nabla_nu = Jd + np.einsum("sbkij,sbia,sbj->sbka", Gx, J, v)
    A = np.einsum("sbka,sbkl,sblc->sbac", nabla_nu, ev.g, J) / psi[..., None, None]
    return NormalFoliation(N, t_grid, q, shape, x, v, J, Jd, psi, h, 0.5 * (A + np.swapaxes(A, -1, -2)))


def _christoffel(m, x):
    g, dg = dual.jet(m.components, x, order=1)
    gi = np.linalg.inv(g)
    return gi, christoffel(gi, dg)


# -- slice diagnostics ----------------------------------------------------------------
def theta_profile(f: NormalFoliation, ids: InitialDataSet) -> np.ndarray:
    """Null expansion ``theta[slice, node]``."""
    return np.stack([f.slice_geometry(i, ids).theta for i in range(f.slices)])


def theta_rows(f: NormalFoliation, theta: np.ndarray) -> tuple[list[str], np.ndarray]:
    header = ["t", "theta_min", "theta_max", "theta_mean"]
    return header, np.column_stack([f.t_grid, theta.min(axis=1), theta.max(axis=1), theta.mean(axis=1)])


def gauge_deviation(f: NormalFoliation) -> tuple[float, float]:
    """``sup|g(d_t, d_t) - 1|`` and ``sup|g(d_t, d_A)|`` over all slices."""
    g = eval_metric(f.base.ambient, f.points).g
    unit = np.max(np.abs(np.einsum("sbi,sbij,sbj->sb", f.velocity, g, f.velocity) - 1.0))
    orth = np.max(np.abs(np.einsum("sbi,sbij,sbja->sba", f.velocity, g, f.frames)))
    return float(unit), float(orth)


def evolution_consistency(f: NormalFoliation, ids: InitialDataSet) -> float:
    """Sup deviation between central differences of theta and the evolution RHS."""
    if f.slices < 3:
        raise InvalidParam("need at least three slices")
    grid = f.torus_grid()
    theta = theta_profile(f, ids)
    dt = np.diff(f.t_grid)
    worst = 0.0
    for i in range(1, f.slices - 1):
        fd = (theta[i + 1] - theta[i - 1]) / (dt[i - 1] + dt[i])
        geo = f.slice_geometry(i, ids)
        asm = assemble_from_geometry(grid, geo, ids, grid_scalar_curvature(grid, geo.induced_h))
        worst = max(worst, float(np.max(np.abs(fd - evolution_rhs(asm, f.psi[i])))))
    return worst


def _warp_rate(ids: InitialDataSet, eps: float | None) -> tuple[float, float]:
    c = ids.umbilic_factor
    if eps is None:
        if c is None:
            raise InvalidParam("eps is required for data that is not of the form K = c g")
        return abs(c), -c
    if ids.tag is DataTag.UMBILIC_PLUS:
        return float(eps), -float(eps)
    return float(eps), float(eps)


def _reason(checks: list[tuple[str, float]], theta: np.ndarray, tol: float) -> str:
    for name, dev in checks:
        if dev >= tol:
            if name == "theta":
                inner = theta[1:]
                if np.all(inner < -tol):
                    return "interior slices outer trapped"
                if np.all(inner > tol):
                    return "interior slices have positive null expansion"
                return "slices are not MOTS"
            return {"chi": "null second fundamental form does not vanish",
                    "lapse": "lapse is not a function of t alone",
                    "warp": "slice metrics are not exponentially warped",
                    "ricci": "base metric is not Ricci flat"}[name]
    return "warped product splitting verified"


def verify_splitting(f: NormalFoliation, ids: InitialDataSet, eps: float | None = None,
                     tol: float = 1e-6) -> SplitReport:
    """Check the conclusions of the rigidity statement on a built foliation.

    The warp is ``h(t) = exp(2 w t) h(0)`` with ``w = -c`` for ``K = c g``.
    Sup-norm gates use ``tol * sqrt(slices)``.
    """
    eps_val, w = _warp_rate(ids, eps)
    gate = tol * np.sqrt(f.slices)
    theta = theta_profile(f, ids)
    max_theta = float(np.max(np.abs(theta)))
    chi = np.stack([np.sqrt(np.maximum(f.slice_geometry(i, ids).chi_norm_sq(), 0.0)) for i in range(f.slices)])
    max_chi = float(np.max(chi))
    # reparametrize t so that the fiber-averaged lapse is 1
    psi_bar = f.psi.mean(axis=1)
    s = cumulative_trapezoid(psi_bar, f.t_grid, initial=0.0)
    max_lapse = float(np.max(np.abs(f.psi / psi_bar[:, None] - 1.0)))
    scale = np.exp(-2.0 * w * s)[:, None, None, None]
    max_warp = float(np.max(np.abs(f.h_slices * scale - f.h_slices[:1])))
    ric = curvature(f.base.induced_metric(), f.nodes).ricci
    ricci_dev = float(np.max(np.abs(ric)))
    checks = [("theta", max_theta), ("chi", max_chi), ("lapse", max_lapse), ("warp", max_warp),
              ("ricci", ricci_dev)]
    verdict = all(dev < gate for _, dev in checks)
    return SplitReport(eps_val, w, max_theta, max_chi, max_lapse, max_warp, ricci_dev, float(gate), verdict,
                       _reason(checks, theta, gate), f.slices, float(f.t_grid[-1]))
