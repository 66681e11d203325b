"""Solutions of Obata's equation ``Hess f = f g`` in warped-product form.

Along a unit-speed normal geodesic, ``f(t) = c1 e^t + c2 e^-t`` with
``c1 + c2 = a`` (the value of ``f`` on the base) and ``c1 - c2 = |grad f|``.
The metric is then ``dt^2 + xi(t)^2 h`` with ``xi = f'/|grad f|``, i.e.
``xi(t) = (c1 e^t - c2 e^-t) / (c1 - c2)``, which solves ``xi'' = xi``,
``xi(0) = 1``, ``xi'(0) = a / |grad f|``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.stats import qmc

from . import dual
from .catalog import WarpedProfile, make_hyperbolic_cap, warped_metric
from .diffgeo import MetricField, covariant_hessian, flat_metric, sectional_curvature
from .errors import InvalidParam, NumericalError, ResidualExceeded
from .hypersurface import EmbeddedSurface, Topology, second_fundamental_form
from .torus import TorusGrid


class ObataCase(enum.Enum):
    COMPACT = "compact"
    NONCOMPACT = "noncompact"


@dataclass(frozen=True)
class ObataSolution:
    c1: float
    c2: float
    a: float
    grad_norm: float
    case: ObataCase

    def f(self, t):
        """``c1 e^t + c2 e^-t`` (dual-compatible)."""
        return self.c1 * dual.exp(t) + self.c2 * dual.exp(-t)

    def xi(self, t):
        return (self.c1 * dual.exp(t) - self.c2 * dual.exp(-t)) / (self.c1 - self.c2)

    def xi_zero(self) -> float:
        """First ``t > 0`` where ``xi`` vanishes (``inf`` if none)."""
        if self.c1 != 0.0 and self.c2 / self.c1 > 1.0:
            return 0.5 * float(np.log(self.c2 / self.c1))
        return np.inf


@dataclass(frozen=True)
class ReconstructedManifold:
    solution: ObataSolution
    profile: WarpedProfile
    fiber: MetricField
    metric: MetricField
    f_field: Callable[[Sequence[Any]], Any] = field(repr=False)
    report: dict = field(default_factory=dict)


def solve_warp_ode(a: float, grad_norm: float, fiber: MetricField | None = None,
                   T: float = np.inf) -> tuple[ObataSolution, WarpedProfile]:
    """Closed-form coefficients and warp profile (flat 2-torus fiber by default)."""
    if not grad_norm > 0:
        raise InvalidParam("grad_norm must be positive")
    a, g = float(a), float(grad_norm)
    c1, c2 = 0.5 * (a + g), 0.5 * (a - g)
    probe = ObataSolution(c1, c2, a, g, ObataCase.NONCOMPACT)
    t0 = probe.xi_zero()
    case = ObataCase.NONCOMPACT if np.isinf(t0) else ObataCase.COMPACT
    sol = ObataSolution(c1, c2, a, g, case)
    fiber = flat_metric(2, chart_id="flat-torus") if fiber is None else fiber
    return sol, WarpedProfile(sol.xi, fiber, float(np.sign(c1 + c2)) if c1 + c2 else 0.0, min(T, t0))


def integrate_warp_ode(sol: ObataSolution, t: np.ndarray) -> np.ndarray:
    """``xi`` at ``t`` from RK45 on ``xi'' = xi`` (independent of the closed form)."""
    t = np.asarray(t, dtype=float)
    y0 = [1.0, sol.a / sol.grad_norm]
    out = solve_ivp(lambda _s, y: [y[1], y[0]], (0.0, float(t.max())), y0, method="RK45", t_eval=t,
                    rtol=1e-13, atol=1e-13)
    if out.status != 0:
        raise NumericalError(out.message)
    return out.y[0]


def hessian_residual(m: MetricField, f: Callable[[Sequence[Any]], Any], points) -> float:
    """``sup |nabla^2 f - f g|`` (componentwise) over ``points``."""
    f0, _, hess, ev = covariant_hessian(m, f, points)
    return float(np.max(np.abs(hess - f0[..., None, None] * ev.g)))


def level_set_analysis(c1: np.ndarray, h: np.ndarray, grid: TorusGrid | None = None,
                       c2: float = 0.0) -> dict:
    """Consistency of ``Lap_N c1 = 2(n-1) c2`` for data sampled on a flat torus.

    Returns the pointwise identity deviation, ``c2`` recovered from the
    integral of ``Lap_N c1`` over ``N`` (zero on a closed fiber), that integral
    itself, and the spread of ``c1`` about its mean.
    """
    c1 = np.asarray(c1, dtype=float).reshape(-1)
    h = np.asarray(h, dtype=float)
    if grid is None:
        d = h.shape[-1]
        N = round(len(c1) ** (1.0 / d))
        grid = TorusGrid(d, N)
    if grid.method != "spectral":
        grid = TorusGrid(grid.dim, grid.N, "spectral")
    n = grid.dim + 1
    lap = grid.laplacian(h) @ c1
    vol = np.sqrt(np.linalg.det(h))
    integral = grid.integrate(lap, vol)
    area = grid.integrate(np.ones(grid.size), vol)
    return {
        "laplacian_identity_dev": float(np.max(np.abs(lap - 2 * (n - 1) * c2))),
        "laplacian_integral": integral,
        "c2_from_integral": integral / (2 * (n - 1) * area),
        "c1_constancy_dev": float(np.max(np.abs(c1 - c1.mean()))),
    }


def _samples(dim: int, T: float, count: int, seed: int) -> np.ndarray:
    u = qmc.Halton(d=dim, scramble=True, seed=seed).random(count)
    return np.concatenate([T * u[:, :1], 2 * np.pi * u[:, 1:]], axis=1)


def reconstruct_and_verify(a: float, grad_norm: float, fiber: MetricField | None = None, T: float = 3.0,
                           samples: int = 64, seed: int = 0, tol: float = 1e-8) -> ReconstructedManifold:
    """Build ``dt^2 + xi^2 h`` with ``f = c1 e^t + c2 e^-t`` and verify it.

    Checks the Obata residual, the sectional curvature (flat fibers only)
    and the slice second fundamental form ``A = (xi'/xi) h``.
    """
    flat = fiber is None
    sol, prof = solve_warp_ode(a, grad_norm, fiber, 2.0 * T)
    T_use = min(T, 0.9 * prof.T)
    metric = warped_metric(prof, chart_id=f"obata-a{sol.a:g}-g{sol.grad_norm:g}")
    nn = metric.dim

    def f_field(x):
        return sol.f(x[0])

    pts = _samples(nn, T_use, samples, seed)
    residual = hessian_residual(metric, f_field, pts)
    report: dict = {"c1": sol.c1, "c2": sol.c2, "case": sol.case.value, "obata_residual": residual}
    if flat:
        # radial planes have curvature -xi''/xi = -1; fiber planes -(xi'/xi)^2,
        # which is -1 exactly when c1 c2 = 0
        rng = np.random.default_rng(seed)
        U, W = rng.normal(size=(2, samples, nn))
        U[:, 0] = W[:, 0] = 0.0
        radial = sectional_curvature(metric, pts, np.eye(nn)[0], U)
        fiber_k = sectional_curvature(metric, pts, U, W)
        xi, dxi = dual.derivative(sol.xi, pts[:, 0])
        report["sectional_dev"] = float(max(np.max(np.abs(radial + 1.0)),
                                            np.max(np.abs(fiber_k + (dxi / xi) ** 2))))
        report["constant_curvature"] = bool(sol.c1 * sol.c2 == 0.0)
    grid = TorusGrid(nn - 1, 8)
    shape_dev = 0.0
    for t in np.linspace(0.0, T_use, 5):
        surf = EmbeddedSurface(metric, lambda u, t=t: [t + 0.0 * u[0]] + list(u), lambda x: np.eye(nn)[0] + 0 * x,
                               Topology.TORUS, level=float(t))
        geo = second_fundamental_form(surf, grid.nodes)
        xi, dxi = dual.derivative(sol.xi, t)
        shape_dev = max(shape_dev, float(np.max(np.abs(geo.A - (dxi / xi) * geo.induced_h))))
    report["shape_operator_dev"] = shape_dev
    worst = max(float(v) for k, v in report.items() if k.endswith(("_residual", "_dev")))
    if worst > tol:
        raise ResidualExceeded(f"reconstruction check failed: {report}")
    return ReconstructedManifold(sol, prof, prof.fiber, metric, f_field, report)


def cap_residual(n: int = 3, R: float = 1.0, samples: int = 64, seed: int = 0) -> float:
    """Obata residual of ``f = cosh t`` on the hyperbolic cap."""
    from .catalog import sample_points

    entry = make_hyperbolic_cap(n, R)
    return hessian_residual(entry.metric, lambda x: dual.cosh(x[0]), sample_points(entry, samples, seed))


def jacobi_closed_form(R: float, r0: float) -> float:
    return float((np.exp(R) - np.exp(-R)) / (np.exp(r0) - np.exp(-r0)))


def jacobi_growth_check(R: float, r0: float, n: int = 3, start: float = 1e-6) -> float:
    """``|J|(R) / |J|(r0)`` for a normal Jacobi field along a radial cap geodesic.

    ``J'' = -K J`` is integrated from the pole (``J ~ t`` near it, started at
    ``t = start * R``) with ``K`` the sectional curvature of the cap metric
    on the radial plane, evaluated by the curvature pipeline at each step.
    """
    if not 0 < r0 <= R:
        raise InvalidParam("need 0 < r0 <= R")
    metric = make_hyperbolic_cap(n, R).metric
    angles = [np.pi / 2] * (n - 2) + [0.0]

    def K(t):
        p = np.array([t] + angles)
        Y = np.zeros(n)
        Y[1] = 1.0 / np.sinh(t)
        return float(sectional_curvature(metric, p, np.eye(n)[0], Y))

    t0 = start * R
    t_eval = np.unique([r0, R])
    out = solve_ivp(lambda t, y: [y[1], -K(t) * y[0]], (t0, R), [t0, 1.0], method="RK45",
                    t_eval=t_eval, rtol=1e-12, atol=1e-14)
    if out.status != 0:
        raise NumericalError(out.message)
    return float(abs(out.y[0, -1]) / abs(out.y[0, 0]))


def profile_rows(sol: ObataSolution, t: np.ndarray) -> tuple[list[str], np.ndarray]:
    t = np.asarray(t, dtype=float)
    return ["t", "xi", "f"], np.column_stack([t, sol.xi(t), sol.f(t)])
