"""Metric fields on coordinate charts and their curvature.

Conventions
-----------
* ``dg[..., k, i, j] = d_k g_ij`` and ``ddg[..., k, l, i, j] = d_k d_l g_ij``.
* ``christoffel[..., k, i, j] = Gamma^k_ij``.
* ``riemann[..., l, k, i, j] = R^l_kij`` with
  ``R(d_i, d_j) d_k = R^l_kij d_l`` and
  ``R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``.
* ``Ric(Y, Z) = tr(X -> R(X, Y)Z)``, so ``Ric_jk = R^i_kij``; the round
  sphere has positive and hyperbolic space negative scalar curvature.

Every function accepts a single point of shape ``(n,)`` or a batch of shape
``(..., n)``; tensor indices always trail the batch axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import dual
from .errors import (
    DegenerateMetric,
    DegeneratePlane,
    DomainError,
    InvalidParam,
    NonFiniteDerivative,
)

Components = Callable[[Sequence[Any]], list]


@dataclass(frozen=True)
class ChartPoint:
    coords: np.ndarray
    chart_id: str = "chart"

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 1 or c.size < 2 or not np.all(np.isfinite(c)):
            raise InvalidParam(f"bad chart coordinates {self.coords!r}")
        object.__setattr__(self, "coords", c)


def _always(x: np.ndarray) -> np.ndarray:
    return np.all(np.isfinite(x), axis=-1)


@dataclass(frozen=True)
class MetricField:
    """A Riemannian metric on one chart.

    ``components`` receives a list of ``dim`` coordinates (floats, arrays or
    :class:`~motskit.dual.Dual` numbers) and must return ``dim x dim`` nested
    lists built only from arithmetic and the functions in :mod:`motskit.dual`,
    so that it can be differentiated exactly.  ``domain`` maps an array of
    points ``(..., dim)`` to a boolean array.
    """

    dim: int
    components: Components
    domain: Callable[[np.ndarray], np.ndarray] = _always
    chart_id: str = "chart"
    coord_names: tuple[str, ...] = field(default=())

    def __call__(self, p):
        return eval_metric(self, p).g


@dataclass(frozen=True)
class MetricEval:
    g: np.ndarray
    ginv: np.ndarray
    sqrt_det: np.ndarray


@dataclass(frozen=True)
class CurvatureBundle:
    point: np.ndarray
    g: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray

    def riemann_lowered(self) -> np.ndarray:
        """``R_lkij = g_lm R^m_kij``."""
        return np.einsum("...lm,...mkij->...lkij", self.g, self.riemann)


# -- small constructors -------------------------------------------------------
def diag(entries: Sequence[Any]) -> list:
    n = len(entries)
    return [[entries[i] if i == j else 0.0 for j in range(n)] for i in range(n)]


def flat_metric(dim: int, radii: Sequence[float] | None = None, chart_id: str = "flat") -> MetricField:
    """Constant diagonal metric ``sum radii_i^2 dx_i^2`` (identity by default)."""
    r = np.ones(dim) if radii is None else np.asarray(radii, dtype=float)
    if r.shape != (dim,) or np.any(r <= 0):
        raise InvalidParam("radii must be positive, one per axis")
    sq = [float(v * v) for v in r]

    def components(x):
        return diag(sq)

    return MetricField(dim, components, chart_id=chart_id)


def euclidean(dim: int) -> MetricField:
    return flat_metric(dim, chart_id="euclidean")


def pullback(metric: MetricField, phi: Callable[[Sequence[Any]], list], dim: int,
             domain: Callable[[np.ndarray], np.ndarray] | None = None,
             chart_id: str = "pullback") -> MetricField:
    """Metric ``phi^* g`` on the ``dim``-dimensional source of ``phi``.

    ``phi`` maps source coordinates to coordinates of ``metric``'s chart.  Its
    Jacobian is taken with a fresh dual tag, so the result is itself exactly
    differentiable.  With ``dim < metric.dim`` this is an induced metric.
    """

    def components(u):
        base = phi(u)
        gx = metric.components(base)
        cols = []
        for a in range(dim):
            t = dual.new_tag()
            ua = [dual.Dual(u[i], 1.0 if i == a else 0.0, t) for i in range(dim)]
            _, d = dual.split_tangent(phi(ua), t)
            cols.append(d)
        n = metric.dim
        gE = [[sum(gx[i][k] * cols[b][k] for k in range(n)) for b in range(dim)] for i in range(n)]
        return [[sum(cols[a][i] * gE[i][b] for i in range(n)) for b in range(dim)] for a in range(dim)]

    if domain is None:
        def domain(u):
            return metric.domain(_stack_coords(phi(_split_coords(u)))) & _always(u)

    return MetricField(dim, components, domain, chart_id)


def _split_coords(x: np.ndarray) -> list:
    return [x[..., i] for i in range(x.shape[-1])]


def _stack_coords(xs: Sequence[Any]) -> np.ndarray:
    arrs = np.broadcast_arrays(*[np.asarray(v, dtype=float) for v in xs])
    return np.stack(arrs, axis=-1)


# -- evaluation ---------------------------------------------------------------
def as_coords(p) -> np.ndarray:
    if isinstance(p, ChartPoint):
        return p.coords
    return np.asarray(p, dtype=float)


def check_domain(m: MetricField, x: np.ndarray) -> None:
    if x.shape[-1] != m.dim:
        raise DomainError(f"expected {m.dim} coordinates, got shape {x.shape}")
    ok = np.asarray(m.domain(x))
    if not np.all(ok):
        bad = x.reshape(-1, m.dim)[~ok.reshape(-1)][0]
        raise DomainError(f"point {bad} outside domain of {m.chart_id}")


def eval_metric(m: MetricField, p) -> MetricEval:
    x = as_coords(p)
    check_domain(m, x)
    (g,) = dual.jet(m.components, x, order=0)
    return _factor(g)


def _factor(g: np.ndarray) -> MetricEval:
    if not np.all(np.isfinite(g)):
        raise DegenerateMetric("non-finite metric components")
    try:
        chol = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise DegenerateMetric("metric is not positive definite") from exc
    ginv = np.linalg.inv(g)
    ginv = 0.5 * (ginv + np.swapaxes(ginv, -1, -2))
    sqrt_det = np.prod(np.diagonal(chol, axis1=-2, axis2=-1), axis=-1)
    return MetricEval(np.array(g), ginv, sqrt_det)


def metric_jet(m: MetricField, p, order: int = 2, check: bool = True):
    """``(MetricEval, dg[, ddg])`` at ``p`` by nested dual numbers."""
    x = as_coords(p)
    if check:
        check_domain(m, x)
    parts = dual.jet(m.components, x, order=order)
    for arr in parts:
        if not np.all(np.isfinite(arr)):
            raise NonFiniteDerivative(f"non-finite derivative of {m.chart_id} metric")
    return (_factor(parts[0]), *parts[1:])


# -- curvature assembly -------------------------------------------------------
def christoffel(ginv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    # T_lij = d_i g_lj + d_j g_il - d_l g_ij
    T = np.einsum("...ilj->...lij", dg) + np.einsum("...jil->...lij", dg) - dg
    return 0.5 * np.einsum("...kl,...lij->...kij", ginv, T)


def christoffel_derivative(ginv: np.ndarray, dg: np.ndarray, ddg: np.ndarray) -> np.ndarray:
    """``dG[..., m, k, i, j] = d_m Gamma^k_ij``."""
    T = np.einsum("...ilj->...lij", dg) + np.einsum("...jil->...lij", dg) - dg
    dT = (np.einsum("...milj->...mlij", ddg) + np.einsum("...mjil->...mlij", ddg) - ddg)
    dginv = -np.einsum("...ka,...mab,...bl->...mkl", ginv, dg, ginv)
    return 0.5 * (np.einsum("...mkl,...lij->...mkij", dginv, T)
                  + np.einsum("...kl,...mlij->...mkij", ginv, dT))


def riemann(G: np.ndarray, dG: np.ndarray) -> np.ndarray:
    """``R^l_kij = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik``."""
    term = np.einsum("...iljk->...lkij", dG)
    quad = np.einsum("...lim,...mjk->...lkij", G, G)
    R = term - np.swapaxes(term, -1, -2) + quad - np.swapaxes(quad, -1, -2)
    return R


def curvature_from_jets(g: np.ndarray, dg: np.ndarray, ddg: np.ndarray, point=None) -> CurvatureBundle:
    ginv = np.linalg.inv(g)
    G = christoffel(ginv, dg)
    dG = christoffel_derivative(ginv, dg, ddg)
    R = riemann(G, dG)
    ric = np.einsum("...akab->...bk", R)
    ric = 0.5 * (ric + np.swapaxes(ric, -1, -2))
    S = np.einsum("...jk,...jk->...", ginv, ric)
    return CurvatureBundle(point, g, G, R, ric, S)


def curvature(m: MetricField, p) -> CurvatureBundle:
    """Christoffel symbols, Riemann, Ricci and scalar curvature at ``p``."""
    x = as_coords(p)
    ev, dg, ddg = metric_jet(m, x, order=2)
    return curvature_from_jets(ev.g, dg, ddg, point=x)


def scalar_curvature(m: MetricField, p) -> np.ndarray:
    return curvature(m, p).scalar


def christoffel_at(m: MetricField, p) -> tuple[MetricEval, np.ndarray]:
    ev, dg = metric_jet(m, p, order=1)
    return ev, christoffel(ev.ginv, dg)


def sectional_curvature(m: MetricField, p, X, Y) -> np.ndarray:
    """``<R(X,Y)Y, X> / (|X|^2 |Y|^2 - <X,Y>^2)``."""
    cb = curvature(m, p)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    g = cb.g
    gram = (np.einsum("...i,...ij,...j->...", X, g, X) * np.einsum("...i,...ij,...j->...", Y, g, Y)
            - np.einsum("...i,...ij,...j->...", X, g, Y) ** 2)
    if np.any(np.abs(gram) < 1e-12):
        raise DegeneratePlane("tangent vectors span a degenerate plane")
    # R(X,Y)Y = X^i Y^j Y^k R^l_kij d_l
    num = np.einsum("...lkij,...i,...j,...k,...lm,...m->...", cb.riemann, X, Y, Y, g, X)
    return num / gram


def covariant_hessian(m: MetricField, f: Callable[[Sequence[Any]], Any], p):
    """``(f, grad f, nabla^2 f)`` of a dual-compatible scalar function."""
    x = as_coords(p)
    ev, G = christoffel_at(m, x)
    f0, df, ddf = dual.jet(lambda xs: f(xs), x, order=2)
    hess = ddf - np.einsum("...kij,...k->...ij", G, df)
    return f0, df, hess, ev


# -- finite-difference oracle --------------------------------------------------
_FD4 = ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0))


def _fd_christoffel(m: MetricField, x: np.ndarray, step: float) -> np.ndarray:
    n = m.dim
    offsets = []
    for k in range(n):
        for s, _ in _FD4:
            e = np.zeros(n)
            e[k] = s * step
            offsets.append(e)
    pts = x[..., None, :] + np.stack(offsets)
    check_domain(m, pts)
    (gs,) = dual.jet(m.components, pts, order=0)
    gs = gs.reshape(x.shape[:-1] + (n, len(_FD4), n, n))
    w = np.array([c for _, c in _FD4])
    dg = np.einsum("...ksij,s->...kij", gs, w) / step
    (g,) = dual.jet(m.components, x, order=0)
    return christoffel(np.linalg.inv(g), dg)


def fd_curvature_oracle(m: MetricField, p, step: float = 5e-4) -> CurvatureBundle:
    """Curvature by fourth-order central differences.

    Christoffel symbols come from differenced metric values, and their
    derivatives from differencing those Christoffel symbols, so this route
    shares nothing with the dual-number path except the algebraic Riemann
    formula.  Intended as a test oracle.
    """
    if step <= 0:
        raise InvalidParam("step must be positive")
    x = as_coords(p)
    check_domain(m, x)
    n = m.dim
    G = _fd_christoffel(m, x, step)
    dG = np.zeros(x.shape[:-1] + (n, n, n, n))
    for k in range(n):
        for s, c in _FD4:
            e = np.zeros(n)
            e[k] = s * step
            dG[..., k, :, :, :] += c * _fd_christoffel(m, x + e, step)
    dG /= step
    (g,) = dual.jet(m.components, x, order=0)
    R = riemann(G, dG)
    ric = np.einsum("...akab->...bk", R)
    S = np.einsum("...jk,...jk->...", np.linalg.inv(g), ric)
    return CurvatureBundle(x, g, G, R, ric, S)
