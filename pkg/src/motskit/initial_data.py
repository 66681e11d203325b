"""Initial data sets (M, g, K), the constraint densities and the DEC."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import dual
from .diffgeo import (
    Components,
    MetricField,
    as_coords,
    check_domain,
    christoffel,
    curvature_from_jets,
    metric_jet,
)
from .errors import InvalidParam, NonFiniteDerivative


class DataTag(enum.Enum):
    TIME_SYMMETRIC = "K=0"
    UMBILIC_MINUS = "K=-eps*g"
    UMBILIC_PLUS = "K=+eps*g"
    GENERAL = "general"


@dataclass(frozen=True)
class InitialDataSet:
    """``k_tensor`` follows the same calling convention as metric components."""

    metric: MetricField
    k_tensor: Components
    tag: DataTag = DataTag.GENERAL
    umbilic_factor: float | None = None  # c when K = c*g

    def k_at(self, p) -> np.ndarray:
        x = as_coords(p)
        (k,) = dual.jet(self.k_tensor, x, order=0)
        return k


@dataclass(frozen=True)
class ConstraintValues:
    mu: np.ndarray
    j_vec: np.ndarray
    j_norm: np.ndarray
    point: np.ndarray


@dataclass(frozen=True)
class DecReport:
    holds: bool
    margin: float
    worst_point: np.ndarray
    tol: float
    samples: int


def _zero_k(n: int):
    def k(x):
        return [[0.0] * n for _ in range(n)]
    return k


def time_symmetric(metric: MetricField) -> InitialDataSet:
    return InitialDataSet(metric, _zero_k(metric.dim), DataTag.TIME_SYMMETRIC, 0.0)


def make_umbilic_data(metric: MetricField, eps: float, sign: int = -1) -> InitialDataSet:
    """``K = sign * eps * g``; ``sign=-1`` is the data used for the expanding warp."""
    if sign not in (-1, 1):
        raise InvalidParam("sign must be -1 or +1")
    c = float(sign * eps)
    if c == 0.0:
        return time_symmetric(metric)

    def k(x):
        g = metric.components(x)
        return [[c * gij for gij in row] for row in g]

    tag = DataTag.UMBILIC_MINUS if sign < 0 else DataTag.UMBILIC_PLUS
    return InitialDataSet(metric, k, tag, c)


def constraints(ids: InitialDataSet, p) -> ConstraintValues:
    """Energy density ``mu = (S + (tr K)^2 - |K|^2)/2`` and momentum
    density ``J = div K - d(tr K)``, both from the initial data alone."""
    x = as_coords(p)
    check_domain(ids.metric, x)
    ev, dg, ddg = metric_jet(ids.metric, x, order=2)
    S = curvature_from_jets(ev.g, dg, ddg).scalar
    K, dK = dual.jet(ids.k_tensor, x, order=1)
    if not (np.all(np.isfinite(K)) and np.all(np.isfinite(dK))):
        raise NonFiniteDerivative("non-finite K or dK")
    gi = ev.ginv
    trK = np.einsum("...ij,...ij->...", gi, K)
    Kup = np.einsum("...ia,...jb,...ab->...ij", gi, gi, K)
    K2 = np.einsum("...ij,...ij->...", Kup, K)
    mu = 0.5 * (S + trK**2 - K2)

    G = christoffel(gi, dg)
    # nabla_k K_ji = d_k K_ji - G^l_kj K_li - G^l_ki K_jl
    nablaK = dK - np.einsum("...lkj,...li->...kji", G, K) - np.einsum("...lki,...jl->...kji", G, K)
    divK = np.einsum("...kj,...kji->...i", gi, nablaK)
    dtrK = (np.einsum("...jk,...ijk->...i", gi, dK)
            - np.einsum("...ja,...iab,...bk,...jk->...i", gi, dg, gi, K))
    J = divK - dtrK
    jn = np.sqrt(np.maximum(np.einsum("...i,...ij,...j->...", J, gi, J), 0.0))
    return ConstraintValues(mu, J, jn, x)


def dec_check(ids: InitialDataSet, points: Sequence | np.ndarray, tol: float = 1e-9) -> DecReport:
    pts = np.atleast_2d(as_coords(points))
    if pts.shape[0] == 0:
        raise InvalidParam("empty sample set")
    cv = constraints(ids, pts)
    slack = cv.mu - cv.j_norm
    i = int(np.argmin(slack))
    margin = float(slack[i])
    return DecReport(margin >= -tol, margin, pts[i], tol, len(pts))
