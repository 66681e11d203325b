"""Closed two-sided hypersurfaces: A, H, the null second fundamental form
chi = K|_TS + A, the null expansion theta and trapping classification.

Sign convention: ``A(X, Y) = <nabla_X nu, Y>`` for the chosen unit normal
``nu``, so ``H = div nu``.  For a boundary the normal points into the
manifold; a round sphere of radius r in flat space has ``H = 2/r`` for the
normal pointing away from the centre and ``H = -2/r`` for the other one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Any, Callable, Sequence

import numpy as np

from . import dual
from .diffgeo import MetricField, christoffel_at, pullback
from .errors import DomainError, RankDeficientImmersion
from .initial_data import InitialDataSet


class Topology(enum.Enum):
    TORUS = "torus"
    SPHERE = "sphere"


class NormalChoice(enum.Enum):
    INTO_MANIFOLD = "into_manifold"
    USER_VECTOR = "user_vector"


class Trapping(enum.Enum):
    OUTER_TRAPPED = "outer_trapped"
    WEAKLY_OUTER_TRAPPED = "weakly_outer_trapped"
    MOTS = "mots"
    UNTRAPPED = "untrapped"


@dataclass(frozen=True)
class EmbeddedSurface:
    """An immersed closed hypersurface in a chart.

    ``immersion`` maps ``n-1`` fiber coordinates to ``n`` chart coordinates
    and must be dual-compatible.  ``orientation`` returns, for chart points
    ``(..., n)``, a transverse vector on the side the unit normal should
    point to.  Torus fibers use ``[0, 2pi)^(n-1)``; sphere fibers use
    hyperspherical angles (polar angles in (0, pi), last angle in [0, 2pi)).
    """

    ambient: MetricField
    immersion: Callable[[Sequence[Any]], list]
    orientation: Callable[[np.ndarray], np.ndarray]
    topology: Topology
    normal_choice: NormalChoice = NormalChoice.INTO_MANIFOLD
    level: float | None = None
    label: str = ""

    @property
    def dim(self) -> int:
        return self.ambient.dim - 1

    def reversed(self) -> "EmbeddedSurface":
        o = self.orientation
        return replace(self, orientation=lambda x: -o(x), normal_choice=NormalChoice.USER_VECTOR)

    def fiber_grid(self, resolution: int | None = None) -> tuple[np.ndarray, tuple[int, ...]]:
        return fiber_grid(self.topology, self.dim, resolution)

    def induced_metric(self) -> MetricField:
        return pullback(self.ambient, self.immersion, self.dim, chart_id=f"{self.label or 'surface'}-induced")


def fiber_grid(topology: Topology, dim: int, resolution: int | None = None):
    """Deterministic sample nodes ``(B, dim)`` and the grid shape.

    Tori: ``N`` points per axis (default 32).  Spheres: ``N`` polar samples
    per polar angle (poles excluded, default 32 on S^2 and 8 above) and
    ``2N`` azimuthal samples.
    """
    if topology is Topology.TORUS:
        N = resolution or 32
        axes = [2 * np.pi * np.arange(N) / N] * dim
    else:
        N = resolution or (32 if dim == 2 else 8)
        polar = np.pi * (np.arange(N) + 0.5) / N
        axes = [polar] * (dim - 1) + [2 * np.pi * np.arange(2 * N) / (2 * N)]
    mesh = np.meshgrid(*axes, indexing="ij")
    shape = mesh[0].shape
    return np.stack([m.reshape(-1) for m in mesh], axis=-1), shape


@dataclass(frozen=True)
class SurfaceGeometry:
    fiber: np.ndarray
    points: np.ndarray
    tangents: np.ndarray  # (..., n, n-1), columns d_A x
    normal: np.ndarray  # (..., n)
    g: np.ndarray
    induced_h: np.ndarray
    h_inv: np.ndarray
    A: np.ndarray
    H: np.ndarray
    K_tan: np.ndarray | None = None
    chi: np.ndarray | None = None
    theta: np.ndarray | None = None
    X_flat: np.ndarray | None = None  # K(nu, e_A)
    K_nn: np.ndarray | None = None
    tr_K: np.ndarray | None = None

    def chi_norm_sq(self) -> np.ndarray:
        hi = self.h_inv
        return np.einsum("...ac,...bd,...ab,...cd->...", hi, hi, self.chi, self.chi)


def frame_geometry(ambient: MetricField, fiber, x, E, nu, A, ids: InitialDataSet | None = None,
                   g: np.ndarray | None = None) -> SurfaceGeometry:
    """Assemble induced quantities from a tangent frame, unit normal and A."""
    if g is None:
        from .diffgeo import eval_metric
        g = eval_metric(ambient, x).g
    h = np.einsum("...ia,...ij,...jb->...ab", E, g, E)
    h = 0.5 * (h + np.swapaxes(h, -1, -2))
    hi = np.linalg.inv(h)
    A = 0.5 * (A + np.swapaxes(A, -1, -2))
    H = np.einsum("...ab,...ab->...", hi, A)
    geo = SurfaceGeometry(fiber, x, E, nu, g, h, hi, A, H)
    if ids is None:
        return geo
    K = ids.k_at(x)
    Kt = np.einsum("...ia,...ij,...jb->...ab", E, K, E)
    chi = Kt + A
    theta = np.einsum("...ab,...ab->...", hi, chi)
    X_flat = np.einsum("...i,...ij,...ja->...a", nu, K, E)
    K_nn = np.einsum("...i,...ij,...j->...", nu, K, nu)
    trK = np.einsum("...ij,...ij->...", np.linalg.inv(g), K)
    return replace(geo, K_tan=Kt, chi=chi, theta=theta, X_flat=X_flat, K_nn=K_nn, tr_K=trK)


def second_fundamental_form(s: EmbeddedSurface, q, ids: InitialDataSet | None = None) -> SurfaceGeometry:
    """Induced metric h, second fundamental form A and H at fiber points q."""
    q = np.asarray(q, dtype=float)
    x, dx, ddx = dual.jet(s.immersion, q, order=2)
    ev, G = christoffel_at(s.ambient, x)
    g = ev.g
    E = np.swapaxes(dx, -1, -2)  # (..., n, d)
    h = np.einsum("...ia,...ij,...jb->...ab", E, g, E)
    d = s.dim
    scale = np.max(np.abs(h), axis=(-1, -2)) ** d
    if np.any(np.abs(np.linalg.det(h)) <= 1e-14 * np.maximum(scale, 1e-300)):
        raise RankDeficientImmersion(f"immersion {s.label!r} is singular at a sample")
    v = np.asarray(s.orientation(x), dtype=float)
    v = np.broadcast_to(v, x.shape)
    # remove the g-tangential part of v
    coef = np.linalg.solve(h, np.einsum("...ia,...ij,...j->...a", E, g, v)[..., None])[..., 0]
    vp = v - np.einsum("...ia,...a->...i", E, coef)
    nrm = np.sqrt(np.einsum("...i,...ij,...j->...", vp, g, vp))
    if np.any(nrm < 1e-12):
        raise DomainError("orientation vector is tangent to the surface")
    nu = vp / nrm[..., None]
    # A_AB = -<nu, nabla_A e_B>
    acc = np.moveaxis(ddx, -1, -3) + np.einsum("...lij,...ia,...jb->...lab", G, E, E)
    A = -np.einsum("...k,...kl,...lab->...ab", nu, g, acc)
    return frame_geometry(s.ambient, q, x, E, nu, A, ids, g=g)


def null_expansion(s: EmbeddedSurface, ids: InitialDataSet, q) -> SurfaceGeometry:
    """chi = K|_TS + A and theta = tr_h chi at fiber points q."""
    return second_fundamental_form(s, q, ids)


def classify(s: EmbeddedSurface, ids: InitialDataSet, resolution: int | None = None,
             tol: float = 1e-7) -> Trapping:
    q, _ = s.fiber_grid(resolution)
    theta = null_expansion(s, ids, q).theta
    hi, lo = float(np.max(theta)), float(np.min(theta))
    if max(abs(hi), abs(lo)) < tol:
        return Trapping.MOTS
    if hi < -tol:
        return Trapping.OUTER_TRAPPED
    if hi <= tol and lo < -tol:
        return Trapping.WEAKLY_OUTER_TRAPPED
    return Trapping.UNTRAPPED
