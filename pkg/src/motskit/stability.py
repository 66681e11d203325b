"""The MOTS stability operator on flat-torus fibers and its principal eigenpair.

For a surface with unit normal ``nu`` in initial data ``(M, g, K)``::

    L phi = -Lap phi + 2 <X, grad phi> + P phi
    P     = S_sigma/2 - (mu + J(nu)) - |chi|^2/2 + div X - |X|^2

where ``X`` is the surface vector field dual to ``K(nu, .)``.  The operator is
discretized on the ``N^(n-1)`` fiber grid: Fourier collocation when the
induced metric has constant coefficients, fourth-order differences otherwise
(unless a method is forced).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .diffgeo import curvature, curvature_from_jets
from .errors import ComplexPrincipal, NonPositiveEigenfunction, UnsupportedTopology
from .hypersurface import EmbeddedSurface, SurfaceGeometry, Topology, null_expansion
from .initial_data import InitialDataSet, constraints
from .torus import TorusGrid, is_constant


@dataclass(frozen=True)
class StabilityAssembly:
    """Sampled coefficients and the dense operator matrix.

    All fields are per-node arrays in grid order; ``X`` is the contravariant
    drift ``h^AB K(nu, e_B)``.
    """

    grid: TorusGrid
    h: np.ndarray
    X: np.ndarray
    P: np.ndarray
    div_X: np.ndarray
    X_sq: np.ndarray
    operator: np.ndarray = field(repr=False)
    laplacian: np.ndarray = field(repr=False)
    theta: np.ndarray | None = None
    tr_K: np.ndarray | None = None
    Q: np.ndarray | None = None
    S_sigma: np.ndarray | None = None
    energy_flux: np.ndarray | None = None  # mu + J(nu)
    chi_sq: np.ndarray | None = None

    @property
    def discretization_order(self) -> str:
        return self.grid.method


@dataclass(frozen=True)
class PrincipalEig:
    lambda1: float
    eigenfunction: np.ndarray
    residual: float
    imag_part: float
    spectrum: np.ndarray = field(repr=False)

    def stable(self, tol: float = 1e-8) -> bool:
        return self.lambda1 >= -tol

    def to_dict(self, keep: int = 16) -> dict:
        """JSON-friendly summary with the ``keep`` lowest eigenvalues."""
        ev = self.spectrum[:keep]
        return {
            "lambda1": self.lambda1,
            "imag_part": self.imag_part,
            "residual": self.residual,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in ev],
        }


def _pick_method(h: np.ndarray, method: str | None) -> str:
    if method is not None:
        return method
    return "spectral" if is_constant(h) else "fd4"


def grid_scalar_curvature(grid: TorusGrid, h: np.ndarray) -> np.ndarray:
    """Scalar curvature of a metric sampled on the grid (per node).

    Metric derivatives come from the grid differentiation matrices and are
    fed to the same Riemann assembly used for analytic jets.
    """
    if is_constant(h):
        return np.zeros(grid.size)
    d = grid.dim
    dh = np.stack([np.einsum("pq,qab->pab", grid.d1(k), h) for k in range(d)], axis=1)
    ddh = np.stack([np.stack([np.einsum("pq,qab->pab", grid.d2(k, l), h) for l in range(d)], axis=1)
                    for k in range(d)], axis=1)
    return curvature_from_jets(h, dh, ddh).scalar


def operator_from_coefficients(grid: TorusGrid, h: np.ndarray, X: np.ndarray | None = None,
                               P: np.ndarray | float = 0.0) -> StabilityAssembly:
    """Assemble ``-Lap_h + 2<X, grad> + P`` from prescribed coefficients.

    ``h`` is ``(d, d)`` or per-node ``(size, d, d)``; ``X`` is per-node
    contravariant ``(size, d)`` or a constant ``(d,)``; ``P`` scalar or per-node.
    """
    d, size = grid.dim, grid.size
    h = np.asarray(h, dtype=float)
    hn = np.broadcast_to(h, (size, d, d)) if h.ndim == 2 else h
    X = np.zeros((size, d)) if X is None else np.broadcast_to(np.asarray(X, dtype=float), (size, d))
    P = np.broadcast_to(np.asarray(P, dtype=float), (size,)).copy()
    lap = grid.laplacian(h)
    op = -lap + np.diag(P)
    for a in range(d):
        if np.any(X[:, a] != 0.0):
            op += 2.0 * X[:, a][:, None] * grid.d1(a)
    vol = np.sqrt(np.linalg.det(hn))
    div_X = sum(grid.d1(a) @ (vol * X[:, a]) for a in range(d)) / vol
    X_sq = np.einsum("pa,pab,pb->p", X, hn, X)
    return StabilityAssembly(grid, hn, X, P, div_X, X_sq, op, lap)


def assemble_from_geometry(grid: TorusGrid, geo: SurfaceGeometry, ids: InitialDataSet,
                           S_sigma: np.ndarray | None = None) -> StabilityAssembly:
    """Stability operator of a sampled surface (nodes in grid order)."""
    h = geo.induced_h
    if S_sigma is None:
        S_sigma = grid_scalar_curvature(grid, h)
    X = np.einsum("pab,pb->pa", geo.h_inv, geo.X_flat)
    cv = constraints(ids, geo.points)
    flux = cv.mu + np.einsum("pi,pi->p", cv.j_vec, geo.normal)
    chi_sq = geo.chi_norm_sq()
    Q = 0.5 * S_sigma - flux - 0.5 * chi_sq
    base = operator_from_coefficients(grid, h if not is_constant(h) else h[0], X, 0.0)
    P = Q + base.div_X - base.X_sq
    op = base.operator + np.diag(P)
    return StabilityAssembly(grid, base.h, X, P, base.div_X, base.X_sq, op, base.laplacian,
                             theta=geo.theta, tr_K=geo.tr_K, Q=Q, S_sigma=np.asarray(S_sigma, dtype=float),
                             energy_flux=flux, chi_sq=chi_sq)


def assemble_L(surface: EmbeddedSurface, ids: InitialDataSet, N: int = 32,
               method: str | None = None) -> StabilityAssembly:
    """Discretize the stability operator of a torus-fiber surface."""
    if surface.topology is not Topology.TORUS:
        raise UnsupportedTopology("stability spectra are computed on torus fibers only")
    probe = TorusGrid(surface.dim, N)
    geo = null_expansion(surface, ids, probe.nodes)
    grid = TorusGrid(surface.dim, N, _pick_method(geo.induced_h, method))
    if is_constant(geo.induced_h):
        S_sigma = np.zeros(grid.size)
    else:
        S_sigma = curvature(surface.induced_metric(), grid.nodes).scalar
    return assemble_from_geometry(grid, geo, ids, S_sigma)


def _select(evals: np.ndarray, tie: float = 1e-10, imag_tol: float = 1e-8) -> int:
    lo = np.min(evals.real)
    cand = np.flatnonzero(evals.real <= lo + tie)
    best = cand[np.argmin(np.abs(evals[cand].imag))]
    if abs(evals[best].imag) >= imag_tol:
        raise ComplexPrincipal(f"eigenvalue with smallest real part is complex: {evals[best]}")
    return int(best)


def _positive_part(v: np.ndarray) -> np.ndarray:
    v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))
    v = v.real
    if v.mean() < 0:
        v = -v
    return v / np.max(np.abs(v))


def principal_eigenvalue(a: StabilityAssembly | np.ndarray, positivity_tol: float = 1e-8) -> PrincipalEig:
    """Eigenvalue of smallest real part, with a positive sup-normalized eigenfunction."""
    L = a.operator if isinstance(a, StabilityAssembly) else np.asarray(a, dtype=float)
    evals, vecs = scipy.linalg.eig(L)
    order = np.lexsort((np.abs(evals.imag), evals.real))
    evals, vecs = evals[order], vecs[:, order]
    i = _select(evals)
    lam = float(evals[i].real)
    phi = _positive_part(vecs[:, i])
    if phi.min() < -positivity_tol:
        raise NonPositiveEigenfunction(f"principal eigenfunction changes sign (min {phi.min():.3e})")
    residual = float(np.max(np.abs(L @ phi - lam * phi)))
    return PrincipalEig(lam, phi, residual, float(evals[i].imag), evals)


def evolution_rhs(a: StabilityAssembly, psi: np.ndarray) -> np.ndarray:
    """``d theta / dt`` for the normal variation with lapse ``psi``.

    ``-Lap psi + 2<X, grad psi> + (Q - theta^2/2 + theta tr K + div X - |X|^2) psi``
    with ``tr K`` the ambient trace.
    """
    if a.theta is None or a.tr_K is None:
        raise ValueError("assembly carries no slice data; build it with assemble_from_geometry")
    psi = np.broadcast_to(np.asarray(psi, dtype=float), (a.grid.size,))
    return a.operator @ psi + (-0.5 * a.theta**2 + a.theta * a.tr_K) * psi


def eigenfunction_rows(a: StabilityAssembly, eig: PrincipalEig) -> tuple[list[str], np.ndarray]:
    """Header and rows ``(x_1..x_d, phi)`` for CSV output."""
    header = [f"x{i + 1}" for i in range(a.grid.dim)] + ["phi"]
    return header, np.column_stack([a.grid.nodes, eig.eigenfunction])
