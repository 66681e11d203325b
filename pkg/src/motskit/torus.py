"""Differentiation matrices on the periodic grid ``[0, 2pi)^d``.

Two discretizations are offered: Fourier collocation ("spectral"), exact for
trigonometric polynomials below the Nyquist mode, and fourth-order central
differences ("fd4").  Multi-dimensional operators are Kronecker products in
C (row-major) node order, matching ``np.meshgrid(..., indexing="ij")``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidParam

METHODS = ("spectral", "fd4")


def spectral_d1(N: int) -> np.ndarray:
    """First-derivative Fourier collocation matrix (even ``N``)."""
    h = 2 * np.pi / N
    k = np.arange(N)
    diff = (k[:, None] - k[None, :]) % N
    with np.errstate(divide="ignore"):
        D = 0.5 * (-1.0) ** diff / np.tan(diff * h / 2)
    D[diff == 0] = 0.0
    return D


def spectral_d2(N: int) -> np.ndarray:
    """Second-derivative Fourier collocation matrix (even ``N``).

    Differs from ``spectral_d1 @ spectral_d1`` only in the Nyquist mode,
    which this version keeps (as ``-(N/2)^2``) instead of annihilating.
    """
    h = 2 * np.pi / N
    k = np.arange(N)
    diff = (k[:, None] - k[None, :]) % N
    with np.errstate(divide="ignore"):
        D = -0.5 * (-1.0) ** diff / np.sin(diff * h / 2) ** 2
    D[diff == 0] = -np.pi**2 / (3 * h * h) - 1.0 / 6.0
    return D


def _circulant(N: int, stencil: dict[int, float]) -> np.ndarray:
    D = np.zeros((N, N))
    rows = np.arange(N)
    for off, c in stencil.items():
        D[rows, (rows + off) % N] += c
    return D


def fd4_d1(N: int) -> np.ndarray:
    h = 2 * np.pi / N
    return _circulant(N, {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12}) / h


def fd4_d2(N: int) -> np.ndarray:
    h = 2 * np.pi / N
    return _circulant(N, {-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12}) / (h * h)


@dataclass(frozen=True)
class TorusGrid:
    """``N`` equispaced nodes per axis on ``[0, 2pi)^dim``."""

    dim: int
    N: int = 32
    method: str = "spectral"

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidParam("torus dimension must be positive")
        if self.N < 8 or self.N % 2:
            raise InvalidParam("grid size must be even and at least 8")
        if self.method not in METHODS:
            raise InvalidParam(f"method must be one of {METHODS}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.dim

    @property
    def size(self) -> int:
        return self.N**self.dim

    @property
    def spacing(self) -> float:
        return 2 * np.pi / self.N

    @cached_property
    def nodes(self) -> np.ndarray:
        """``(size, dim)`` node coordinates."""
        axis = self.spacing * np.arange(self.N)
        mesh = np.meshgrid(*([axis] * self.dim), indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)

    @cached_property
    def _d1(self) -> np.ndarray:
        return spectral_d1(self.N) if self.method == "spectral" else fd4_d1(self.N)

    @cached_property
    def _d2(self) -> np.ndarray:
        return spectral_d2(self.N) if self.method == "spectral" else fd4_d2(self.N)

    def _embed(self, mats: dict[int, np.ndarray]) -> np.ndarray:
        out = np.ones((1, 1))
        eye = np.eye(self.N)
        for a in range(self.dim):
            out = np.kron(out, mats.get(a, eye))
        return out

    def d1(self, a: int) -> np.ndarray:
        """Matrix of ``d/dx_a`` acting on flattened grid functions."""
        return self._embed({a: self._d1})

    def d2(self, a: int, b: int) -> np.ndarray:
        """Matrix of ``d^2/dx_a dx_b``."""
        if a == b:
            return self._embed({a: self._d2})
        return self._embed({a: self._d1, b: self._d1})

    def gradient(self, f: np.ndarray) -> np.ndarray:
        """``(size, dim)`` partial derivatives of a flattened grid function."""
        return np.stack([self.d1(a) @ f for a in range(self.dim)], axis=-1)

    def laplacian(self, h: np.ndarray, h_inv: np.ndarray | None = None) -> np.ndarray:
        """Laplace-Beltrami matrix of the metric ``h`` sampled at the nodes.

        ``h`` has shape ``(dim, dim)`` (constant) or ``(size, dim, dim)``.
        A constant metric gives ``h^AB d_A d_B``; otherwise the first-order
        term ``(1/sqrt|h|) d_A(sqrt|h| h^AB) d_B`` is added with the same
        differentiation matrices.
        """
        h = np.asarray(h, dtype=float)
        hi = np.linalg.inv(h) if h_inv is None else np.asarray(h_inv, dtype=float)
        d = self.dim
        if h.ndim == 2:
            L = np.zeros((self.size, self.size))
            for a in range(d):
                for b in range(d):
                    if hi[a, b] != 0.0:
                        L += hi[a, b] * self.d2(a, b)
            return L
        L = np.zeros((self.size, self.size))
        for a in range(d):
            for b in range(d):
                L += hi[:, a, b][:, None] * self.d2(a, b)
        vol = np.sqrt(np.linalg.det(h))
        for b in range(d):
            drift = sum(self.d1(a) @ (vol * hi[:, a, b]) for a in range(d)) / vol
            L += drift[:, None] * self.d1(b)
        return L

    def integrate(self, f: np.ndarray, vol: np.ndarray | float = 1.0) -> float:
        """Trapezoid (spectrally accurate) integral over the torus."""
        return float(np.sum(np.asarray(f) * vol) * self.spacing**self.dim)


def is_constant(field: np.ndarray, rtol: float = 1e-12) -> bool:
    """True when the leading-axis samples of ``field`` agree to ``rtol``."""
    field = np.asarray(field)
    scale = max(float(np.max(np.abs(field))), 1e-300)
    return bool(np.max(np.abs(field - field[:1])) <= rtol * scale)
