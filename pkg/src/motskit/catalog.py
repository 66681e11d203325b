"""Named model metrics with their analytic expectations.

Families
--------
``spatial_schwarzschild``  isotropic Cartesian chart, ``g = psi^(4/(n-2)) g_E``
``ads_schwarzschild``      areal hyperspherical chart ``(r, angles)``
``kottler``                toroidal chart ``(r, y_1..y_{n-1})``
``warped``                 ``dt^2 + e^(2 s t) h`` over a flat torus
``hyperbolic_cap``         ``dt^2 + sinh(t)^2 g_S`` in hyperspherical angles

Entries are addressed by strings such as ``"ads_schwarzschild:n=3,m=0.5"``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.stats import qmc

from . import dual
from .diffgeo import MetricField, diag, flat_metric, pullback
from .errors import InvalidParam, UnknownFamily
from .hypersurface import EmbeddedSurface, Topology

FAMILIES = ("spatial_schwarzschild", "ads_schwarzschild", "kottler", "warped", "hyperbolic_cap")
_ALIASES = {"toroidal_kottler": "kottler", "warped_product": "warped", "schwarzschild": "spatial_schwarzschild",
            "cap": "hyperbolic_cap"}


@dataclass(frozen=True)
class Expectation:
    quantity: str
    value: float
    provenance: str
    tol: float = 1e-8


@dataclass(frozen=True)
class BoundaryLocus:
    """Boundary ``{coordinate = value}`` (``coordinate`` names a chart function).

    ``regular`` is False when the chart degenerates there; boundary quantities
    are then extrapolated from ``value*(1 + 2^-k * offset)`` using the listed
    power-series exponents of the offset.
    """

    coordinate: str
    value: float
    regular: bool = True
    exponents: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0)
    offset: float = 2.0**-5


@dataclass(frozen=True)
class WarpedProfile:
    """Warp factor ``xi`` (dual-compatible) over ``[0, T)`` with a fiber metric."""

    xi: Callable[[Any], Any]
    fiber: MetricField
    sign: float
    T: float = np.inf

    def __call__(self, t):
        return self.xi(t)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: dict
    metric: MetricField
    boundary: BoundaryLocus
    expectations: tuple[Expectation, ...]
    fiber_topology: Topology
    sampler: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    level_surface: Callable[[float], EmbeddedSurface] = field(repr=False)
    alt_charts: tuple[tuple[MetricField, Callable[[np.ndarray], np.ndarray]], ...] = field(default=(), repr=False)
    profile: WarpedProfile | None = None
    level_range: tuple[float, float] = (0.0, 1.0)

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def spec(self) -> str:
        return format_spec(self.name, self.params)

    def boundary_surface(self) -> EmbeddedSurface:
        return self.level_surface(self.boundary.value)

    def expectation(self, quantity: str) -> Expectation:
        for e in self.expectations:
            if e.quantity == quantity:
                return e
        raise KeyError(quantity)


# -- hyperspherical helpers ----------------------------------------------------
def sphere_factors(angles: Sequence[Any]) -> list:
    """Diagonal of the unit round metric in hyperspherical angles."""
    out = [1.0]
    acc = 1.0
    for a in angles[:-1]:
        acc = acc * dual.sin(a) ** 2
        out.append(acc)
    return out


def sphere_embed(angles: Sequence[Any]) -> list:
    """Unit vector in R^(k+1) for k hyperspherical angles."""
    k = len(angles)
    out = []
    prod = 1.0
    for i in range(k - 1):
        out.append(prod * dual.cos(angles[i]))
        prod = prod * dual.sin(angles[i])
    out.append(prod * dual.cos(angles[-1]))
    out.append(prod * dual.sin(angles[-1]))
    return out


def sphere_angles(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`sphere_embed` for plain arrays (..., k+1)."""
    v = np.asarray(v, dtype=float)
    k = v.shape[-1] - 1
    angles = []
    for i in range(k - 1):
        tail = np.linalg.norm(v[..., i:], axis=-1)
        angles.append(np.arccos(np.clip(v[..., i] / tail, -1.0, 1.0)))
    angles.append(np.mod(np.arctan2(v[..., -1], v[..., -2]), 2 * np.pi))
    return np.stack(angles, axis=-1)


def _radius(x: Sequence[Any]):
    s = x[0] * x[0]
    for xi in x[1:]:
        s = s + xi * xi
    return dual.sqrt(s)


def _angles_ok(a: np.ndarray) -> np.ndarray:
    if a.shape[-1] <= 1:
        return np.ones(a.shape[:-1], dtype=bool)
    polar = a[..., :-1]
    return np.all((polar > 0) & (polar < np.pi), axis=-1)


def _angle_sampler(u: np.ndarray, margin: float = 0.2) -> np.ndarray:
    polar = margin + (np.pi - 2 * margin) * u[..., :-1]
    az = 2 * np.pi * u[..., -1:]
    return np.concatenate([polar, az], axis=-1)


def _check_n(n) -> int:
    if int(n) != n or n < 3:
        raise InvalidParam(f"dimension n must be an integer >= 3, got {n}")
    return int(n)


def _check_m(m) -> float:
    if not m > 0:
        raise InvalidParam(f"mass m must be positive, got {m}")
    return float(m)


def _outward(index: int, sign: float = 1.0):
    def orient(x):
        v = np.zeros_like(np.asarray(x, dtype=float))
        v[..., index] = sign
        return v
    return orient


def _coordinate_level(metric, index, topology, label):
    """Level sets ``{x_index = c}`` with fiber = remaining coordinates."""

    def make(c: float) -> EmbeddedSurface:
        def imm(u):
            out = list(u)
            out.insert(index, c + 0.0 * u[0])
            return out

        return EmbeddedSurface(metric, imm, _outward(index), topology, level=float(c), label=f"{label}@{c:g}")

    return make


# -- families ------------------------------------------------------------------
def make_spatial_schwarzschild(n: int = 3, m: float = 1.0) -> CatalogEntry:
    n, m = _check_n(n), _check_m(m)
    p = 4.0 / (n - 2)
    r_h = (m / 2.0) ** (1.0 / (n - 2))

    def components(x):
        r = _radius(x)
        psi = 1.0 + m / (2.0 * r ** (n - 2))
        c = psi**p
        return diag([c] * n)

    def domain(x):
        r = np.linalg.norm(x, axis=-1)
        return np.all(np.isfinite(x), axis=-1) & (r >= r_h * (1 - 1e-12))

    metric = MetricField(n, components, domain, f"schwarzschild-isotropic-n{n}",
                         tuple(f"x{i}" for i in range(n)))

    def level(c: float) -> EmbeddedSurface:
        def imm(u):
            return [c * e for e in sphere_embed(u)]

        def orient(x):
            return np.asarray(x, dtype=float)

        return EmbeddedSurface(metric, imm, orient, Topology.SPHERE, level=float(c), label=f"sphere@{c:g}")

    def sampler(u):
        r = r_h * (1.05 + 3.0 * u[..., 0])
        return r[..., None] * np.stack(sphere_embed(list(np.moveaxis(_angle_sampler(u[..., 1:]), -1, 0))), axis=-1)

    def to_polar(x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        return np.concatenate([r[..., None], sphere_angles(x / r[..., None])], axis=-1)

    def polar_phi(v):
        r = v[0]
        return [r * e for e in sphere_embed(v[1:])]

    polar = pullback(metric, polar_phi, n,
                     domain=lambda v: (v[..., 0] >= r_h * (1 - 1e-12)) & _angles_ok(v[..., 1:]),
                     chart_id=f"schwarzschild-polar-n{n}")

    return CatalogEntry(
        "spatial_schwarzschild", {"n": n, "m": m}, metric,
        BoundaryLocus("r", r_h),
        (Expectation("scalar_curvature", 0.0, "analytic: vacuum (zero scalar curvature) metric"),
         Expectation("boundary_mean_curvature", 0.0, "analytic: minimal horizon", 1e-6),
         Expectation("boundary_theta_K0", 0.0, "analytic: theta = H for K = 0", 1e-6)),
        Topology.SPHERE, sampler, level, ((polar, to_polar),),
        level_range=(r_h, 4 * r_h),
    )


def make_ads_schwarzschild(n: int = 3, m: float = 0.5) -> CatalogEntry:
    n, m = _check_n(n), _check_m(m)
    r_m = (2.0 * m) ** (1.0 / (n - 2))

    def V(r):
        return 1.0 + r * r - 2.0 * m / r ** (n - 2)

    def components(x):
        r = x[0]
        return diag([1.0 / V(r)] + [r * r * f for f in sphere_factors(x[1:])])

    def domain(x):
        return (x[..., 0] >= r_m * (1 - 1e-12)) & _angles_ok(x[..., 1:]) & np.all(np.isfinite(x), axis=-1)

    metric = MetricField(n, components, domain, f"ads-schwarzschild-areal-n{n}",
                         ("r",) + tuple(f"a{i}" for i in range(1, n)))

    def cart_components(x):
        r = _radius(x)
        f = (1.0 / V(r) - 1.0) / (r * r)
        return [[(1.0 if i == j else 0.0) + f * x[i] * x[j] for j in range(n)] for i in range(n)]

    cart = MetricField(n, cart_components,
                       lambda x: np.linalg.norm(x, axis=-1) >= r_m * (1 - 1e-12),
                       f"ads-schwarzschild-cartesian-n{n}")

    def to_cart(v):
        v = np.asarray(v, dtype=float)
        return v[..., :1] * np.stack(sphere_embed(list(np.moveaxis(v[..., 1:], -1, 0))), axis=-1)

    def sampler(u):
        r = r_m * (1.05 + 3.0 * u[..., 0])
        return np.concatenate([r[..., None], _angle_sampler(u[..., 1:])], axis=-1)

    return CatalogEntry(
        "ads_schwarzschild", {"n": n, "m": m}, metric,
        BoundaryLocus("r", r_m),
        (Expectation("scalar_curvature", -float(n * (n - 1)), "analytic: constant scalar curvature -n(n-1)"),
         Expectation("boundary_mean_curvature", float(n - 1), "analytic: V(r_m) = r_m^2", 1e-6),
         Expectation("boundary_theta_KminusG", 0.0, "derived: theta = -(n-1) + H", 1e-6)),
        Topology.SPHERE, sampler, _coordinate_level(metric, 0, Topology.SPHERE, "areal-sphere"),
        ((cart, to_cart),), level_range=(r_m, 3.0),
    )


def make_toroidal_kottler(n: int = 3, m: float = 0.5, radii: Sequence[float] | None = None) -> CatalogEntry:
    n, m = _check_n(n), _check_m(m)
    r0 = (2.0 * m) ** (1.0 / n)
    rad = np.ones(n - 1) if radii is None else np.asarray(radii, dtype=float)
    if rad.shape != (n - 1,) or np.any(rad <= 0):
        raise InvalidParam("torus radii must be positive, one per fiber axis")
    sq = [float(v * v) for v in rad]

    def V(r):
        return r * r - 2.0 * m / r ** (n - 2)

    def components(x):
        r = x[0]
        return diag([1.0 / V(r)] + [r * r * s for s in sq])

    def domain(x):
        return (x[..., 0] > r0) & np.all(np.isfinite(x), axis=-1)

    metric = MetricField(n, components, domain, f"kottler-toroidal-n{n}",
                         ("r",) + tuple(f"y{i}" for i in range(1, n)))

    def log_phi(v):
        return [dual.exp(v[0])] + list(v[1:])

    logchart = pullback(metric, log_phi, n, domain=lambda v: np.exp(v[..., 0]) > r0,
                        chart_id=f"kottler-log-n{n}")

    def to_log(x):
        x = np.array(x, dtype=float)
        x[..., 0] = np.log(x[..., 0])
        return x

    def sampler(u):
        r = r0 * 1.05 + (3.0 - r0 * 1.05) * u[..., 0]
        return np.concatenate([r[..., None], 2 * np.pi * u[..., 1:]], axis=-1)

    return CatalogEntry(
        "kottler", {"n": n, "m": m}, metric,
        BoundaryLocus("r", r0, regular=False, exponents=(0.5, 1.5, 2.5, 3.5)),
        (Expectation("scalar_curvature", -float(n * (n - 1)), "analytic: constant scalar curvature -n(n-1)"),
         Expectation("boundary_mean_curvature", 0.0, "derived: H(r) = (n-1)sqrt(V)/r -> 0", 1e-5),
         Expectation("slice_theta_sign_KminusG", -1.0, "derived: theta(r) = (n-1)(sqrt(1-2m/r^n) - 1) < 0")),
        Topology.TORUS, sampler, _coordinate_level(metric, 0, Topology.TORUS, "r-torus"),
        ((logchart, to_log),), level_range=(r0, 3.0),
    )


def make_warped_product(fiber: MetricField | None = None, sign: float = 1.0, T: float = 4.0,
                        n: int = 3) -> CatalogEntry:
    """``dt^2 + e^(2 sign t) h`` on ``[0, T) x fiber``; flat unit torus by default."""
    flat = fiber is None
    if flat:
        fiber = flat_metric(_check_n(n) - 1, chart_id="flat-torus")
    if fiber.dim < 2:
        raise InvalidParam("fiber dimension must be at least 2")
    if not T > 0:
        raise InvalidParam("T must be positive")
    s = float(sign)
    d = fiber.dim
    nn = d + 1

    def xi(t):
        return dual.exp(s * t)

    profile = WarpedProfile(xi, fiber, s, T)
    metric = warped_metric(profile, chart_id=f"warped-s{s:g}-n{nn}")

    def sinh_phi(v):
        return [dual.sinh(v[0])] + list(v[1:])

    alt = pullback(metric, sinh_phi, nn, domain=lambda v: (np.sinh(v[..., 0]) >= -1e-12) & (np.sinh(v[..., 0]) < T),
                   chart_id="warped-sinh")

    def to_alt(x):
        x = np.array(x, dtype=float)
        x[..., 0] = np.arcsinh(x[..., 0])
        return x

    def sampler(u):
        t = 0.05 * T + 0.5 * T * u[..., 0]
        return np.concatenate([t[..., None], 2 * np.pi * u[..., 1:]], axis=-1)

    exps = [Expectation("boundary_mean_curvature", s * d, "derived: A_t = sign * h_t", 1e-8)]
    if flat:
        exps.append(Expectation("scalar_curvature", -float(nn * (nn - 1)) * s * s,
                                "analytic: flat fiber gives constant curvature -sign^2"))
    if flat and abs(s) == 1.0:
        exps.append(Expectation("sectional_curvature", -1.0, "analytic: hyperbolic cusp has curvature -1"))
    params = {"n": nn, "sign": s, "T": float(T)}
    return CatalogEntry(
        "warped", params, metric, BoundaryLocus("t", 0.0), tuple(exps), Topology.TORUS, sampler,
        _coordinate_level(metric, 0, Topology.TORUS, "t-torus"), ((alt, to_alt),), profile,
        level_range=(0.0, 0.75 * T),
    )


def warped_metric(profile: WarpedProfile, chart_id: str = "warped") -> MetricField:
    """``dt^2 + xi(t)^2 h(y)`` with coordinates ``(t, y)``."""
    fiber = profile.fiber
    nn = fiber.dim + 1
    T = profile.T

    def components(x):
        t = x[0]
        w = profile.xi(t) ** 2
        h = fiber.components(x[1:])
        out = [[1.0] + [0.0] * (nn - 1)]
        for i in range(nn - 1):
            out.append([0.0] + [w * h[i][j] for j in range(nn - 1)])
        return out

    def domain(x):
        t = x[..., 0]
        return (t >= -1e-12) & (t < T) & fiber.domain(x[..., 1:])

    return MetricField(nn, components, domain, chart_id, ("t",) + tuple(f"y{i}" for i in range(1, nn)))


def make_hyperbolic_cap(n: int = 3, R: float = 1.0) -> CatalogEntry:
    n = _check_n(n)
    if not R > 0:
        raise InvalidParam("cap radius R must be positive")
    R = float(R)

    def components(x):
        t = x[0]
        s2 = dual.sinh(t) ** 2
        return diag([1.0] + [s2 * f for f in sphere_factors(x[1:])])

    def domain(x):
        t = x[..., 0]
        return (t > 0) & (t <= R * (1 + 1e-12)) & _angles_ok(x[..., 1:])

    metric = MetricField(n, components, domain, f"hyperbolic-cap-n{n}",
                         ("t",) + tuple(f"a{i}" for i in range(1, n)))

    def cart_components(x):
        t = _radius(x)
        w = (dual.sinh(t) / t) ** 2
        return [[(w if i == j else 0.0) + (1.0 - w) * x[i] * x[j] / (t * t) for j in range(n)] for i in range(n)]

    cart = MetricField(n, cart_components, lambda x: np.linalg.norm(x, axis=-1) <= R * (1 + 1e-12),
                       f"hyperbolic-cap-cartesian-n{n}")

    def to_cart(v):
        v = np.asarray(v, dtype=float)
        return v[..., :1] * np.stack(sphere_embed(list(np.moveaxis(v[..., 1:], -1, 0))), axis=-1)

    def sampler(u):
        t = R * (0.1 + 0.85 * u[..., 0])
        return np.concatenate([t[..., None], _angle_sampler(u[..., 1:])], axis=-1)

    return CatalogEntry(
        "hyperbolic_cap", {"n": n, "R": R}, metric, BoundaryLocus("t", R),
        (Expectation("scalar_curvature", -float(n * (n - 1)), "analytic: constant curvature -1 model"),
         Expectation("sectional_curvature", -1.0, "analytic: constant curvature -1 model"),
         Expectation("obata_residual_cosh", 0.0, "analytic: f = cosh t solves Hess f = f g")),
        Topology.SPHERE, sampler, _coordinate_level(metric, 0, Topology.SPHERE, "geodesic-sphere"),
        ((cart, to_cart),), level_range=(0.1 * R, R),
    )


# -- registry --------------------------------------------------------------------
def parse_spec(spec: str) -> tuple[str, dict]:
    name, _, rest = spec.strip().partition(":")
    name = _ALIASES.get(name.strip(), name.strip())
    if name not in FAMILIES:
        raise UnknownFamily(f"unknown metric family {name!r}; known: {', '.join(FAMILIES)}")
    params: dict = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise InvalidParam(f"malformed parameter {item!r} in {spec!r}")
        try:
            params[key.strip()] = float(val)
        except ValueError as exc:
            raise InvalidParam(f"parameter {key!r} is not a number: {val!r}") from exc
    return name, params


def format_spec(name: str, params: dict) -> str:
    body = ",".join(f"{k}={v:g}" for k, v in sorted(params.items()))
    return f"{name}:{body}" if body else name


_BUILDERS = {
    "spatial_schwarzschild": (make_spatial_schwarzschild, {"n", "m"}),
    "ads_schwarzschild": (make_ads_schwarzschild, {"n", "m"}),
    "kottler": (make_toroidal_kottler, {"n", "m"}),
    "hyperbolic_cap": (make_hyperbolic_cap, {"n", "R"}),
}


def from_spec(spec: str) -> CatalogEntry:
    name, params = parse_spec(spec)
    if name == "warped":
        p = dict(params)
        signs = [k for k in ("eps", "delta", "sign") if k in p]
        if len(signs) > 1:
            raise InvalidParam("give only one of eps, delta, sign")
        sign = p.pop(signs[0]) if signs else 1.0
        if signs and signs[0] == "eps" and sign not in (0.0, 1.0):
            raise InvalidParam("eps must be 0 or 1")
        if signs and signs[0] == "delta" and sign not in (-1.0, 1.0):
            raise InvalidParam("delta must be -1 or 1")
        n = p.pop("n", 3)
        T = p.pop("T", 4.0)
        if p:
            raise InvalidParam(f"unknown parameters for warped: {sorted(p)}")
        return make_warped_product(sign=sign, T=T, n=_check_n(n))
    builder, allowed = _BUILDERS[name]
    extra = set(params) - allowed
    if extra:
        raise InvalidParam(f"unknown parameters for {name}: {sorted(extra)}")
    kw = {k: (int(v) if k == "n" else v) for k, v in params.items()}
    if "n" in params and params["n"] != int(params["n"]):
        raise InvalidParam("n must be an integer")
    return builder(**kw)


def default_entries() -> list[CatalogEntry]:
    return [make_spatial_schwarzschild(3, 1.0), make_ads_schwarzschild(3, 0.5), make_toroidal_kottler(3, 0.5),
            make_warped_product(sign=1.0), make_hyperbolic_cap(3, 1.0)]


def sample_points(entry: CatalogEntry, count: int = 64, seed: int = 0) -> np.ndarray:
    """Deterministic scrambled-Halton sample of interior chart points."""
    u = qmc.Halton(d=entry.dim, scramble=True, seed=seed).random(count)
    return entry.sampler(u)


def richardson(values: Sequence, exponents: Sequence[float], ratio: float = 2.0):
    """Extrapolate ``F(x_k)``, ``x_k = x_0 / ratio^k``, to ``x = 0``.

    Assumes ``F(x) = F(0) + sum_j c_j x^exponents[j]``; uses
    ``len(values) - 1`` of the exponents.  Values may be arrays (extrapolated
    elementwise).
    """
    T = [np.asarray(v, dtype=float) for v in values]
    for j, p in enumerate(exponents[: len(T) - 1]):
        f = ratio**p
        T = [(f * T[i + 1] - T[i]) / (f - 1.0) for i in range(len(T) - 1)]
    return T[0] if T[0].ndim else float(T[0])


def boundary_value(entry: CatalogEntry, quantity: Callable[[EmbeddedSurface], Any], levels: int = 5):
    """Evaluate a surface quantity at the boundary, extrapolating if needed."""
    b = entry.boundary
    if b.regular:
        return quantity(entry.boundary_surface())
    vals = [quantity(entry.level_surface(b.value * (1.0 + 2.0**-k * b.offset))) for k in range(levels)]
    return richardson(vals, b.exponents)
