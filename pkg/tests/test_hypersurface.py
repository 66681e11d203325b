import numpy as np
import pytest

from motskit import dual
from motskit.catalog import from_spec, make_ads_schwarzschild, make_spatial_schwarzschild, make_toroidal_kottler, \
    make_warped_product
from motskit.diffgeo import euclidean
from motskit.errors import DomainError, RankDeficientImmersion
from motskit.hypersurface import EmbeddedSurface, Topology, Trapping, classify, fiber_grid, null_expansion, \
    second_fundamental_form
from motskit.initial_data import make_umbilic_data, time_symmetric

THETA_KOTTLER_R2 = -0.129171306613029307  # 2(sqrt(1 - 1/8) - 1), 30-digit arithmetic


def euclid_sphere(r, sign=1.0):
    def imm(u):
        return [r * dual.sin(u[0]) * dual.cos(u[1]), r * dual.sin(u[0]) * dual.sin(u[1]), r * dual.cos(u[0])]
    return EmbeddedSurface(euclidean(3), imm, lambda x: sign * np.asarray(x), Topology.SPHERE)


@pytest.mark.parametrize("r", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_round_sphere_mean_curvature(r, sign):
    s = euclid_sphere(r, sign)
    H = second_fundamental_form(s, s.fiber_grid(8)[0]).H
    np.testing.assert_allclose(H, sign * 2.0 / r, atol=1e-12)


def test_ads_boundary_h_equals_n_minus_1():
    for n in (3, 4):
        e = make_ads_schwarzschild(n, 0.5)
        s = e.boundary_surface()
        H = second_fundamental_form(s, s.fiber_grid(8)[0]).H
        np.testing.assert_allclose(H, n - 1, atol=1e-10)


def test_warped_slice_a_equals_h():
    e = make_warped_product(sign=1.0)
    s = e.level_surface(0.7)
    geo = second_fundamental_form(s, s.fiber_grid(8)[0])
    np.testing.assert_allclose(geo.A, geo.induced_h, atol=1e-12)
    np.testing.assert_allclose(geo.H, 2.0, atol=1e-12)


def test_time_symmetric_theta_is_h():
    e = make_spatial_schwarzschild()
    s = e.level_surface(1.3)
    q = s.fiber_grid(8)[0]
    geo = null_expansion(s, time_symmetric(e.metric), q)
    np.testing.assert_array_equal(geo.theta, geo.H)


def test_ads_boundary_theta_zero():
    e = make_ads_schwarzschild(3, 0.5)
    s = e.boundary_surface()
    geo = null_expansion(s, make_umbilic_data(e.metric, 1.0, -1), s.fiber_grid(8)[0])
    np.testing.assert_allclose(geo.theta, 0.0, atol=1e-10)


def test_kottler_theta_at_two():
    e = make_toroidal_kottler(3, 0.5)
    s = e.level_surface(2.0)
    geo = null_expansion(s, make_umbilic_data(e.metric, 1.0, -1), s.fiber_grid(8)[0])
    np.testing.assert_allclose(geo.theta, THETA_KOTTLER_R2, atol=1e-10)


@pytest.mark.parametrize("make, data, expected", [
    (lambda: make_spatial_schwarzschild(), "K0", Trapping.MOTS),
    (lambda: make_toroidal_kottler(), "Kminus", Trapping.OUTER_TRAPPED),
])
def test_classify_catalog(make, data, expected):
    e = make()
    ids = time_symmetric(e.metric) if data == "K0" else make_umbilic_data(e.metric, 1.0, -1)
    s = e.boundary_surface() if e.boundary.regular else e.level_surface(2.0)
    assert classify(s, ids, resolution=8) is expected


def test_classify_untrapped_sphere():
    assert classify(euclid_sphere(1.0), time_symmetric(euclidean(3)), resolution=8) is Trapping.UNTRAPPED


def test_classify_weakly_outer_trapped():
    # theta = -1 + cos(x) on a flat torus slice: max 0, min -2
    m = euclidean(3)
    s = EmbeddedSurface(m, lambda u: [0.0 * u[0], u[0], u[1]], lambda x: np.eye(3)[0] + 0 * x, Topology.TORUS)

    def k(x):
        return [[0.0] * 3, [0.0, -0.5 + 0.5 * dual.cos(x[1]), 0.0], [0.0, 0.0, -0.5 + 0.5 * dual.cos(x[1])]]

    from motskit.initial_data import InitialDataSet
    assert classify(s, InitialDataSet(m, k), resolution=8) is Trapping.WEAKLY_OUTER_TRAPPED


@pytest.mark.parametrize("spec", ["ads_schwarzschild:n=3,m=0.5", "warped:eps=1", "kottler:n=3,m=0.5"])
def test_chi_is_a_minus_eps_h(spec):
    e = from_spec(spec)
    lo, hi = e.level_range
    s = e.level_surface(0.5 * (lo + hi))
    geo = null_expansion(s, make_umbilic_data(e.metric, 1.0, -1), s.fiber_grid(8)[0])
    np.testing.assert_allclose(geo.chi, geo.A - geo.induced_h, atol=1e-10)
    trK = np.einsum("...ab,...ab->...", geo.h_inv, geo.K_tan)
    np.testing.assert_allclose(geo.theta, trK + geo.H, atol=1e-10)
    np.testing.assert_allclose(geo.H, np.einsum("...ab,...ab->...", geo.h_inv, geo.A), atol=1e-10)


@pytest.mark.parametrize("r", [1.2, 1.7, 2.5])
def test_level_set_h_matches_closed_form(r):
    e = make_ads_schwarzschild(3, 0.5)
    V = 1 + r * r - 1.0 / r
    s = e.level_surface(r)
    H = second_fundamental_form(s, s.fiber_grid(8)[0]).H
    np.testing.assert_allclose(H, 2 * np.sqrt(V) / r, atol=1e-8)


def test_reversal_flips_signs():
    e = make_spatial_schwarzschild()
    s = e.level_surface(1.4)
    q = s.fiber_grid(8)[0]
    ids = time_symmetric(e.metric)
    a, b = null_expansion(s, ids, q), null_expansion(s.reversed(), ids, q)
    np.testing.assert_allclose(b.A, -a.A, atol=1e-12)
    np.testing.assert_allclose(b.H, -a.H, atol=1e-12)
    np.testing.assert_allclose(b.theta, -a.theta, atol=1e-12)


def test_rank_deficient():
    s = EmbeddedSurface(euclidean(3), lambda u: [u[0], 2 * u[0], 0.0 * u[1]], lambda x: np.eye(3)[2] + 0 * x,
                        Topology.TORUS)
    with pytest.raises(RankDeficientImmersion):
        second_fundamental_form(s, np.array([[0.1, 0.2]]))


def test_tangent_orientation_rejected():
    s = EmbeddedSurface(euclidean(3), lambda u: [0.0 * u[0], u[0], u[1]], lambda x: np.eye(3)[1] + 0 * x,
                        Topology.TORUS)
    with pytest.raises(DomainError):
        second_fundamental_form(s, np.array([[0.1, 0.2]]))


def test_fiber_grid_sizes():
    assert fiber_grid(Topology.TORUS, 2)[0].shape == (1024, 2)
    assert fiber_grid(Topology.SPHERE, 2)[0].shape == (32 * 64, 2)
    nodes, _ = fiber_grid(Topology.SPHERE, 2, 8)
    assert nodes[:, 0].min() > 0 and nodes[:, 0].max() < np.pi
