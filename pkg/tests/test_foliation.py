import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motskit import dual
from motskit.catalog import WarpedProfile, from_spec, make_hyperbolic_cap, make_toroidal_kottler, warped_metric
from motskit.diffgeo import euclidean, flat_metric
from motskit.errors import CausticDetected, GeodesicExitedDomain, InvalidParam
from motskit.foliation import (
    build_normal_foliation,
    evolution_consistency,
    gauge_deviation,
    theta_profile,
    theta_rows,
    verify_splitting,
)
from motskit.hypersurface import EmbeddedSurface, Topology
from motskit.initial_data import make_umbilic_data, time_symmetric

from foliation_cases import random_warp

RES = 8


def flat_slab():
    m = euclidean(3)
    return m, EmbeddedSurface(m, lambda u: [0.0 * u[0], u[0], u[1]], lambda x: np.eye(3)[0] + 0 * x, Topology.TORUS)



def test_warped_slices_scale_exponentially():
    e = from_spec("warped:eps=1")
    f = build_normal_foliation(e.metric, e.boundary_surface(), resolution=RES)
    expected = np.exp(2 * f.t_grid)[:, None, None, None] * f.h_slices[:1]
    np.testing.assert_allclose(f.h_slices, expected, rtol=1e-9)
    assert f.psi.min() > 0


def test_euclidean_product_slices_constant():
    m, base = flat_slab()
    f = build_normal_foliation(m, base, resolution=RES)
    np.testing.assert_allclose(f.h_slices, np.broadcast_to(f.h_slices[:1], f.h_slices.shape), atol=1e-12)
    assert np.all(np.diff(f.t_grid) > 0) and f.t_grid[0] == 0.0


def test_cap_inward_caustic():
    e = make_hyperbolic_cap(3, 1.0)
    with pytest.raises(CausticDetected):
        build_normal_foliation(e.metric, e.boundary_surface().reversed(), delta_max=1.0, resolution=RES)


def test_leaving_domain():
    e = from_spec("warped:eps=1,T=0.5")
    with pytest.raises(GeodesicExitedDomain):
        build_normal_foliation(e.metric, e.boundary_surface(), delta_max=1.0, resolution=RES)


def test_bad_arguments():
    m, base = flat_slab()
    with pytest.raises(InvalidParam):
        build_normal_foliation(m, base, delta_max=0.0)
    with pytest.raises(InvalidParam):
        build_normal_foliation(m, base, steps=1)


def test_theta_profiles():
    e = from_spec("warped:eps=1")
    f = build_normal_foliation(e.metric, e.boundary_surface(), resolution=RES)
    assert np.max(np.abs(theta_profile(f, make_umbilic_data(e.metric, 1.0, -1)))) < 1e-7
    m, base = flat_slab()
    g = build_normal_foliation(m, base, resolution=RES)
    assert np.max(np.abs(theta_profile(g, time_symmetric(m)))) == 0.0


def test_kottler_theta_negative():
    e = make_toroidal_kottler()
    f = build_normal_foliation(e.metric, e.level_surface(1.0625), resolution=RES)
    th = theta_profile(f, make_umbilic_data(e.metric, 1.0, -1))
    assert np.all(th < 0)
    header, rows = theta_rows(f, th)
    assert header == ["t", "theta_min", "theta_max", "theta_mean"]
    assert rows.shape == (17, 4)


def test_gauge_preserved_on_curved_geodesics():
    e = make_toroidal_kottler()
    f = build_normal_foliation(e.metric, e.level_surface(1.0625), resolution=RES)
    unit, orth = gauge_deviation(f)
    assert unit < 1e-8 and orth < 1e-8


def test_evolution_consistency_warped():
    e = from_spec("warped:eps=1")
    f = build_normal_foliation(e.metric, e.boundary_surface(), resolution=RES)
    assert evolution_consistency(f, make_umbilic_data(e.metric, 1.0, -1)) < 1e-6


def test_evolution_consistency_euclidean():
    m, base = flat_slab()
    f = build_normal_foliation(m, base, resolution=RES)
    assert evolution_consistency(f, time_symmetric(m)) < 1e-9


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_evolution_consistency_second_order(seed):
    m, base = random_warp(seed)
    ids = make_umbilic_data(m, 1.0, -1)
    d = [evolution_consistency(build_normal_foliation(m, base, 1.0, s, resolution=RES), ids) for s in (17, 33)]
    assert d[0] / d[1] == pytest.approx(4.0, rel=0.25)


@pytest.mark.parametrize("spec, data", [("warped:eps=1", -1), ("warped:eps=0", 0), ("warped:delta=-1", 1)])
def test_verify_splitting_passes(spec, data):
    e = from_spec(spec)
    ids = time_symmetric(e.metric) if data == 0 else make_umbilic_data(e.metric, 1.0, data)
    rep = verify_splitting(build_normal_foliation(e.metric, e.boundary_surface(), resolution=RES), ids)
    assert rep.verdict, rep.reason
    for v in (rep.max_theta, rep.max_chi, rep.max_lapse_dev, rep.max_warp_dev, rep.ricci_flat_dev):
        assert 0 <= v < 1e-6


def test_verify_splitting_ads_fails():
    e = from_spec("ads_schwarzschild:n=3,m=0.5")
    f = build_normal_foliation(e.metric, e.boundary_surface(), resolution=RES)
    rep = verify_splitting(f, make_umbilic_data(e.metric, 1.0, -1))
    assert not rep.verdict
    assert rep.reason == "interior slices have positive null expansion"
    assert rep.ricci_flat_dev > 0.1


def test_verify_splitting_kottler_reason():
    e = make_toroidal_kottler()
    f = build_normal_foliation(e.metric, e.level_surface(1.0625), resolution=RES)
    rep = verify_splitting(f, make_umbilic_data(e.metric, 1.0, -1))
    assert not rep.verdict and rep.reason == "interior slices outer trapped"


@settings(max_examples=5)
@given(st.floats(0.1, 2.0))
def test_splitting_any_window(delta):
    e = from_spec("warped:eps=1")
    f = build_normal_foliation(e.metric, e.boundary_surface(), delta_max=delta, steps=5, resolution=RES)
    assert verify_splitting(f, make_umbilic_data(e.metric, 1.0, -1)).verdict


def test_product_reduces_to_unwarped():
    m, base = flat_slab()
    rep = verify_splitting(build_normal_foliation(m, base, resolution=RES), time_symmetric(m))
    assert rep.warp_rate == 0.0 and rep.verdict
