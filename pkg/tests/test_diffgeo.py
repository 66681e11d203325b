import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from motskit import dual
from motskit.catalog import default_entries, make_ads_schwarzschild, make_hyperbolic_cap, sample_points
from motskit.diffgeo import (
    ChartPoint,
    MetricField,
    covariant_hessian,
    curvature,
    diag,
    euclidean,
    eval_metric,
    fd_curvature_oracle,
    flat_metric,
    pullback,
    scalar_curvature,
    sectional_curvature,
)
from motskit.errors import DegenerateMetric, DegeneratePlane, DomainError, InvalidParam


def round_sphere():
    return MetricField(2, lambda x: diag([1.0, dual.sin(x[0]) ** 2]), chart_id="S2")


def hyperbolic_upper_half(n=3):
    return MetricField(n, lambda x: diag([1.0 / x[-1] ** 2] * n), lambda x: x[..., -1] > 0, "H3-upper")


def test_euclidean_is_flat():
    cb = curvature(euclidean(3), np.random.default_rng(0).normal(size=(5, 3)))
    assert np.max(np.abs(cb.riemann)) == 0.0


def test_round_sphere_scalar_curvature():
    S = scalar_curvature(round_sphere(), np.array([[0.4, 0.1], [1.2, 2.0], [2.5, 5.0]]))
    np.testing.assert_allclose(S, 2.0, atol=1e-12)


def test_hyperbolic_space_curvature():
    m = hyperbolic_upper_half()
    p = np.array([[0.1, -0.3, 0.7], [2.0, 1.0, 3.0]])
    np.testing.assert_allclose(scalar_curvature(m, p), -6.0, atol=1e-10)
    K = sectional_curvature(m, p, np.array([1.0, 0.0, 0.2]), np.array([0.0, 1.0, -0.5]))
    np.testing.assert_allclose(K, -1.0, atol=1e-10)


def test_chartpoint_accepted():
    S = scalar_curvature(round_sphere(), ChartPoint(np.array([0.7, 0.2]), "S2"))
    assert S == pytest.approx(2.0)


@pytest.mark.parametrize("entry", default_entries(), ids=lambda e: e.name)
def test_riemann_symmetries(entry):
    cb = curvature(entry.metric, sample_points(entry, 8))
    R = cb.riemann_lowered()  # R_lkij
    np.testing.assert_allclose(R, -np.swapaxes(R, -1, -2), atol=1e-10)
    np.testing.assert_allclose(R, -np.swapaxes(R, -3, -4), atol=1e-10)
    np.testing.assert_allclose(R, np.einsum("...abcd->...cdab", R), atol=1e-10)
    bianchi = R + np.einsum("...lkij->...lijk", R) + np.einsum("...lkij->...ljki", R)
    np.testing.assert_allclose(bianchi, 0.0, atol=1e-10)
    np.testing.assert_allclose(cb.ricci, np.swapaxes(cb.ricci, -1, -2), atol=1e-10)


@pytest.mark.parametrize("entry", default_entries(), ids=lambda e: e.name)
def test_scalar_invariant_under_chart_change(entry):
    pts = sample_points(entry, 10, seed=3)
    S = scalar_curvature(entry.metric, pts)
    for alt, to_alt in entry.alt_charts:
        np.testing.assert_allclose(scalar_curvature(alt, to_alt(pts)), S, atol=1e-9)


def test_fd_oracle_ads_scalar():
    # the oracle itself at step 1e-3 reproduces S = -6 to 1e-6
    e = make_ads_schwarzschild(3, 0.5)
    S = fd_curvature_oracle(e.metric, sample_points(e, 5), step=1e-3).scalar
    np.testing.assert_allclose(S, -6.0, atol=1e-6)


def test_fd_oracle_rejects_nonpositive_step():
    with pytest.raises(InvalidParam):
        fd_curvature_oracle(euclidean(2), np.zeros(2), step=0.0)


def test_domain_checked():
    e = make_hyperbolic_cap()
    with pytest.raises(DomainError):
        curvature(e.metric, np.array([-0.5, 1.0, 1.0]))


def test_degenerate_metric_detected():
    m = MetricField(2, lambda x: diag([1.0, x[0] - 1.0]))
    with pytest.raises(DegenerateMetric):
        eval_metric(m, np.array([0.5, 0.0]))


def test_degenerate_plane():
    with pytest.raises(DegeneratePlane):
        sectional_curvature(euclidean(3), np.zeros(3), np.array([1.0, 0, 0]), np.array([2.0, 0, 0]))


def test_pullback_polar_is_flat():
    polar = pullback(euclidean(2), lambda v: [v[0] * dual.cos(v[1]), v[0] * dual.sin(v[1])], 2)
    g = eval_metric(polar, np.array([2.0, 0.3])).g
    np.testing.assert_allclose(g, np.diag([1.0, 4.0]), atol=1e-14)
    np.testing.assert_allclose(scalar_curvature(polar, np.array([[2.0, 0.3], [0.5, 1.0]])), 0.0, atol=1e-12)


def test_flat_metric_radii():
    g = eval_metric(flat_metric(2, [2.0, 3.0]), np.zeros(2)).g
    np.testing.assert_allclose(g, np.diag([4.0, 9.0]))


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.2, 2.0))
def test_covariant_hessian_of_linear_function_in_hyperbolic_space(a, b, z):
    # Hess(1/z) = (1/z) g holds exactly in the upper half space model
    m = hyperbolic_upper_half()
    f0, _, hess, ev = covariant_hessian(m, lambda x: 1.0 / x[2], np.array([a, b, z]))
    np.testing.assert_allclose(hess, f0 * ev.g, atol=1e-9 * max(1.0, f0**3))
