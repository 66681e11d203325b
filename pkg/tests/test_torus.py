import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from motskit.errors import InvalidParam
from motskit.torus import TorusGrid, fd4_d1, is_constant, spectral_d1, spectral_d2


@pytest.mark.parametrize("N", [8, 16, 32])
def test_spectral_exact_on_trig_polynomials(N):
    x = 2 * np.pi * np.arange(N) / N
    for k in range(1, N // 2):
        np.testing.assert_allclose(spectral_d1(N) @ np.sin(k * x), k * np.cos(k * x), atol=1e-10)
        np.testing.assert_allclose(spectral_d2(N) @ np.cos(k * x), -k * k * np.cos(k * x), atol=1e-9)


def test_fd4_order():
    errs = []
    for N in (16, 32):
        x = 2 * np.pi * np.arange(N) / N
        errs.append(np.max(np.abs(fd4_d1(N) @ np.sin(x) - np.cos(x))))
    assert errs[0] / errs[1] == pytest.approx(16.0, rel=0.1)


@pytest.mark.parametrize("method", ["spectral", "fd4"])
def test_laplacian_annihilates_constants(method):
    g = TorusGrid(2, 16, method)
    h = np.stack([np.array([[1.5 + 0.3 * np.sin(a), 0.1], [0.1, 1.0]]) for a in g.nodes[:, 1]])
    np.testing.assert_allclose(g.laplacian(h) @ np.ones(g.size), 0.0, atol=1e-11)


def test_variable_metric_laplacian_matches_conformal_formula():
    # h = e^(2w) delta in 2D: Lap f = e^(-2w) (f_xx + f_yy)
    g = TorusGrid(2, 32)
    x, y = g.nodes.T
    w = 0.2 * np.sin(x + y)
    h = np.exp(2 * w)[:, None, None] * np.eye(2)
    f = np.cos(x) * np.sin(2 * y)
    np.testing.assert_allclose(g.laplacian(h) @ f, np.exp(-2 * w) * (-5 * f), atol=1e-10)


@given(st.integers(0, 3), st.integers(0, 3))
def test_mixed_derivative(k, l):
    g = TorusGrid(2, 16)
    x, y = g.nodes.T
    f = np.sin(k * x + 1) * np.cos(l * y)
    np.testing.assert_allclose(g.d2(0, 1) @ f, -k * l * np.cos(k * x + 1) * np.sin(l * y), atol=1e-10)


def test_integrate():
    g = TorusGrid(2, 16)
    assert g.integrate(np.ones(g.size)) == pytest.approx(4 * np.pi**2)


@pytest.mark.parametrize("kw", [dict(dim=0), dict(dim=2, N=7), dict(dim=2, N=4), dict(dim=2, method="cheb")])
def test_bad_grid(kw):
    with pytest.raises(InvalidParam):
        TorusGrid(**kw)


def test_is_constant():
    assert is_constant(np.ones((5, 2, 2)))
    assert not is_constant(np.arange(5.0))
