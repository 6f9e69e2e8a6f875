import numpy as np
import pytest
from hypothesis import given, strategies as st

from artifact.euler_model import GasConstants
from artifact.reconstruction import (LINEAR_WEIGHTS, characteristic_reconstruct,
                                     edge_derivative, euler_eigenvectors, hweno5_candidates,
                                     hweno5_edge, hweno5_interfaces, hweno5_smooth_value,
                                     hweno5_weights, minmod, minmod_interfaces, minmod_slope,
                                     roe_average)
from oracles import cell_averages

G = GasConstants(1.4)


def window(f, df, x0, h):
    """Exact averages and averaged derivatives of cells j-1, j, j+1 around x0."""
    edges = x0 + h * np.array([-1.5, -0.5, 0.5, 1.5])
    avg = cell_averages(f, edges)
    dav = np.diff(f(edges)) / h
    return avg[0], avg[1], avg[2], dav[0], dav[2]


# ------------------------------------------------------------- minmod

def test_minmod_slope_examples():
    assert minmod_slope(0.0, 1.0, 3.0, 0.0, -1.0, 1.0, 0.1) == 0.0
    assert minmod_slope(0.0, 1.0, 2.0, 0.5, 1.5, 1.0, 0.1) == pytest.approx(10.0)
    h = 0.25
    for alpha in (1.0, 1.5, 1.9):
        s = minmod_slope(-h, 0.0, h, -0.5 * h, 0.5 * h, alpha, h)
        assert s == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        minmod_slope(0, 1, 2, 0, 1, 2.0)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_minmod_properties(a, b, c):
    m = minmod(a, b, c)
    assert abs(m) <= min(abs(a), abs(b), abs(c)) + 1e-15
    if not (np.sign(a) == np.sign(b) == np.sign(c)):
        assert m == 0.0


def test_minmod_interfaces_linear_field():
    h = 0.1
    x = (np.arange(-2, 12) + 0.5) * h
    hist = np.arange(-2, 13) * h
    e = minmod_interfaces(x, hist, h, 2, 1.9)
    assert np.allclose(e.left, np.arange(11) * h)
    assert np.allclose(e.right, np.arange(11) * h)
    assert np.allclose(e.dleft, 1.0)


# --------------------------------------------------------------- HWENO

def test_linear_weights():
    assert LINEAR_WEIGHTS == (9 / 80, 29 / 80, 21 / 40)
    assert sum(LINEAR_WEIGHTS) == pytest.approx(1.0, abs=1e-16)


def test_constant_field():
    assert hweno5_edge(2.5, 2.5, 2.5, 0.0, 0.0, 0.1) == pytest.approx(2.5, abs=1e-15)


def test_quartic_smooth_value_exact():
    h = 0.3
    f = lambda x: x ** 4
    df = lambda x: 4 * x ** 3
    x0 = 0.7
    val = hweno5_smooth_value(*window(f, df, x0, h), h)
    assert val == pytest.approx(f(x0 + 0.5 * h), abs=1e-12)
    # the linear weights combine the candidates into the full-stencil value
    c = hweno5_candidates(*window(f, df, x0, h), h)
    assert sum(w * ci for w, ci in zip(LINEAR_WEIGHTS, c)) == pytest.approx(val, abs=1e-12)


def test_quadratic_reproduced_for_any_weights():
    h = 0.2
    f = lambda x: 3 * x * x - x + 2
    df = lambda x: 6 * x - 1
    for x0 in (-0.3, 0.0, 1.1):
        c = hweno5_candidates(*window(f, df, x0, h), h)
        assert np.allclose(c, f(x0 + 0.5 * h), atol=1e-12)
        assert hweno5_edge(*window(f, df, x0, h), h) == pytest.approx(f(x0 + 0.5 * h), abs=1e-12)


def test_smooth_weights_approach_linear():
    f, df = np.sin, np.cos
    h = 1e-3
    w = hweno5_weights(*window(f, df, 0.4, h), h)
    assert np.allclose(w, LINEAR_WEIGHTS, atol=1e-3)


def test_step_rejected():
    h = 0.1
    # jump inside cell j+1: averages of the smooth side are 0
    um, u0, up = 0.0, 0.0, 1.0
    w = hweno5_weights(um, u0, up, 0.0, 0.0, h)
    assert w[2] < 1e-3
    assert w[0] + w[1] > 0.999


def test_mirror_symmetry():
    rng = np.random.default_rng(3)
    um, u0, up, dum, dup = rng.normal(size=5)
    h = 0.1
    a = hweno5_edge(um, u0, up, dum, dup, h, "right")
    b = hweno5_edge(up, u0, um, -dup, -dum, h, "left")
    assert a == pytest.approx(b, abs=1e-14)


def test_edge_derivative():
    h = 0.1
    assert edge_derivative(-1.5 * h, -0.5 * h, 0.5 * h, 1.5 * h, h) == pytest.approx(1.0)
    assert edge_derivative(2.0, 2.0, 2.0, 2.0, h) == 0.0
    errs = []
    for h in (0.1, 0.05, 0.025):
        edges = 0.3 + h * np.arange(-2, 3)
        av = cell_averages(lambda x: np.exp(x), edges)
        errs.append(abs(edge_derivative(*av, h) - np.exp(0.3)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 2.8)


def test_hweno5_interfaces_polynomial():
    h = 0.1
    edges = np.arange(-2, 13) * h
    f = lambda y: 1 + y - y * y
    ubar = cell_averages(f, edges)
    du = np.diff(f(edges)) / h
    e = hweno5_interfaces(ubar, du, h)
    exact = f(np.arange(11) * h)
    assert np.allclose(e.left, exact, atol=1e-12)
    assert np.allclose(e.right, exact, atol=1e-12)
    assert np.allclose(e.dleft, 1 - 2 * np.arange(11) * h, atol=1e-12)


# ------------------------------------------------------ characteristic

def _euler_window(n, h, pulse):
    edges = (np.arange(-2, n + 3)) * h
    rho = lambda x: 1 + pulse * np.exp(-40 * (x - 0.5) ** 2)
    p = lambda x: 1 + 1.4 * pulse * np.exp(-40 * (x - 0.5) ** 2)
    u = lambda x: pulse * np.exp(-40 * (x - 0.5) ** 2) * np.sqrt(1.4)
    U = lambda x: np.array([rho(x), rho(x) * u(x), p(x) / 0.4 + 0.5 * rho(x) * u(x) ** 2])
    ubar = np.array([cell_averages(lambda x, k=k: U(x)[k], edges) for k in range(3)])
    du = np.diff(U(edges), axis=1) / h
    return ubar, du


def test_characteristic_constant_field():
    U = np.array([1.2, 0.3, 2.9])[:, None] * np.ones((1, 12))
    e = characteristic_reconstruct(U, np.zeros_like(U), 0.1, G)
    assert np.allclose(e.left, U[:, :9], atol=1e-13)
    assert np.allclose(e.right, U[:, :9], atol=1e-13)
    assert np.allclose(e.dleft, 0.0, atol=1e-12)


def test_eigenvectors_inverse():
    ul = np.array([[1.0], [0.3], [2.6]])
    ur = np.array([[0.4], [-0.2], [1.1]])
    R, L = euler_eigenvectors(*roe_average(ul, ur, G), G)
    prod = np.einsum("ij...,jk...->ik...", L, R)
    assert np.allclose(prod[..., 0], np.eye(3), atol=1e-12)


def test_characteristic_vs_componentwise():
    diffs = []
    for n in (40, 80):
        h = 1.0 / n
        ub, du = _euler_window(n, h, 1e-2)
        a = characteristic_reconstruct(ub, du, h, G)
        b = characteristic_reconstruct(ub, du, h, G, basis="primitive")
        diffs.append(np.max(np.abs(a.left - b.left)))
    assert np.log2(diffs[0] / diffs[1]) > 4.0
