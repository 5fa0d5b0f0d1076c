import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from savkinetic.errors import GridMismatch, NegativeDensity, NonPositiveMass
from savkinetic.grid import (entropy, from_modes, integrate, make_grid, moments, spectral_divergence,
                             spectral_gradient, spectral_transform, to_modes)
from savkinetic.reference import maxwellian, maxwellian_entropy


def test_nodes_and_spacing():
    g = make_grid(8, 2.0)
    assert g.h == 0.5
    assert g.dv == 0.25
    np.testing.assert_array_equal(g.nodes, [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5])
    assert g.vx.shape == g.vy.shape == (8, 8)
    assert g.vx[3, 0] == -0.5 and g.vy[0, 3] == -0.5


def test_wavenumbers_fft_order():
    g = make_grid(8, np.pi)
    np.testing.assert_array_equal(g.mode_index, [0, 1, 2, 3, -4, -3, -2, -1])
    np.testing.assert_allclose(g.wavenumbers, g.mode_index)
    assert not g.nyquist_mask[4].any() and not g.nyquist_mask[:, 4].any()
    assert g.nyquist_mask.sum() == 49


@pytest.mark.parametrize("N", [3, 5, 2, 0])
def test_rejects_bad_N(N):
    with pytest.raises(ValueError):
        make_grid(N, 1.0)


def test_rejects_bad_L():
    with pytest.raises(ValueError):
        make_grid(8, 0.0)


def test_shape_check():
    g = make_grid(8, 1.0)
    with pytest.raises(GridMismatch):
        integrate(g, np.ones((4, 4)))


def test_integrate_constant():
    g = make_grid(8, 3.0)
    assert integrate(g, np.ones(g.shape)) == pytest.approx(36.0, rel=1e-15)


def test_maxwellian_moments():
    g = make_grid(64, 10.0)
    m = moments(g, maxwellian(g, 1.3, (0.4, -0.2), 1.7))
    assert m.rho == pytest.approx(1.3, rel=1e-12)
    np.testing.assert_allclose(m.u, [0.4, -0.2], atol=1e-12)
    assert m.T == pytest.approx(1.7, rel=1e-10)
    # energy = rho (|u|^2 + 2T) in 2D
    assert m.energy == pytest.approx(1.3 * (0.2 + 3.4), rel=1e-10)


def test_moments_reject_zero_mass():
    g = make_grid(8, 1.0)
    with pytest.raises(NonPositiveMass):
        moments(g, np.zeros(g.shape))


def test_entropy_matches_closed_form():
    g = make_grid(64, 10.0)
    f = maxwellian(g, 1.0, (0.0, 0.0), 1.0)
    # closed form rho log(rho/(2 pi T)) - rho = -log(2 pi) - 1
    assert entropy(g, f) == pytest.approx(maxwellian_entropy(1.0, 1.0), abs=1e-12)
    assert entropy(g, f, C=10.0) == pytest.approx(7.1621, abs=1e-4)


def test_entropy_clamps_zeros():
    g = make_grid(8, 1.0)
    f = np.zeros(g.shape)
    f[2, 3] = 1.0
    assert entropy(g, f) == 0.0


def test_entropy_rejects_negative():
    g = make_grid(8, 1.0)
    f = np.ones(g.shape)
    f[0, 0] = -1e-3
    with pytest.raises(NegativeDensity):
        entropy(g, f)


def test_spectral_gradient_of_gaussian():
    g = make_grid(64, 8.0)
    f = np.exp(-g.v2 / 2)
    fx, fy = spectral_gradient(g, f)
    np.testing.assert_allclose(fx, -g.vx * f, atol=1e-12)
    np.testing.assert_allclose(fy, -g.vy * f, atol=1e-12)


def test_divergence_has_zero_mean():
    rng = np.random.default_rng(0)
    g = make_grid(16, 2.0)
    d = spectral_divergence(g, rng.normal(size=g.shape), rng.normal(size=g.shape))
    assert abs(integrate(g, d)) < 1e-13


def test_mode_normalisation():
    g = make_grid(8, 1.0)
    c = to_modes(g, np.full(g.shape, 3.0))
    assert c[0, 0] == pytest.approx(3.0)
    assert np.abs(c).sum() == pytest.approx(3.0)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (8, 8), elements=st.floats(-1e3, 1e3)))
def test_transform_roundtrip(a):
    g = make_grid(8, 1.0)
    back = spectral_transform(g, spectral_transform(g, a), inverse=True)
    np.testing.assert_allclose(back.real, a, atol=1e-10)
    np.testing.assert_allclose(from_modes(g, to_modes(g, a)).imag, 0, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (8, 8), elements=st.floats(-10, 10)),
       arrays(np.float64, (8, 8), elements=st.floats(-10, 10)),
       st.floats(-5, 5))
def test_integrate_is_linear(a, b, s):
    g = make_grid(8, 1.5)
    assert integrate(g, a + s * b) == pytest.approx(integrate(g, a) + s * integrate(g, b),
                                                    abs=1e-9)
