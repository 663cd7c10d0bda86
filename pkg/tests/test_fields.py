import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pilotwave import WaveState, density, fourier_transform, inverse_fourier_transform, make_grid, norm_squared
from pilotwave.fields import Potential
from pilotwave.propagator import analytic_free_gaussian

from conftest import plane_wave


def test_make_grid_spacing():
    g = make_grid(-30, 30, 2048)
    assert g.dx == pytest.approx(0.029296875, abs=1e-12)
    assert round(g.dx, 6) == 0.029297


def test_make_grid_nodes():
    g = make_grid(0, 1, 16)
    assert g.x[0] == 0.0
    assert g.x[15] == 0.9375
    assert len(g.x) == 16


@pytest.mark.parametrize("args", [(-1, 1, 100), (-1, 1, 8), (1, 1, 16), (2, 1, 16)])
def test_make_grid_rejects(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_wrap_is_periodic():
    g = make_grid(0, 1, 16)
    assert g.wrap(1.0) == 0.0
    assert g.wrap(-0.25) == pytest.approx(0.75)
    assert g.wrap(-1e-18) < g.x_max


def test_gaussian_norm(gaussian):
    assert abs(norm_squared(gaussian) - 1.0) < 1e-9


def test_zero_state_norm(grid):
    assert norm_squared(WaveState.scalar(grid, np.zeros(grid.n))) == 0.0


def test_spinor_norm_linearity(gaussian):
    c1, c2 = 0.6, 0.8j
    s = WaveState.from_amplitudes(gaussian.grid, gaussian.psi, c1, c2)
    assert s.kind == "spinor"
    assert abs(norm_squared(s) - 1.0) < 1e-9


def test_component_count_enforced(grid):
    with pytest.raises(ValueError):
        WaveState(grid, np.zeros((3, grid.n)))
    with pytest.raises(ValueError):
        WaveState(grid, np.zeros(grid.n + 1))


def test_state_is_immutable(gaussian):
    with pytest.raises(ValueError):
        gaussian.components[0, 0] = 1.0


def test_plane_wave_density(grid):
    rho = density(plane_wave(grid, 2 * np.pi * 5 / grid.length))
    np.testing.assert_allclose(rho, 1 / grid.length, rtol=1e-12)


@pytest.mark.parametrize("t", [0.0, 0.5, 2.0])
def test_density_at_origin_matches_closed_form(grid, t):
    s = WaveState.scalar(grid, analytic_free_gaussian(grid.x, t))
    i0 = grid.index_of(0.0)
    assert grid.x[i0] == 0.0
    assert density(s)[i0] == pytest.approx(1 / np.sqrt(np.pi * (1 + t * t)), rel=1e-12)
    if t == 0.0:
        assert density(s)[i0] == pytest.approx(0.5641896, abs=1e-7)


def test_equal_spinor_density_equals_scalar(gaussian):
    s = WaveState.from_amplitudes(gaussian.grid, gaussian.psi, 2**-0.5, 2**-0.5)
    np.testing.assert_allclose(density(s), density(gaussian), rtol=1e-14, atol=1e-300)


def test_polar_form(gaussian):
    np.testing.assert_allclose(gaussian.magnitude * np.exp(1j * gaussian.phase), gaussian.components)


def test_fourier_gaussian(gaussian):
    p, phat = fourier_transform(gaussian)
    np.testing.assert_allclose(np.abs(phat) ** 2, np.pi**-0.5 * np.exp(-(p**2)), atol=1e-6)


def test_fourier_momentum_lattice(grid):
    p, _ = fourier_transform(plane_wave(grid, 0.0))
    assert p[0] == pytest.approx(-np.pi / grid.dx)
    np.testing.assert_allclose(np.diff(p), 2 * np.pi / grid.length)
    assert p[grid.n // 2] == 0.0


def test_fourier_plane_wave_single_node(grid):
    k0 = 7 * grid.dp
    p, phat = fourier_transform(plane_wave(grid, k0))
    weight = np.abs(phat) ** 2
    j = int(np.argmax(weight))
    assert p[j] == pytest.approx(k0)
    assert weight.sum() - weight[j] < 1e-20


def test_fourier_rejects_spinor(gaussian):
    s = WaveState.from_amplitudes(gaussian.grid, gaussian.psi, 1, 0)
    with pytest.raises(ValueError):
        fourier_transform(s)


def test_potential_validation():
    with pytest.raises(ValueError):
        Potential("linear_sg", 0.0)
    with pytest.raises(ValueError):
        Potential("linear_sg", 1.0, 2)
    with pytest.raises(ValueError):
        Potential("free", 1.0)
    g = make_grid(-1, 1, 16)
    v = Potential.linear_sg(2.0, -1).values(g, 2)
    np.testing.assert_array_equal(v[0], 2.0 * g.x)
    np.testing.assert_array_equal(v[1], -2.0 * g.x)


small_grid = make_grid(-5, 5, 64)
finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(re=arrays(float, 64, elements=finite), im=arrays(float, 64, elements=finite))
def test_parseval_roundtrip_and_positivity(re, im):
    s = WaveState.scalar(small_grid, re + 1j * im)
    assert np.all(density(s) >= 0)
    p, phat = fourier_transform(s)
    lhs = np.sum(np.abs(phat) ** 2) * small_grid.dp
    assert lhs == pytest.approx(norm_squared(s), rel=1e-10, abs=1e-10)
    back = inverse_fourier_transform(small_grid, phat)
    np.testing.assert_allclose(back.psi, s.psi, rtol=0, atol=1e-12)
