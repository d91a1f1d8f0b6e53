import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import bandlimited
from lpkit.errors import ConfigurationError, DomainError, UsageError
from lpkit.grid import (
    GridSpec,
    convolve,
    dilate_field,
    dyadic_shift,
    forward_transform,
    inverse_transform,
    lp_norm,
    spatial_field,
    spectral_field,
    spectral_l2_norm,
)


@pytest.mark.parametrize("samples", [3, 6, 100, 2])
def test_grid_rejects_bad_sample_counts(samples):
    with pytest.raises(DomainError):
        GridSpec(1, 10.0, samples)


def test_grid_basic_geometry():
    g = GridSpec(2, 8.0, 16)
    assert g.shape == (16, 16)
    assert g.cell_measure == pytest.approx(0.25)
    assert g.nyquist == pytest.approx(math.pi * 2)
    assert g.axis[0] == -4.0 and g.axis[-1] == pytest.approx(3.5)
    assert sorted(g.axis_indices.tolist()) == list(range(-8, 8))


def test_wrong_size_values_rejected():
    with pytest.raises(UsageError):
        spatial_field(GridSpec(1, 1.0, 8), np.zeros(7))


def test_zero_transforms_to_zero():
    g = GridSpec(1, 10.0, 64)
    assert np.all(forward_transform(spatial_field(g, np.zeros(64))).values == 0)
    assert np.all(inverse_transform(spectral_field(g, np.zeros(64))).values == 0)


def test_gaussian_fourier_pair():
    g = GridSpec(1, 40.0, 512)
    x = g.points[..., 0]
    F = forward_transform(spatial_field(g, np.exp(-x ** 2 / 2))).values
    xi = g.axis_frequencies
    exact = math.sqrt(2 * math.pi) * np.exp(-xi ** 2 / 2)
    inner = np.abs(xi) <= 5
    assert np.max(np.abs(F[inner] - exact[inner]) / exact[inner]) < 1e-10
    # beyond |xi| = 5 the exact value drops below the rounding floor, so the
    # error is measured against the peak
    band = np.abs(xi) <= 10
    assert np.max(np.abs(F[band] - exact[band])) < 1e-10 * exact.max()


@pytest.mark.parametrize("dim,L,N", [(1, 10.0, 32), (2, 6.0, 16), (3, 4.0, 8)])
def test_constant_is_dc_only(dim, L, N):
    g = GridSpec(dim, L, N)
    F = forward_transform(spatial_field(g, np.ones(g.shape))).values
    assert F.flat[0] == pytest.approx(L ** dim, rel=1e-12)
    rest = np.abs(F).ravel()[1:]
    assert rest.max() < 1e-12 * L ** dim


@given(st.integers(0, 2 ** 31 - 1), st.sampled_from([(1, 64), (2, 16), (3, 8)]))
def test_round_trip(seed, shape):
    dim, N = shape
    g = GridSpec(dim, 5.0, N)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    back = inverse_transform(forward_transform(spatial_field(g, v))).values
    assert np.linalg.norm(back - v) <= 1e-12 * np.linalg.norm(v)


@pytest.mark.parametrize("k", [1, 5, -7, 31])
def test_single_mode_inverts_to_exponential(k):
    g = GridSpec(1, 12.0, 64)
    F = np.zeros(64, dtype=complex)
    F[k % 64] = g.extent
    f = inverse_transform(spectral_field(g, F)).values
    x = g.axis
    assert np.max(np.abs(f - np.exp(1j * x * 2 * math.pi * k / g.extent))) < 1e-12


def test_wrong_representation_is_usage_error():
    g = GridSpec(1, 1.0, 8)
    with pytest.raises(UsageError):
        forward_transform(spectral_field(g, np.zeros(8)))
    with pytest.raises(UsageError):
        inverse_transform(spatial_field(g, np.zeros(8)))
    with pytest.raises(UsageError):
        lp_norm(spectral_field(g, np.zeros(8)), 2)


def test_gaussian_self_convolution():
    g = GridSpec(1, 40.0, 512)
    x = g.points[..., 0]
    f = spatial_field(g, np.exp(-x ** 2 / 2))
    c = convolve(f, f).values
    assert np.max(np.abs(c - math.sqrt(math.pi) * np.exp(-x ** 2 / 4))) < 1e-12


def test_convolve_with_delta_is_identity():
    g = GridSpec(1, 8.0, 64)
    rng = np.random.default_rng(1)
    f = spatial_field(g, rng.standard_normal(64))
    d = np.zeros(64)
    d[g.zero_index()] = 1 / g.cell_measure
    c = convolve(f, spatial_field(g, d)).values
    assert np.max(np.abs(c - f.values)) < 1e-12


def test_convolve_grid_mismatch():
    a = spatial_field(GridSpec(1, 1.0, 8), np.zeros(8))
    b = spatial_field(GridSpec(1, 2.0, 8), np.zeros(8))
    with pytest.raises(UsageError):
        convolve(a, b)


def test_lp_norm_values():
    g = GridSpec(1, 40.0, 512)
    x = g.points[..., 0]
    f = spatial_field(g, np.exp(-x ** 2 / 2))
    assert lp_norm(f, 1) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-12)
    assert lp_norm(f, math.inf) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        lp_norm(f, 0)


@given(st.integers(0, 2 ** 31 - 1))
def test_plancherel(seed):
    g = GridSpec(2, 7.0, 16)
    rng = np.random.default_rng(seed)
    f = spatial_field(g, rng.standard_normal(g.shape))
    assert spectral_l2_norm(f.spectral()) == pytest.approx(lp_norm(f, 2), rel=1e-12)


@given(st.integers(0, 2 ** 31 - 1), st.floats(0.3, 4.0))
def test_lp_norm_homogeneous(seed, c):
    g = GridSpec(1, 3.0, 32)
    f = spatial_field(g, np.random.default_rng(seed).standard_normal(32))
    for p in (0.5, 1, 2, math.inf):
        assert lp_norm(c * f, p) == pytest.approx(c * lp_norm(f, p), rel=1e-12)


def test_dyadic_shift_moves_indices(grid1):
    rng = np.random.default_rng(3)
    f = bandlimited(grid1, rng, 0.5, 2.0)
    up = dyadic_shift(f, 2)
    F, U = f.spectral().values, up.spectral().values
    idx = grid1.axis_indices
    m = np.flatnonzero(np.abs(F) > 1e-8)
    assert np.allclose(U[(4 * idx[m]) % grid1.samples], F[m] / 4, rtol=0, atol=1e-12)
    back = dyadic_shift(up, -2)
    assert np.allclose(back.spatial().values, f.values, atol=1e-12)


def test_dyadic_shift_refuses_fractional_indices(grid1):
    f = bandlimited(grid1, np.random.default_rng(0), 0.5, 2.0)
    with pytest.raises(ConfigurationError):
        dyadic_shift(f, -1)


def test_dilate_field_rescales_torus():
    g = GridSpec(1, 16.0, 64)
    f = spatial_field(g, np.sin(2 * math.pi * g.axis / 16))
    d = dilate_field(f, 1)
    assert d.grid.extent == 8.0
    assert np.array_equal(d.values, f.values)
    assert lp_norm(d, 2) == pytest.approx(lp_norm(f, 2) / math.sqrt(2), rel=1e-14)
