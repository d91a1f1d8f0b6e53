import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import bandlimited
from lpkit.errors import CapabilityError, ConfigurationError, DomainError, PreconditionError
from lpkit.grid import GridSpec, inverse_transform, lp_norm, spatial_field, spectral_field
from lpkit.kernels import make_fractional_poisson, make_gaussian_derivative, make_zero
from lpkit.lp_analysis import (
    Polynomial,
    build_calderon_pair,
    build_lp_family,
    calderon_partial_sum,
    dyadic_block,
    multiplier,
    polynomial_correction,
    q_hat,
    reconstruct,
    resolve_kernel,
    smoothstep,
)

radii = st.floats(1e-3, 1e3, allow_nan=False)


@given(st.floats(0, 1))
def test_smoothstep_symmetry(t):
    assert smoothstep(t) + smoothstep(1 - t) == pytest.approx(1.0, abs=1e-14)


def test_smoothstep_flat_ends():
    for t0 in (0.0, 1.0):
        h = 1e-3
        pts = np.clip(t0 + h * np.array([-1, 1]), 0, 1)
        # fourth-order contact: change is 35 h^4 at most
        assert np.ptp(smoothstep(pts)) <= 35.0001 * h ** 4
    assert smoothstep(-1.0) == 0 and smoothstep(2.0) == 1


def test_q_hat_values():
    assert q_hat(1.0, 0) == 1.0
    assert q_hat(math.sqrt(2), 0) == pytest.approx(1 / math.sqrt(2))
    assert q_hat(math.sqrt(2), 1) == pytest.approx(1 / math.sqrt(2))
    assert q_hat(0.5, 0) == 0 and q_hat(2.0, 0) == 0 and q_hat(0.0, 0) == 0


@given(radii, st.integers(-5, 5))
def test_q_hat_dilation(rho, j):
    assert q_hat(2.0 * rho, j + 1) == pytest.approx(q_hat(rho, j), abs=1e-14)


@given(radii)
def test_q_hat_partition_of_unity(rho):
    total = sum(q_hat(rho, j) ** 2 for j in range(-15, 16))
    assert total == pytest.approx(1.0, abs=1e-14)


@given(radii, st.integers(-5, 5))
def test_q_hat_support(rho, j):
    if not 2.0 ** (j - 1) < rho < 2.0 ** (j + 1):
        assert q_hat(rho, j) == 0


def test_family_partition_residual(family1):
    assert family1.partition_residual() < 1e-14
    lo, hi = family1.covered_annulus
    assert (lo, hi) == (2.0 ** -4, 2.0 ** 6)


def test_family_window_validation(grid1):
    with pytest.raises(ConfigurationError):
        build_lp_family(grid1, 3, 2)
    with pytest.raises(ConfigurationError):
        build_lp_family(grid1, -4, 8)  # above Nyquist (~50)
    with pytest.raises(ConfigurationError):
        build_lp_family(grid1, -8, 2)  # below the lowest mode (~0.098)


def test_resolve_kernel(grid1, family1):
    assert resolve_kernel("lp", grid1, family1) is family1
    with pytest.raises(ConfigurationError):
        resolve_kernel("lp", grid1)
    assert resolve_kernel("poisson:beta=1", grid1).name == "poisson:beta=1"


def test_family_kernel_symbol_matches_table(grid1, family1):
    k = family1.kernel()
    assert np.allclose(k.on_lattice(grid1), family1.table(0))
    assert np.allclose(multiplier(k, grid1, 3), family1.table(3))
    assert k.band_limited


def test_multiplier_grid_mismatch(family1):
    with pytest.raises(ConfigurationError):
        multiplier(family1, GridSpec(1, 32.0, 512), 0)


def test_partial_sum_recovers_bandlimited(grid1, family1):
    rng = np.random.default_rng(5)
    f = bandlimited(grid1, rng, 2.0 ** -1, 2.0 ** 3)
    out = calderon_partial_sum(f, family1, -2, 3)
    assert np.max(np.abs(out.values - f.values)) < 1e-13 * np.max(np.abs(f.values))


@given(st.integers(-5, 3), st.integers(1, 3), st.integers(1, 3))
def test_partial_sums_telescope(N, a, b):
    grid = GridSpec(1, 64.0, 1024)
    fam = build_lp_family(grid, -4, 6)
    M, P = N + a, min(N + a + b, 6)
    if M >= P:
        return
    f = bandlimited(grid, np.random.default_rng(N + 10), 0.1, 40)
    left = calderon_partial_sum(f, fam, N, M).values + calderon_partial_sum(f, fam, M, P).values
    assert np.allclose(left, calderon_partial_sum(f, fam, N, P).values, atol=1e-13)


def test_partial_sum_range_checks(grid1, family1):
    f = spatial_field(grid1, np.zeros(grid1.shape))
    for N, M in ((2, 2), (-6, 0), (0, 7)):
        with pytest.raises(ConfigurationError):
            calderon_partial_sum(f, family1, N, M)


def test_blocks_sum_to_high_pass(grid1, family1):
    f = bandlimited(grid1, np.random.default_rng(2), 0.2, 30)
    total = sum(dyadic_block(f, j, family1).values for j in family1.scales)
    # blocks are q_j * f, not q_j * q_j * f: compare in frequency with sum q_j
    F = f.spectral().values * np.sum(family1.qhat, axis=0)
    assert np.allclose(total, inverse_transform(spectral_field(grid1, F)).values, atol=1e-12)


def test_polynomial_correction_taylor_of_sine(grid1, family1):
    w = 2 * math.pi * 3 / grid1.extent  # lattice frequency, well inside phi_hat_0 = 1
    f = spatial_field(grid1, np.sin(w * grid1.axis))
    P = polynomial_correction(f, family1, 0, 3)
    expect = {(0,): 0.0, (1,): w, (2,): 0.0, (3,): -w ** 3 / 6}
    for kappa, c in expect.items():
        assert P.coefficient(kappa) == pytest.approx(c, abs=1e-13)
    assert P.degree == 3


def test_polynomial_correction_vanishes_for_high_band(grid1, family1):
    f = bandlimited(grid1, np.random.default_rng(0), 2.0 ** 2, 2.0 ** 4)
    P = polynomial_correction(f, family1, 0, 4)
    assert P.max_abs_coefficient() < 1e-13 * lp_norm(f, math.inf) * 16 ** 4
    assert P.degree == 4 or P.max_abs_coefficient() < 1e-10


def test_polynomial_correction_errors(grid1, family1):
    f = spatial_field(grid1, np.zeros(grid1.shape))
    with pytest.raises(CapabilityError):
        polynomial_correction(f, family1, 0, 7)
    with pytest.raises(DomainError):
        polynomial_correction(f, family1, 0, -1)
    with pytest.raises(ConfigurationError):
        polynomial_correction(f, family1, 7, 1)
    assert polynomial_correction(f, family1, 0, 2).degree == -1


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=5), st.floats(-2, 2))
def test_polynomial_horner_matches_powers(coeffs, x):
    P = Polynomial(1, {(i,): c for i, c in enumerate(coeffs)})
    direct = sum(c * x ** i for i, c in enumerate(coeffs))
    assert P(np.array([[x]]))[0] == pytest.approx(direct, abs=1e-12)


def test_polynomial_2d():
    P = Polynomial(2, {(1, 1): 2.0, (0, 2): -1.0, (0, 0): 0.5})
    x = np.array([[1.5, -2.0], [0.0, 1.0]])
    assert np.allclose(P(x), 2 * x[:, 0] * x[:, 1] - x[:, 1] ** 2 + 0.5)
    assert P.degree == 2


@pytest.fixture(scope="module")
def poisson_pair(family1, grid1):
    return build_calderon_pair(make_fractional_poisson(1, grid1), family1)


def test_pair_geometry(poisson_pair):
    a = 2.0 ** -0.5
    assert poisson_pair.a_lo == pytest.approx(a) and poisson_pair.a_hi == pytest.approx(a)
    assert poisson_pair.annulus == pytest.approx((a / 4, 8 * a))
    assert poisson_pair.covered_annulus == pytest.approx((2.0 ** -4 * 8 * a, 2.0 ** 6 * a / 4))


def test_pair_identity(poisson_pair):
    assert poisson_pair.identity_residual() < 1e-12
    assert poisson_pair.denominator_min() > 0


@given(st.floats(1e-2, 1e2))
def test_denominator_dilation_invariant(rho):
    fam = build_lp_family(GridSpec(1, 64.0, 1024), -4, 6)
    pair = build_calderon_pair(make_fractional_poisson(1, fam.grid), fam)
    xi = np.array([[rho], [2 * rho]])
    d = pair.denominator(xi)
    assert d[0] == pytest.approx(d[1], rel=1e-12)


@given(st.floats(1e-3, 1e3))
def test_eta_hat_support(rho):
    fam = build_lp_family(GridSpec(1, 64.0, 1024), -4, 6)
    pair = build_calderon_pair(make_fractional_poisson(1, fam.grid), fam)
    a, b = pair.annulus
    if not a < rho < b:
        assert pair.eta_hat(np.array([[rho]]))[0] == 0


def test_reconstruction_converges(grid1, poisson_pair):
    x = grid1.axis
    g = spatial_field(grid1, np.exp(-x ** 2 / 2) * np.cos(3 * x))
    errs = [reconstruct(g, poisson_pair, -4, M).relative_error for M in range(-3, 7)]
    assert all(b <= a * (1 + 1e-12) + 1e-15 for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-12
    final = reconstruct(g, poisson_pair, -4, 6)
    assert final.relative_error == pytest.approx(
        lp_norm(final.field - g, 2) / lp_norm(g, 2), abs=1e-14
    )


def test_reconstruction_errors(grid1, poisson_pair):
    g = spatial_field(grid1, np.zeros(grid1.shape))
    with pytest.raises(ConfigurationError):
        reconstruct(g, poisson_pair, 3, 3)
    with pytest.raises(ConfigurationError):
        reconstruct(g, poisson_pair, 0, 7)
    with pytest.raises(ConfigurationError):
        reconstruct(spatial_field(GridSpec(1, 32.0, 512), np.zeros(512)), poisson_pair, 0, 2)


def test_self_pair_of_lp_family(family1):
    pair = build_calderon_pair(family1, family1)
    assert pair.identity_residual() < 1e-12


def test_pair_preconditions(grid2):
    fam = build_lp_family(grid2, -2, 4)
    with pytest.raises(PreconditionError) as info:
        build_calderon_pair(make_zero(grid2), fam)
    assert info.value.witness
    with pytest.raises(PreconditionError):
        build_calderon_pair(make_gaussian_derivative((1, 0), grid2), fam)
