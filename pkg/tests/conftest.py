import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lpkit.grid import GridSpec, inverse_transform, spatial_field, spectral_field
from lpkit.lp_analysis import build_lp_family

settings.register_profile(
    "lpkit", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.function_scoped_fixture, HealthCheck.too_slow],
)
settings.load_profile("lpkit")


@pytest.fixture(scope="session")
def grid1():
    return GridSpec(1, 64.0, 1024)


@pytest.fixture(scope="session")
def family1(grid1):
    return build_lp_family(grid1, -4, 6)


@pytest.fixture(scope="session")
def grid2():
    return GridSpec(2, 32.0, 256)


@pytest.fixture(scope="session")
def small1():
    return GridSpec(1, 16.0, 128)


def bandlimited(grid, rng, lo, hi, real=True):
    """Random field with spectrum on ``lo <= |xi| <= hi`` (zero DC)."""
    F = np.zeros(grid.shape, dtype=complex)
    band = (grid.radius >= lo) & (grid.radius <= hi)
    F[band] = rng.standard_normal(band.sum()) + 1j * rng.standard_normal(band.sum())
    F *= grid.volume / np.sqrt(max(band.sum(), 1))
    f = inverse_transform(spectral_field(grid, F))
    return spatial_field(grid, f.values.real if real else f.values)
