import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpkit.corpus import FAMILIES, CorpusSpec, generate
from lpkit.errors import ConfigurationError
from lpkit.grid import GridSpec, lp_norm
from lpkit.lp_analysis import q_hat

G = GridSpec(1, 64.0, 1024)


@pytest.mark.parametrize("family", FAMILIES)
def test_families_are_real_and_deterministic(family):
    a = generate(CorpusSpec(family, seed=3), G)
    b = generate(CorpusSpec(family, seed=3), G)
    assert len(a) == len(b) > 0
    for x, y in zip(a, b):
        assert np.array_equal(x.values, y.values)
        assert np.all(np.isreal(x.values))


@pytest.mark.parametrize("family", [f for f in FAMILIES if f != "spike"])
def test_mean_zero(family):
    for f in generate(CorpusSpec(family), G):
        assert abs(f.spectral().values[0]) < 1e-12 * max(lp_norm(f, 1), 1e-300)


def test_unknown_family():
    with pytest.raises(ConfigurationError):
        CorpusSpec("nosuch")


def test_gaussian_family_shape():
    fs = generate(CorpusSpec("gaussian", {"widths": (2.0,)}), G)
    x = G.axis
    expect = np.exp(-x ** 2 / 8)
    expect = expect - expect.mean()  # zero frequency removed
    assert np.max(np.abs(fs[0].values - expect)) < 1e-12


def test_modulated_default_corpus():
    fs = generate(CorpusSpec("modulated_gaussian"), G)
    assert len(fs) == 20
    # envelope width cycles / freq, carrier cos(freq x)
    f = generate(CorpusSpec("modulated_gaussian", {"freqs": (4.0,), "cycles": 8.0}), G)[0]
    x = G.axis
    assert np.max(np.abs(f.values - np.exp(-(x * 4 / 8) ** 2 / 2) * np.cos(4 * x))) < 1e-12


def test_nyquist_guards():
    with pytest.raises(ConfigurationError):
        generate(CorpusSpec("modulated_gaussian", {"freqs": (45.0,)}), G)
    with pytest.raises(ConfigurationError):
        generate(CorpusSpec("gaussian", {"widths": (0.05,)}), G)
    with pytest.raises(ConfigurationError):
        generate(CorpusSpec("random_bandlimited", {"band": (1.0, 80.0)}), G)
    with pytest.raises(ConfigurationError):
        generate(CorpusSpec("random_bandlimited", {"band": (5.0, 1.0)}), G)


def test_random_band_respected():
    for f in generate(CorpusSpec("random_bandlimited", {"band": (1.0, 4.0), "count": 3}), G):
        F = np.abs(f.spectral().values)
        out = (G.radius < 1.0) | (G.radius > 4.0)
        assert F[out].max() < 1e-12 * F.max()


def test_random_refines_with_grid():
    # the same draw on a grid with twice the samples
    spec = CorpusSpec("random_bandlimited", {"band": (0.5, 8.0), "count": 2}, seed=9)
    fine = GridSpec(1, 64.0, 2048)
    a, b = generate(spec, G), generate(spec, fine)
    for x, y in zip(a, b):
        assert np.max(np.abs(x.values - y.values[::2])) < 1e-12


def test_single_block_support():
    fs = generate(CorpusSpec("single_block", {"scales": (-1, 2), "count": 2}), G)
    assert len(fs) == 4
    for f, j in zip(fs, (-1, -1, 2, 2)):
        F = np.abs(f.spectral().values)
        assert F[q_hat(G.radius, j) == 0].max() < 1e-12 * F.max()


def test_dilate_ladder_is_exact_dilation():
    fs = generate(CorpusSpec("dilate_ladder", {"ks": (0, 1)}), G)
    F0, F1 = fs[0].spectral().values, fs[1].spectral().values
    idx = np.flatnonzero(np.abs(F0) > 1e-12)
    assert np.allclose(F1[(2 * idx) % G.samples], F0[idx] / 2, atol=1e-13)


def test_spike():
    f = generate(CorpusSpec("spike"), G)[0]
    assert lp_norm(f, 1) == pytest.approx(1.0)
    assert f.values[G.zero_index()] == 1 / G.cell_measure
    with pytest.raises(ConfigurationError):
        generate(CorpusSpec("spike", {"at": (1, 2)}), G)


@given(st.integers(0, 2 ** 32 - 1))
def test_seeds_differ(seed):
    a = generate(CorpusSpec("random_bandlimited", {"count": 1}, seed), G)[0]
    b = generate(CorpusSpec("random_bandlimited", {"count": 1}, seed + 1), G)[0]
    assert not np.array_equal(a.values, b.values)
