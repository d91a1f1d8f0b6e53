"""Deterministic test-function families.

Random draws use numpy's PCG64 generator seeded from ``CorpusSpec.seed``.
Coefficients are drawn in lexicographic order of the integer wavenumbers,
so the same spec on a finer grid of the same extent yields the same
function.  Every family except ``spike`` has its zero frequency removed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .grid import (GridSpec, SampledField, dyadic_shift, inverse_transform, spatial_field,
                   spectral_field)
from .lp_analysis import q_hat

__all__ = ["FAMILIES", "CorpusSpec", "generate"]

FAMILIES = ("gaussian", "modulated_gaussian", "dilate_ladder", "random_bandlimited",
            "single_block", "spike")

# spectral tails beyond this many standard deviations are below 1e-7
TAIL_SD = 6.0


@dataclass(frozen=True)
class CorpusSpec:
    """Family name, its parameters and the seed.

    Parameters by family (defaults in brackets):

    * ``gaussian``: ``widths`` [0.5, 1, 2, 4]
    * ``modulated_gaussian``: ``freqs`` [2^u, u = -2..4.75 in 20 steps], ``cycles`` [8]
    * ``dilate_ladder``: ``ks`` [-2..2], ``freq`` [1], ``cycles`` [3]
    * ``random_bandlimited``: ``band`` [(0.5, 8)], ``count`` [4]
    * ``single_block``: ``scales`` [(0,)], ``count`` [1]
    * ``spike``: ``at`` [centre index]
    """

    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown corpus family {self.family!r}")

    def as_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "seed": self.seed}


def generate(spec: CorpusSpec, grid: GridSpec) -> list:
    """Build the list of fields described by ``spec`` on ``grid``."""
    return _BUILDERS[spec.family](grid, spec.params, spec.seed)


def _zero_dc(F: np.ndarray) -> np.ndarray:
    F = F.copy()
    F.flat[0] = 0.0
    return F


def _real_field(grid: GridSpec, F: np.ndarray) -> SampledField:
    f = inverse_transform(spectral_field(grid, _zero_dc(F)))
    return spatial_field(grid, f.values.real)


def _gaussian_hat(xi, width, centre=None):
    n = xi.shape[-1]
    d = xi if centre is None else xi - centre
    return (math.sqrt(2 * math.pi) * width) ** n * np.exp(-0.5 * width ** 2 * np.sum(d ** 2, -1))


def _modulated_hat(xi, freq, cycles):
    s = cycles / freq
    e = np.zeros(xi.shape[-1])
    e[0] = freq
    return 0.5 * (_gaussian_hat(xi, s, e) + _gaussian_hat(xi, s, -e))


def _gaussians(grid, params, seed):
    out = []
    for w in params.get("widths", (0.5, 1.0, 2.0, 4.0)):
        if TAIL_SD / w > grid.nyquist:
            raise ConfigurationError(f"gaussian width {w} is not resolved below Nyquist")
        out.append(_real_field(grid, _gaussian_hat(grid.frequencies, float(w))))
    return out


def _default_freqs():
    return tuple(2.0 ** u for u in np.linspace(-2.0, 4.75, 20))


def _modulated(grid, params, seed):
    cycles = float(params.get("cycles", 8.0))
    out = []
    for w in params.get("freqs", _default_freqs()):
        w = float(w)
        if w * (1 + TAIL_SD / cycles) > grid.nyquist:
            raise ConfigurationError(f"modulation {w:g} with {cycles:g} cycles exceeds Nyquist")
        out.append(_real_field(grid, _modulated_hat(grid.frequencies, w, cycles)))
    return out


def _ladder(grid, params, seed):
    ks = [int(k) for k in params.get("ks", range(-2, 3))]
    freq = float(params.get("freq", 1.0))
    cycles = float(params.get("cycles", 3.0))
    K = max(abs(k) for k in ks)
    idx = grid.axis_indices
    step = 2 ** K
    # base lives on indices divisible by 2^K and below Nyquist / 2^max(k)
    kmax = max(max(ks), 0)
    lim = (grid.samples // 2) // 2 ** kmax
    keep1 = (idx % step == 0) & (np.abs(idx) < lim)
    keep = np.ones(grid.shape, dtype=bool)
    for axis in range(grid.dim):
        shape = [1] * grid.dim
        shape[axis] = grid.samples
        keep &= keep1.reshape(shape)
    base = np.where(keep, _modulated_hat(grid.frequencies, freq, cycles), 0.0)
    base = _zero_dc(base)
    f0 = spectral_field(grid, base)
    return [spatial_field(grid, dyadic_shift(f0, k, tol=0.0).spatial().values.real) for k in ks]


def _canonical_modes(grid: GridSpec, lo: float, hi: float) -> np.ndarray:
    """Integer wavenumbers with ``lo <= |xi| <= hi`` in lexicographic order."""
    if hi > grid.nyquist:
        raise ConfigurationError(f"band edge {hi:g} exceeds Nyquist {grid.nyquist:g}")
    if lo > hi:
        raise ConfigurationError(f"empty band ({lo:g}, {hi:g})")
    M = int(math.floor(hi / grid.lowest_mode))
    ax = np.arange(-M, M + 1)
    ints = np.stack(np.meshgrid(*([ax] * grid.dim), indexing="ij"), -1).reshape(-1, grid.dim)
    rad = grid.lowest_mode * np.sqrt(np.sum(ints ** 2, -1))
    ints = ints[(rad >= lo) & (rad <= hi)]
    ints = ints[np.all(ints < grid.samples // 2, axis=1)]
    return ints


def _random_spectrum(grid, rng, modes) -> np.ndarray:
    c = rng.standard_normal((len(modes), 2)) @ np.array([1.0, 1j])
    F = np.zeros(grid.shape, dtype=complex)
    pos = tuple((modes % grid.samples).T)
    F[pos] = c * grid.volume / math.sqrt(max(len(modes), 1))
    # Hermitian part gives a real field
    neg = tuple(np.stack([(-a) % grid.samples for a in pos]))
    G = np.zeros_like(F)
    G[neg] = np.conj(F[pos])
    return 0.5 * (F + G)


def _random(grid, params, seed):
    lo, hi = (float(v) for v in params.get("band", (0.5, 8.0)))
    count = int(params.get("count", 4))
    rng = np.random.default_rng(seed)
    modes = _canonical_modes(grid, lo, hi)
    return [_real_field(grid, _random_spectrum(grid, rng, modes)) for _ in range(count)]


def _single_block(grid, params, seed):
    scales = [int(j) for j in params.get("scales", (0,))]
    count = int(params.get("count", 1))
    rng = np.random.default_rng(seed)
    out = []
    for j in scales:
        modes = _canonical_modes(grid, 2.0 ** (j - 1), 2.0 ** (j + 1))
        for _ in range(count):
            F = _random_spectrum(grid, rng, modes) * q_hat(grid.radius, j)
            out.append(_real_field(grid, F))
    return out


def _spike(grid, params, seed):
    at = tuple(params.get("at", grid.zero_index()))
    if len(at) != grid.dim:
        raise ConfigurationError(f"spike position needs {grid.dim} indices")
    v = np.zeros(grid.shape)
    v[tuple(int(a) % grid.samples for a in at)] = 1.0 / grid.cell_measure
    return [spatial_field(grid, v)]


_BUILDERS = {
    "gaussian": _gaussians,
    "modulated_gaussian": _modulated,
    "dilate_ladder": _ladder,
    "random_bandlimited": _random,
    "single_block": _single_block,
    "spike": _spike,
}
