"""Periodic n-dimensional sampled functions and their spectral transforms.

Every function lives on the torus ``[-L/2, L/2)^n`` sampled at ``N`` points
per axis.  Spectra are stored in numpy FFT order and normalised so that the
value at the lattice frequency ``xi_k = 2*pi*k/L`` approximates the continuum
Fourier transform ``int f(x) exp(-i x.xi) dx``.  With that normalisation the
convolution of two fields is the pointwise product of their spectra, exactly.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, DomainError, UsageError

__all__ = [
    "GridSpec",
    "Representation",
    "SampledField",
    "forward_transform",
    "inverse_transform",
    "convolve",
    "lp_norm",
    "spectral_l2_norm",
    "spatial_field",
    "spectral_field",
    "dyadic_shift",
    "dilate_field",
]


class Representation(str, enum.Enum):
    SPATIAL = "spatial"
    SPECTRAL = "spectral"


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid with ``samples`` points per axis.

    Parameters
    ----------
    dim : int
        Ambient dimension ``n`` (1, 2 or 3).
    extent : float
        Side length ``L`` of the torus.
    samples : int
        Points per axis, a power of two and at least 4.
    """

    dim: int
    extent: float
    samples: int

    def __post_init__(self):
        if not (1 <= int(self.dim) <= 3):
            raise DomainError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not self.extent > 0:
            raise DomainError(f"extent must be positive, got {self.extent}")
        n = int(self.samples)
        if n < 4 or n & (n - 1):
            raise DomainError(f"samples must be a power of two >= 4, got {self.samples}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "extent", float(self.extent))
        object.__setattr__(self, "samples", n)

    @property
    def shape(self) -> tuple:
        return (self.samples,) * self.dim

    @property
    def spacing(self) -> float:
        return self.extent / self.samples

    @property
    def cell_measure(self) -> float:
        return self.spacing ** self.dim

    @property
    def spectral_cell(self) -> float:
        return (2 * np.pi / self.extent) ** self.dim

    @property
    def volume(self) -> float:
        return self.extent ** self.dim

    @property
    def nyquist(self) -> float:
        return np.pi * self.samples / self.extent

    @property
    def lowest_mode(self) -> float:
        return 2 * np.pi / self.extent

    @property
    def max_radius(self) -> float:
        """Largest ``|xi|`` on the lattice (a corner of the frequency cube)."""
        return self.nyquist * np.sqrt(self.dim)

    def as_dict(self) -> dict:
        return {"dim": self.dim, "extent": self.extent, "samples": self.samples}

    # coordinates ---------------------------------------------------------

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.extent / 2 + self.spacing * np.arange(self.samples)

    @cached_property
    def axis_indices(self) -> np.ndarray:
        """Integer wavenumbers per axis, in FFT order."""
        return np.fft.fftfreq(self.samples, d=1.0 / self.samples).astype(np.int64)

    @cached_property
    def axis_frequencies(self) -> np.ndarray:
        return 2 * np.pi / self.extent * self.axis_indices

    @cached_property
    def points(self) -> np.ndarray:
        """Sample coordinates, shape ``shape + (dim,)``."""
        return np.stack(np.meshgrid(*([self.axis] * self.dim), indexing="ij"), axis=-1)

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Lattice frequencies, shape ``shape + (dim,)`` in FFT order."""
        grids = np.meshgrid(*([self.axis_frequencies] * self.dim), indexing="ij")
        return np.stack(grids, axis=-1)

    @cached_property
    def radius(self) -> np.ndarray:
        """``|xi|`` at every lattice point."""
        return np.sqrt(np.sum(self.frequencies ** 2, axis=-1))

    @cached_property
    def _phase(self) -> np.ndarray:
        # (-1)^(k_1+...+k_n) accounts for the grid starting at -L/2
        k = np.meshgrid(*([self.axis_indices] * self.dim), indexing="ij")
        parity = np.sum(k, axis=0) % 2
        return np.where(parity == 0, 1.0, -1.0)

    @cached_property
    def offset_distance(self) -> np.ndarray:
        """Periodic distance ``d(y)`` of each grid offset ``y`` (index order)."""
        o = np.arange(self.samples)
        wrapped = np.minimum(o, self.samples - o) * self.spacing
        grids = np.meshgrid(*([wrapped] * self.dim), indexing="ij")
        return np.sqrt(sum(g ** 2 for g in grids))

    @cached_property
    def centred_distance(self) -> np.ndarray:
        """``|x|`` (periodic) for each sample point, aligned with ``points``."""
        return np.fft.fftshift(self.offset_distance)

    def zero_index(self) -> tuple:
        """Index of the sample at ``x = 0``."""
        return (self.samples // 2,) * self.dim


@dataclass(frozen=True, eq=False)
class SampledField:
    grid: GridSpec
    values: np.ndarray
    representation: Representation = Representation.SPATIAL

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.size != self.grid.samples ** self.grid.dim:
            raise UsageError(
                f"expected {self.grid.samples ** self.grid.dim} values, got {vals.size}"
            )
        object.__setattr__(self, "values", vals.reshape(self.grid.shape))
        object.__setattr__(self, "representation", Representation(self.representation))

    @property
    def is_spatial(self) -> bool:
        return self.representation is Representation.SPATIAL

    def spatial(self) -> "SampledField":
        return self if self.is_spatial else inverse_transform(self)

    def spectral(self) -> "SampledField":
        return forward_transform(self) if self.is_spatial else self

    def with_values(self, values) -> "SampledField":
        return SampledField(self.grid, values, self.representation)

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def __add__(self, other):
        _require_same_grid(self, other)
        if self.representation is not other.representation:
            other = other.spatial() if self.is_spatial else other.spectral()
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        return self + (-1.0) * other


def spatial_field(grid: GridSpec, values) -> SampledField:
    return SampledField(grid, values, Representation.SPATIAL)


def spectral_field(grid: GridSpec, values) -> SampledField:
    return SampledField(grid, values, Representation.SPECTRAL)


def _require_same_grid(f: SampledField, g: SampledField):
    if f.grid != g.grid:
        raise UsageError(f"grid mismatch: {f.grid} vs {g.grid}")


def forward_transform(f: SampledField) -> SampledField:
    """Continuum-normalised DFT of a spatial field."""
    if not f.is_spatial:
        raise UsageError("forward_transform expects a spatial field")
    g = f.grid
    vals = np.fft.fftn(f.values) * (g.cell_measure * g._phase)
    return spectral_field(g, vals)


def inverse_transform(F: SampledField) -> SampledField:
    """Exact inverse of :func:`forward_transform`."""
    if F.is_spatial:
        raise UsageError("inverse_transform expects a spectral field")
    g = F.grid
    vals = np.fft.ifftn(F.values * g._phase) / g.cell_measure
    return spatial_field(g, vals)


def convolve(f: SampledField, g: SampledField) -> SampledField:
    """Periodic convolution ``f * g``, returned in spatial form."""
    _require_same_grid(f, g)
    prod = f.spectral().values * g.spectral().values
    return inverse_transform(spectral_field(f.grid, prod))


def _power_sum_norm(a: np.ndarray, p: float, measure: float) -> float:
    a = np.abs(a)
    if np.isinf(p):
        return float(a.max(initial=0.0))
    return float((np.sum(a ** p) * measure) ** (1.0 / p))


def lp_norm(f: SampledField, p: float) -> float:
    """``(sum |f|^p * cell)^(1/p)``; ``max |f|`` for ``p = inf``.

    For ``0 < p < 1`` this is the usual quasi-norm power sum.
    """
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    if not f.is_spatial:
        raise UsageError("lp_norm expects a spatial field")
    return _power_sum_norm(f.values, p, f.grid.cell_measure)


def spectral_l2_norm(F: SampledField) -> float:
    """L2 norm computed on the spectral side (Plancherel)."""
    if F.is_spatial:
        raise UsageError("spectral_l2_norm expects a spectral field")
    g = F.grid
    total = np.sum(np.abs(F.values) ** 2) * g.spectral_cell / (2 * np.pi) ** g.dim
    return float(np.sqrt(total))


def dyadic_shift(f: SampledField, k: int, tol: float = 1e-13) -> SampledField:
    """Same-grid field with spectrum ``2^{-kn} f_hat(2^{-k} xi)`` (lattice index shift).

    For ``k < 0`` every spectral index of ``f`` (entries above ``tol`` times
    the peak) must be divisible by ``2^|k|``; for ``k > 0`` the shifted
    indices must stay below Nyquist.  Otherwise a configuration error.

    The result is ``2^{-kn} f(2^k x)`` on the same torus.  Periodic ``L^p``
    averages do not see the dilation, so homogeneous norms scale by
    ``2^{k(alpha - n)}`` for every ``p``; use :func:`dilate_field` for the
    rescaled-torus law.
    """
    g = f.grid
    F = f.spectral().values
    peak = np.abs(F).max(initial=0.0)
    out = np.zeros(g.shape, dtype=complex)
    if peak == 0:
        return spectral_field(g, out)
    support = np.argwhere(np.abs(F) > tol * peak)
    ints = g.axis_indices[support]
    if k >= 0:
        new = ints * 2 ** k
    else:
        if np.any(ints % 2 ** (-k)):
            raise ConfigurationError(f"spectrum not divisible by 2^{-k}; cannot shift by {k}")
        new = ints // 2 ** (-k)
    if np.any(new >= g.samples // 2) or np.any(new < -(g.samples // 2)):
        raise ConfigurationError(f"shift by {k} pushes the spectrum past Nyquist")
    scale = 2.0 ** (-k * g.dim)
    out[tuple((new % g.samples).T)] = scale * F[tuple(support.T)]
    return spectral_field(g, out)


def dilate_field(f: SampledField, k: int) -> SampledField:
    """``x -> f(2^k x)`` as the same samples on the torus of side ``2^-k L``."""
    g = f.grid
    return spatial_field(GridSpec(g.dim, g.extent * 2.0 ** (-k), g.samples), f.spatial().values)
