"""Peetre, variant, Hardy-Littlewood and smooth maximal functions on the grid."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .grid import SampledField, inverse_transform, spatial_field, spectral_field
from .kernels import KernelSpec

__all__ = [
    "MaximalParams",
    "PeetreResult",
    "peetre_maximal",
    "peetre_maximal_certified",
    "variant_maximal",
    "hl_maximal",
    "smooth_maximal",
    "default_tgrid",
    "default_lambda",
]

# offsets whose weight falls below this fraction are dropped only if the
# running sup is itself zero somewhere
SKIP_FLOOR = 1e-14


def default_lambda(dim: int, p: float, q: float = math.inf) -> float:
    """``max(n/p, n/q) + 1``."""
    return max(dim / p, dim / q) + 1.0


def default_tgrid(jmin: int, jmax: int, per_octave: int = 8) -> np.ndarray:
    """``t = 2^(i/per_octave)`` spanning ``[2^-jmax, 2^-jmin]``."""
    if per_octave < 1:
        raise DomainError("per_octave must be >= 1")
    i = np.arange(-jmax * per_octave, -jmin * per_octave + 1)
    return 2.0 ** (i / per_octave)


@dataclass(frozen=True)
class MaximalParams:
    lam: float
    m: float = 0.0
    tgrid: Optional[tuple] = None

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        if self.tgrid is not None:
            t = np.asarray(self.tgrid, dtype=float)
            if t.size == 0 or np.any(t <= 0):
                raise DomainError("tgrid must be nonempty and positive")
            if t.size > 1:
                r = t[1:] / t[:-1]
                if np.any(r <= 1) or np.any(r > 2 ** (1 / 8) * (1 + 1e-12)):
                    raise DomainError("tgrid must increase with ratio at most 2^(1/8)")
            object.__setattr__(self, "tgrid", tuple(float(v) for v in t))


@dataclass(frozen=True, eq=False)
class PeetreResult:
    field: SampledField
    offsets_used: int
    skipped_bound: float


def _offset_order(grid):
    """Offset index tuples sorted by periodic distance (stable)."""
    d = grid.offset_distance.ravel()
    order = np.argsort(d, kind="stable")
    return order, d[order]


def peetre_maximal_certified(block: SampledField, j: float, lam: float,
                             exhaustive: bool = False) -> PeetreResult:
    """``max_y |block(x - y)| / (1 + 2^j d(y))^lam`` with a pruning certificate.

    Offsets are visited in order of increasing distance.  Once the weight
    times ``max |block|`` cannot exceed the running sup anywhere, the rest
    are skipped; the result is then the exact grid sup.  ``skipped_bound``
    records the largest contribution any skipped offset could make.
    """
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    grid = block.grid
    a = np.abs(block.spatial().values)
    top = float(a.max(initial=0.0))
    out = a.copy()
    if top == 0.0:
        return PeetreResult(spatial_field(grid, out), 1, 0.0)
    order, dist = _offset_order(grid)
    weights = (1.0 + 2.0 ** j * dist) ** (-lam)
    shape = grid.shape
    used = 1
    skipped = 0.0
    for idx in range(1, order.size):
        w = weights[idx]
        if not exhaustive:
            floor = out.min()
            if w * top <= floor or (floor == 0.0 and w < SKIP_FLOOR):
                skipped = float(w * top)
                break
        shift = np.unravel_index(order[idx], shape)
        np.maximum(out, w * np.roll(a, shift, axis=tuple(range(grid.dim))), out=out)
        used += 1
    return PeetreResult(spatial_field(grid, out), used, skipped)


def peetre_maximal(block: SampledField, j: float, lam: float) -> SampledField:
    """Peetre maximal function ``psi*_j f`` of a block ``psi_j * f``."""
    return peetre_maximal_certified(block, j, lam).field


def variant_maximal(f: SampledField, k, j: int, lam: float, m: float, kmax: int) -> SampledField:
    """``sup_{k' in [j, kmax], y} |psi_k' * f(y)| 2^((j-k')m) / (1 + 2^j |x-y|)^lam``."""
    from .lp_analysis import dyadic_block

    if kmax < j:
        raise DomainError(f"kmax={kmax} below j={j}")
    out = None
    for kk in range(j, kmax + 1):
        pm = peetre_maximal(dyadic_block(f, kk, k), j, lam).values.real
        pm = pm * 2.0 ** ((j - kk) * m)
        out = pm if out is None else np.maximum(out, pm)
    return spatial_field(f.grid, out)


def _hl_radii(grid) -> list:
    radii, r = [], grid.spacing
    while r <= grid.extent / 2 * (1 + 1e-12):
        radii.append(r)
        r *= 2
    return radii


def hl_maximal(g: SampledField) -> SampledField:
    """Centred maximal average of ``|g|`` over periodic balls of dyadic radii."""
    grid = g.grid
    a = np.abs(g.spatial().values)
    A = np.fft.fftn(a)
    d = grid.offset_distance
    out = a.copy()  # average over the trivial ball {x}
    for R in _hl_radii(grid):
        ball = (d <= R * (1 + 1e-12)).astype(float)
        avg = np.fft.ifftn(A * np.fft.fftn(ball)).real / ball.sum()
        np.maximum(out, avg, out=out)
    return spatial_field(grid, out)


def smooth_maximal(g: SampledField, phi: KernelSpec, tgrid: Sequence[float]) -> SampledField:
    """``max_{t in tgrid} |phi_t * g|`` with ``phi_t_hat(xi) = phi_hat(t xi)``."""
    grid = g.grid
    G = g.spectral().values
    out = np.zeros(grid.shape)
    for t in tgrid:
        v = inverse_transform(spectral_field(grid, G * phi.on_lattice(grid, float(t)))).values
        np.maximum(out, np.abs(v), out=out)
    return spatial_field(grid, out)
