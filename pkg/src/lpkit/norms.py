"""Homogeneous Besov and Triebel-Lizorkin quasi-norm engines.

All engines sum over a finite scale window ``[jmin, jmax]`` and ignore the
zero frequency of the input.  Each result carries the first two and last
two per-scale terms so truncation can be judged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, PreconditionError
from .grid import GridSpec, SampledField, _power_sum_norm, inverse_transform, spectral_field
from .kernels import KernelSpec, _jsonable
from .lp_analysis import LPFamily, multiplier
from .maximal import default_lambda, default_tgrid, peetre_maximal, smooth_maximal

__all__ = [
    "NormParams",
    "DyadicCube",
    "NormResult",
    "ENGINES",
    "dyadic_cubes",
    "compute_norm",
    "besov_norm",
    "triebel_norm",
    "triebel_infinity_norm",
    "peetre_besov_norm",
    "peetre_triebel_norm",
    "hardy_besov_norm",
    "hardy_triebel_norm",
    "kernel_id",
]

PHI_ORIGIN_TOL = 1e-12
MIN_CUBE_SAMPLES = 4


@dataclass(frozen=True)
class NormParams:
    """Smoothness ``alpha``, integrability ``p``, summability ``q``, Peetre ``lam``."""

    alpha: float
    p: float
    q: float
    lam: Optional[float] = None

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if not v > 0:
                raise DomainError(f"{name} must be positive, got {v}")
        if self.lam is not None and not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        for name in ("alpha", "p", "q"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def lambda_for(self, dim: int) -> float:
        return float(self.lam) if self.lam is not None else default_lambda(dim, self.p, self.q)

    def check_peetre(self, dim: int, triebel: bool):
        lam = self.lambda_for(dim)
        if math.isinf(self.p) and math.isinf(self.q):
            need = float(dim)
        elif triebel:
            need = max(dim / self.p, dim / self.q)
        else:
            need = dim / self.p
        if not lam > need:
            raise DomainError(f"lambda={lam} must exceed {need:g}")
        return lam

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "p": self.p, "q": self.q, "lambda": self.lam}


@dataclass(frozen=True)
class DyadicCube:
    """Cube of side ``L / 2^level`` with lattice corner ``corner`` (in cube units)."""

    level: int
    corner: tuple

    def side(self, grid: GridSpec) -> float:
        return grid.extent / 2 ** self.level

    def log_side(self, grid: GridSpec) -> float:
        return math.log2(self.side(grid))

    def slices(self, grid: GridSpec) -> tuple:
        s = grid.samples >> self.level
        return tuple(slice(c * s, (c + 1) * s) for c in self.corner)


def cube_levels(grid: GridSpec) -> range:
    """Levels from the whole torus down to cubes of ``MIN_CUBE_SAMPLES`` samples."""
    top = int(math.log2(grid.samples // MIN_CUBE_SAMPLES))
    return range(0, top + 1)


def dyadic_cubes(grid: GridSpec) -> Iterator[DyadicCube]:
    for level in cube_levels(grid):
        for corner in np.ndindex(*((2 ** level,) * grid.dim)):
            yield DyadicCube(level, tuple(int(c) for c in corner))


@dataclass
class NormResult:
    engine: str
    kernel: str
    params: dict
    window: tuple
    value: float
    terms: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def tail_indicators(self) -> dict:
        return {"low": self.terms[:2], "high": self.terms[-2:]}

    def to_json(self) -> dict:
        rec = {"engine": self.engine, "kernel": self.kernel, "params": self.params,
               "window": list(self.window), "value": self.value,
               "per_scale": self.terms, "tail_indicators": self.tail_indicators}
        rec.update(self.extra)
        return _jsonable(rec)


def kernel_id(k) -> str:
    return "lp" if isinstance(k, LPFamily) else k.name


def _resolve_window(f: SampledField, k, window) -> tuple:
    if window is None:
        if isinstance(k, LPFamily):
            return (k.jmin, k.jmax)
        raise ConfigurationError("a scale window is required for this kernel")
    jmin, jmax = int(window[0]), int(window[1])
    if jmin > jmax:
        raise ConfigurationError(f"empty scale window [{jmin}, {jmax}]")
    if isinstance(k, LPFamily):
        if k.grid != f.grid:
            raise ConfigurationError("family and field live on different grids")
        if jmin < k.jmin or jmax > k.jmax:
            raise ConfigurationError(
                f"window [{jmin}, {jmax}] leaves the family window [{k.jmin}, {k.jmax}]"
            )
    elif k.dim != f.grid.dim:
        raise ConfigurationError(f"kernel is {k.dim}-d, field is {f.grid.dim}-d")
    return jmin, jmax


def _blocks(f: SampledField, k, window) -> Iterator[tuple]:
    """``(j, psi_j * f)`` with the zero frequency of ``f`` removed."""
    F = f.spectral().values.copy()
    F.flat[0] = 0.0
    for j in range(window[0], window[1] + 1):
        B = F * multiplier(k, f.grid, j)
        yield j, inverse_transform(spectral_field(f.grid, B))


def _lq(terms: Sequence[float], q: float) -> float:
    t = np.asarray(terms, dtype=float)
    if t.size == 0:
        return 0.0
    if math.isinf(q):
        return float(t.max())
    return float(np.sum(t ** q) ** (1.0 / q))


def _pointwise_lq(stack: np.ndarray, q: float) -> np.ndarray:
    if math.isinf(q):
        return stack.max(axis=0)
    return np.sum(stack ** q, axis=0) ** (1.0 / q)


def _inner_fields(engine, f, params, k, window, phi=None, tgrid=None):
    """Per-scale nonnegative fields ``2^{j alpha} |.|`` for the chosen engine."""
    dim = f.grid.dim
    if engine.startswith("peetre"):
        lam = params.check_peetre(dim, triebel=engine.endswith("triebel"))
    if engine.startswith("hardy"):
        if phi is None:
            raise ConfigurationError("hardy engines need a kernel phi")
        if abs(phi.value_at_origin()) <= PHI_ORIGIN_TOL:
            raise PreconditionError("phi must have nonzero integral")
        if tgrid is None:
            tgrid = default_tgrid(*window)
    out = []
    for j, b in _blocks(f, k, window):
        if engine.startswith("peetre"):
            v = peetre_maximal(b, j, lam).values.real
        elif engine.startswith("hardy"):
            v = smooth_maximal(b, phi, tgrid).values.real
        else:
            v = np.abs(b.values)
        out.append(2.0 ** (j * params.alpha) * v)
    return out


ENGINES = ("besov", "triebel", "triebel_infinity", "peetre_besov", "peetre_triebel",
           "hardy_besov", "hardy_triebel")


def compute_norm(engine: str, f: SampledField, params: NormParams, k, window=None, *,
                 phi: Optional[KernelSpec] = None, tgrid=None) -> NormResult:
    """Evaluate one engine and return a :class:`NormResult`."""
    if engine not in ENGINES:
        raise ConfigurationError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    window = _resolve_window(f, k, window)
    if engine == "triebel_infinity":
        return _triebel_infinity(f, params.alpha, params.q, k, window)
    if "triebel" in engine and math.isinf(params.p):
        raise DomainError("p = inf: use triebel_infinity_norm")
    g = f.grid
    fields = _inner_fields(engine, f, params, k, window, phi, tgrid)
    terms = [_power_sum_norm(v, params.p, g.cell_measure) for v in fields]
    if engine.endswith("besov"):
        value = _lq(terms, params.q)
    else:
        value = _power_sum_norm(_pointwise_lq(np.stack(fields), params.q), params.p,
                                g.cell_measure)
    return NormResult(engine, kernel_id(k), params.as_dict(), window, value, terms)


def _triebel_infinity(f, alpha, q, k, window) -> NormResult:
    grid = f.grid
    fields = [2.0 ** (j * alpha) * np.abs(b.values) for j, b in _blocks(f, k, window)]
    scales = list(range(window[0], window[1] + 1))
    stack = np.stack(fields)
    inf_q = math.isinf(q)
    if not inf_q:
        stack = stack ** q
        # suffix[i] = sum over scales i..end
        suffix = np.cumsum(stack[::-1], axis=0)[::-1]
    best, arg = 0.0, None
    for level in cube_levels(grid):
        side = grid.extent / 2 ** level
        jlo = max(window[0], math.ceil(-math.log2(side) - 1e-12))
        if jlo > window[1]:
            continue
        i0 = scales.index(jlo)
        if inf_q:
            cand = _cube_means(stack[i0:], level, grid, batch=True)
            idx = np.unravel_index(np.argmax(cand), cand.shape)
            val = float(cand[idx])
            corner = idx[1:]
        else:
            cand = _cube_means(suffix[i0], level, grid)
            idx = np.unravel_index(np.argmax(cand), cand.shape)
            val = float(cand[idx]) ** (1.0 / q)
            corner = idx
        if val > best:
            best, arg = val, DyadicCube(level, tuple(int(c) for c in corner))
    terms = [_power_sum_norm(v, math.inf, 1.0) for v in fields]
    extra = {"argmax_cube": None if arg is None else {"level": arg.level,
                                                       "corner": list(arg.corner)}}
    return NormResult("triebel_infinity", kernel_id(k), {"alpha": alpha, "q": q},
                      window, best, terms, extra)


def _cube_means(a: np.ndarray, level: int, grid: GridSpec, batch: bool = False) -> np.ndarray:
    """Means of ``a`` over all cubes of one level (leading batch axis optional)."""
    c, s, n = 2 ** level, grid.samples >> level, grid.dim
    lead = a.shape[:1] if batch else ()
    r = a.reshape(lead + sum(((c, s) for _ in range(n)), ()))
    axes = tuple(len(lead) + 2 * i + 1 for i in range(n))
    return r.mean(axis=axes)


def besov_norm(f, params, k, window=None) -> float:
    """``(sum_j (2^{j alpha} ||psi_j * f||_p)^q)^{1/q}`` over the window."""
    return compute_norm("besov", f, params, k, window).value


def triebel_norm(f, params, k, window=None) -> float:
    """``|| (sum_j (2^{j alpha} |psi_j * f|)^q)^{1/q} ||_p``, ``p < inf``."""
    return compute_norm("triebel", f, params, k, window).value


def triebel_infinity_norm(f, alpha, q, k, window=None) -> float:
    """Sup over dyadic cubes ``Q`` of the ``q``-averaged tail from ``j >= -log2 side(Q)``."""
    return compute_norm("triebel_infinity", f, NormParams(alpha, math.inf, q), k, window).value


def peetre_besov_norm(f, params, k, window=None) -> float:
    return compute_norm("peetre_besov", f, params, k, window).value


def peetre_triebel_norm(f, params, k, window=None) -> float:
    return compute_norm("peetre_triebel", f, params, k, window).value


def hardy_besov_norm(f, params, k, phi, tgrid=None, window=None) -> float:
    return compute_norm("hardy_besov", f, params, k, window, phi=phi, tgrid=tgrid).value


def hardy_triebel_norm(f, params, k, phi, tgrid=None, window=None) -> float:
    return compute_norm("hardy_triebel", f, params, k, window, phi=phi, tgrid=tgrid).value
