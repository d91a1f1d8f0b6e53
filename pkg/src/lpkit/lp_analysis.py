"""Littlewood-Paley family, dyadic blocks and Calderon reproducing formulas.

The fixed kernel ``q`` has ``q_hat(xi) = h(|xi|) / sqrt(sum_j h(2^-j |xi|)^2)``
with ``h`` a degree-7 smoothstep bump in ``log2 |xi|`` supported on
``(1/2, 2)``.  The normaliser is dilation invariant, so ``q_hat(2^-j xi)``
is a genuine dyadic dilate and ``sum_j q_hat(2^-j xi)^2 = 1`` holds to
rounding for every ``xi != 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

import numpy as np

from .errors import CapabilityError, ConfigurationError, DomainError, PreconditionError
from .grid import GridSpec, SampledField, inverse_transform, spectral_field
from .kernels import KernelSpec, check_tauberian, make_kernel, multi_indices

__all__ = [
    "smoothstep",
    "bump_profile",
    "q_hat",
    "LPFamily",
    "build_lp_family",
    "multiplier",
    "dyadic_block",
    "calderon_partial_sum",
    "Polynomial",
    "polynomial_correction",
    "CalderonPair",
    "build_calderon_pair",
    "Reconstruction",
    "reconstruct",
    "resolve_kernel",
]

PAIR_FLOOR = 1e-6
MAX_CORRECTION_DEGREE = 6


def smoothstep(t):
    """Degree-7 smoothstep: 0 at 0, 1 at 1, three vanishing derivatives at both ends."""
    t = np.clip(t, 0.0, 1.0)
    # upper half via the symmetry S(t) = 1 - S(1 - t), avoiding cancellation near 1
    s = np.minimum(t, 1.0 - t)
    low = s ** 4 * (35 - 84 * s + 70 * s ** 2 - 20 * s ** 3)
    return np.where(t <= 0.5, low, 1.0 - low)


def bump_profile(rho):
    """``h(rho) = S(1 - |log2 rho|)`` on ``(1/2, 2)``, zero elsewhere."""
    rho = np.asarray(rho, dtype=float)
    with np.errstate(divide="ignore"):
        u = np.abs(np.log2(np.where(rho > 0, rho, 1.0)))
    return np.where((rho > 0) & (u < 1), smoothstep(1 - u), 0.0)


def _octave_split(rho):
    """``rho = 2^(j0 + u)`` with integer ``j0`` and ``u`` in ``[0, 1)``."""
    rho = np.asarray(rho, dtype=float)
    pos = rho > 0
    with np.errstate(divide="ignore"):
        lg = np.log2(np.where(pos, rho, 1.0))
    j0 = np.floor(lg)
    return j0, lg - j0, pos


def _q_parts(rho):
    # at rho = 2^(j0+u) only scales j0 (weight S(1-u)) and j0+1 (weight S(u)) are active
    j0, u, pos = _octave_split(rho)
    lo, hi = smoothstep(1 - u), smoothstep(u)
    norm = np.sqrt(lo ** 2 + hi ** 2)
    return j0, lo / norm, hi / norm, pos


def q_hat(rho, j: int = 0):
    """``q_hat(2^-j xi)`` as a function of ``rho = |xi|``."""
    j0, lo, hi, pos = _q_parts(rho)
    out = np.where(j0 == j, lo, 0.0) + np.where(j0 + 1 == j, hi, 0.0)
    return np.where(pos, out, 0.0)


def _phi_hat(rho, N: int):
    """``sum_{j <= N} q_hat(2^-j xi)^2``, equal to 1 at the origin."""
    j0, lo, hi, pos = _q_parts(rho)
    out = np.where(j0 <= N, lo ** 2, 0.0) + np.where(j0 + 1 <= N, hi ** 2, 0.0)
    return np.where(pos, out, 1.0)


@dataclass(frozen=True, eq=False)
class LPFamily:
    """The fixed kernel ``q`` tabulated on a grid for scales ``jmin..jmax``."""

    grid: GridSpec
    jmin: int
    jmax: int

    @property
    def scales(self) -> range:
        return range(self.jmin, self.jmax + 1)

    @property
    def covered_annulus(self) -> tuple:
        """Radii on which every active scale lies inside the window."""
        return (2.0 ** self.jmin, 2.0 ** self.jmax)

    @cached_property
    def qhat(self) -> np.ndarray:
        rho = self.grid.radius
        return np.stack([q_hat(rho, j) for j in self.scales])

    def table(self, j: int) -> np.ndarray:
        if self.jmin <= j <= self.jmax:
            return self.qhat[j - self.jmin]
        return q_hat(self.grid.radius, j)

    def covered_mask(self) -> np.ndarray:
        lo, hi = self.covered_annulus
        rho = self.grid.radius
        return (rho >= lo) & (rho <= hi)

    def partition_residual(self) -> float:
        """``max |sum_j q_hat(2^-j xi)^2 - 1|`` over covered lattice points."""
        total = np.sum(self.qhat ** 2, axis=0)
        mask = self.covered_mask()
        return float(np.max(np.abs(total[mask] - 1.0), initial=0.0))

    def phi_hat(self, N: int) -> np.ndarray:
        return _phi_hat(self.grid.radius, N)

    def kernel(self) -> KernelSpec:
        """``q`` as a :class:`KernelSpec` (symbol evaluable anywhere)."""

        def sym(xi):
            return q_hat(np.sqrt(np.sum(np.asarray(xi) ** 2, axis=-1))).astype(complex)

        return KernelSpec("lp", self.grid.dim, sym, None,
                          {"r": math.inf, "m": math.inf, "Lambda": 0.0, "ell": math.inf,
                           "support": (0.5, 2.0)},
                          band_limited=True)

    def id(self) -> str:
        return f"lp[{self.jmin},{self.jmax}]"


def build_lp_family(grid: GridSpec, jmin: int, jmax: int) -> LPFamily:
    """Tabulate ``q_hat(2^-j xi)`` for ``jmin <= j <= jmax``.

    Raises :class:`ConfigurationError` when the window is empty or when an
    end scale has no lattice frequency in its support.
    """
    jmin, jmax = int(jmin), int(jmax)
    if jmin > jmax:
        raise ConfigurationError(f"empty scale window [{jmin}, {jmax}]")
    if 2.0 ** (jmax - 1) >= grid.max_radius:
        raise ConfigurationError(
            f"scale jmax={jmax} lies beyond the lattice (max |xi| = {grid.max_radius:.4g})"
        )
    if 2.0 ** (jmin + 1) <= grid.lowest_mode:
        raise ConfigurationError(
            f"scale jmin={jmin} lies below the lowest mode {grid.lowest_mode:.4g}"
        )
    return LPFamily(grid, jmin, jmax)


def resolve_kernel(spec: str, grid: GridSpec, family: Optional[LPFamily] = None):
    """Registry lookup that also understands ``lp`` (returns the family)."""
    if spec == "lp":
        if family is None:
            raise ConfigurationError("kernel 'lp' needs a scale window")
        return family
    return make_kernel(spec, grid)


Kernelish = Union[KernelSpec, LPFamily]


def multiplier(k: Kernelish, grid: GridSpec, j: float) -> np.ndarray:
    """``psi_hat(2^-j xi)`` on the lattice of ``grid``."""
    if isinstance(k, LPFamily):
        if k.grid != grid:
            raise ConfigurationError("family and field live on different grids")
        return k.table(int(j)) if float(j).is_integer() else q_hat(grid.radius / 2.0 ** j)
    return k.on_lattice(grid, 2.0 ** (-j))


def dyadic_block(f: SampledField, j: int, k: Kernelish) -> SampledField:
    """``psi_j * f`` by spectral multiplication with ``psi_hat(2^-j xi)``."""
    F = f.spectral()
    return inverse_transform(spectral_field(f.grid, F.values * multiplier(k, f.grid, j)))


def _check_range(family: LPFamily, N: int, M: int):
    if not N < M:
        raise ConfigurationError(f"need N < M, got N={N}, M={M}")
    if N < family.jmin - 1 or M > family.jmax:
        raise ConfigurationError(
            f"scales {N + 1}..{M} leave the window [{family.jmin}, {family.jmax}]"
        )


def calderon_partial_sum(f: SampledField, family: LPFamily, N: int, M: int) -> SampledField:
    """``sum_{j=N+1}^{M} q_j * q_j * f``."""
    _check_range(family, N, M)
    mult = np.zeros(f.grid.shape)
    for j in range(N + 1, M + 1):
        mult += family.table(j) ** 2
    return inverse_transform(spectral_field(f.grid, f.spectral().values * mult))


@dataclass(frozen=True)
class Polynomial:
    """``sum_kappa c_kappa x^kappa``; ``coefficients`` maps multi-index to value."""

    dim: int
    coefficients: dict

    @property
    def degree(self) -> int:
        degs = [sum(k) for k, c in self.coefficients.items() if c != 0]
        return max(degs) if degs else -1

    def coefficient(self, kappa) -> complex:
        return self.coefficients.get(tuple(kappa), 0.0)

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self.coefficients.values()), default=0.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.dim == 1:
            x = x[..., 0] if x.ndim and x.shape[-1] == 1 else x
            deg = max((k[0] for k in self.coefficients), default=-1)
            acc = np.zeros(np.shape(x), dtype=complex)
            for p in range(deg, -1, -1):
                acc = acc * x + self.coefficient((p,))
            return acc
        acc = np.zeros(x.shape[:-1], dtype=complex)
        for kappa, c in self.coefficients.items():
            acc = acc + c * np.prod([x[..., i] ** e for i, e in enumerate(kappa)], axis=0)
        return acc


def polynomial_correction(f: SampledField, family: LPFamily, N: int, deg: int) -> Polynomial:
    """Taylor polynomial of ``phi_N * f`` at the origin, up to degree ``deg``.

    ``phi_hat_N = sum_{j <= N} q_hat(2^-j .)^2`` (1 at the origin); the
    derivatives are taken spectrally.
    """
    if deg < 0:
        raise DomainError(f"deg must be >= 0, got {deg}")
    if deg > MAX_CORRECTION_DEGREE:
        raise CapabilityError(f"degree {deg} exceeds grid accuracy (max {MAX_CORRECTION_DEGREE})")
    if not family.jmin - 1 <= N <= family.jmax:
        raise ConfigurationError(f"N={N} outside window [{family.jmin - 1}, {family.jmax}]")
    g = f.grid
    spec = f.spectral().values * family.phi_hat(N)
    xi = g.frequencies
    coeffs = {}
    for kappa in multi_indices(g.dim, deg):
        sym = np.ones(g.shape, dtype=complex)
        for axis, e in enumerate(kappa):
            sym = sym * (1j * xi[..., axis]) ** e
        # inverse transform evaluated at x = 0
        deriv = np.sum(sym * spec) / g.volume
        coeffs[kappa] = complex(deriv / np.prod([math.factorial(e) for e in kappa]))
    return Polynomial(g.dim, coeffs)


# --- generalised Calderon pair ---------------------------------------------


@dataclass(frozen=True, eq=False)
class CalderonPair:
    """``eta``/``phi`` with ``sum_j eta_hat psi_hat (2^-j xi) = 1`` for ``xi != 0``.

    ``eta_hat = g conj(psi_hat) / D`` where ``g`` is a radial bump equal to 1
    on ``[a_lo/2, 4 a_hi]`` (``a`` from the Tauberian witnesses) and
    ``D(xi) = sum_j g |psi_hat|^2 (2^-j xi)`` is dilation invariant.
    """

    source_kernel: KernelSpec
    family: LPFamily
    a_lo: float
    a_hi: float
    c0: float

    @property
    def annulus(self) -> tuple:
        """Support ``{a' <= |xi| <= b'}`` of ``eta_hat``."""
        return (self.a_lo / 4, 8 * self.a_hi)

    def g(self, rho):
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore"):
            lg = np.log2(np.where(rho > 0, rho, 1.0))
        lo = smoothstep(lg - math.log2(self.a_lo / 4))
        hi = smoothstep(math.log2(8 * self.a_hi) - lg)
        return np.where(rho > 0, lo * hi, 0.0)

    def _scale_range(self, rho):
        pos = rho[rho > 0]
        if pos.size == 0:
            return range(0)
        a, b = self.annulus
        return range(math.floor(math.log2(pos.min() / b)) - 1,
                     math.ceil(math.log2(pos.max() / a)) + 2)

    def denominator(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        rho = np.sqrt(np.sum(xi ** 2, axis=-1))
        total = np.zeros(rho.shape)
        for j in self._scale_range(rho):
            s = 2.0 ** (-j)
            gj = self.g(s * rho)
            if np.any(gj):
                total += gj * np.abs(self.source_kernel(s * xi)) ** 2
        return total

    def eta_hat(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        rho = np.sqrt(np.sum(xi ** 2, axis=-1))
        gv = self.g(rho)
        den = self.denominator(xi)
        num = gv * np.conj(self.source_kernel(xi))
        return np.where(gv > 0, num / np.where(den > 0, den, 1.0), 0.0)

    def _products(self, grid: GridSpec, scales) -> dict:
        """``eta_hat psi_hat (2^-j xi)`` on the lattice, using ``D``'s dilation invariance."""
        xi, rho = grid.frequencies, grid.radius
        den = self.denominator(xi)
        safe = np.where(den > 0, den, 1.0)
        out = {}
        for j in scales:
            s = 2.0 ** (-j)
            gj = self.g(s * rho)
            if np.any(gj):
                out[j] = np.where(den > 0, gj * np.abs(self.source_kernel(s * xi)) ** 2 / safe, 0.0)
            else:
                out[j] = np.zeros(grid.shape)
        return out

    def phi_hat(self, grid: GridSpec, k: int = 0) -> np.ndarray:
        """``phi_hat(2^-k xi) = 1 - sum_{j > k} eta_hat psi_hat (2^-j xi)``."""
        rho = grid.radius
        pos = rho[rho > 0]
        top = math.ceil(math.log2(pos.max() / self.annulus[0])) + 1 if pos.size else k
        prods = self._products(grid, range(k + 1, max(top, k) + 1))
        out = 1.0 - sum(prods.values(), np.zeros(grid.shape))
        return np.where(rho > 0, out, 1.0)

    def identity_residual(self) -> float:
        """``max |sum_{j in window} eta_hat psi_hat (2^-j xi) - 1|`` on the covered annulus."""
        grid = self.family.grid
        prods = self._products(grid, self.family.scales)
        total = sum(prods.values(), np.zeros(grid.shape))
        lo, hi = self.covered_annulus
        mask = (grid.radius >= lo) & (grid.radius <= hi)
        return float(np.max(np.abs(total[mask] - 1.0), initial=0.0))

    @property
    def covered_annulus(self) -> tuple:
        a, b = self.annulus
        return (2.0 ** self.family.jmin * b, 2.0 ** self.family.jmax * a)

    def denominator_min(self) -> float:
        grid = self.family.grid
        den = self.denominator(grid.frequencies)
        return float(den[grid.radius > 0].min())

    def report(self) -> dict:
        return {"kernel": self.source_kernel.name, "annulus": list(self.annulus),
                "covered_annulus": list(self.covered_annulus), "c0": self.c0,
                "tauberian_a": [self.a_lo, self.a_hi],
                "identity_residual": self.identity_residual(),
                "denominator_min": self.denominator_min()}


def build_calderon_pair(k: Kernelish, family: LPFamily) -> CalderonPair:
    """Construct ``(eta, phi)`` for a Tauberian kernel ``k``."""
    if isinstance(k, LPFamily):
        k = k.kernel()
    rep = check_tauberian(k)
    if not rep.passed:
        raise PreconditionError(f"kernel {k.name!r} fails the Tauberian condition", rep.witness)
    c0 = rep.details["c0_min"]
    if c0 < PAIR_FLOOR:
        raise PreconditionError(
            f"Tauberian lower bound {c0:.3g} below floor {PAIR_FLOOR:g}", rep.witness
        )
    a = [w["a"] for w in rep.witness]
    return CalderonPair(k, family, min(a), max(a), c0)


@dataclass(frozen=True, eq=False)
class Reconstruction:
    field: SampledField
    relative_error: float


def reconstruct(g: SampledField, pair: CalderonPair, k: int, M: int) -> Reconstruction:
    """``phi_k * g + sum_{j=k+1}^{M} eta_j * psi_j * g`` and its relative L2 error."""
    if not k < M:
        raise ConfigurationError(f"need k < M, got k={k}, M={M}")
    if M > pair.family.jmax:
        raise ConfigurationError(f"M={M} above window top {pair.family.jmax}")
    if g.grid != pair.family.grid:
        raise ConfigurationError("field and pair live on different grids")
    G = g.spectral().values
    mult = pair.phi_hat(g.grid, k)
    for j, prod in pair._products(g.grid, range(k + 1, M + 1)).items():
        mult = mult + prod
    out = inverse_transform(spectral_field(g.grid, G * mult))
    ref = np.sqrt(np.sum(np.abs(G) ** 2))
    err = np.sqrt(np.sum(np.abs(G * (mult - 1.0)) ** 2))
    rel = float(err / ref) if ref > 0 else 0.0
    return Reconstruction(out, rel)
