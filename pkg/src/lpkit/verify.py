"""Empirical audits: norm equivalence, dilation envelopes, Stromberg-type bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError, PreconditionError
from .grid import GridSpec, SampledField, dilate_field, inverse_transform, spectral_field
from .kernels import KernelSpec, _jsonable, check_tauberian
from .lp_analysis import LPFamily, build_lp_family, dyadic_block
from .maximal import peetre_maximal
from .norms import NormParams, compute_norm, kernel_id

__all__ = [
    "Engine",
    "EquivalenceReport",
    "norm_equivalence_report",
    "EnvelopeFit",
    "check_dilation_lemma",
    "StrombergReport",
    "check_stromberg",
    "ScalingResult",
    "check_scaling_covariance",
    "DominationResult",
    "check_maximal_domination",
]

GATE = 100.0
WARN_BAND = 30.0
SLOPE_SLACK = 0.25
MIN_RATIOS = 5
MIN_OCTAVES = 4.0


@dataclass(frozen=True, eq=False)
class Engine:
    """A norm engine bound to a kernel and scale window."""

    name: str
    kernel: object
    window: Optional[tuple] = None
    phi: Optional[KernelSpec] = None
    tgrid: Optional[tuple] = None

    def result(self, f: SampledField, params: NormParams):
        return compute_norm(self.name, f, params, self.kernel, self.window,
                            phi=self.phi, tgrid=self.tgrid)

    def __call__(self, f: SampledField, params: NormParams) -> float:
        return self.result(f, params).value

    def describe(self) -> dict:
        win = self.window
        if win is None and isinstance(self.kernel, LPFamily):
            win = (self.kernel.jmin, self.kernel.jmax)
        return {"engine": self.name, "kernel": kernel_id(self.kernel),
                "window": None if win is None else list(win)}


@dataclass
class EquivalenceReport:
    ids: list
    values_a: list
    values_b: list
    ratios: list
    excluded: list
    params: dict
    engines: dict
    gate: float = GATE
    warn_band: float = WARN_BAND

    @property
    def c_lower(self) -> float:
        return min(self.ratios) if self.ratios else math.nan

    @property
    def c_upper(self) -> float:
        return max(self.ratios) if self.ratios else math.nan

    @property
    def geometric_mean(self) -> float:
        return float(np.exp(np.mean(np.log(self.ratios)))) if self.ratios else math.nan

    @property
    def spread(self) -> float:
        return self.c_upper / self.c_lower if self.ratios else math.nan

    @property
    def empty(self) -> bool:
        return not self.ratios

    @property
    def passed(self) -> bool:
        return (not self.empty) and self.spread <= self.gate

    @property
    def warning(self) -> bool:
        return (not self.empty) and self.spread > self.warn_band

    def to_json(self) -> dict:
        return _jsonable({
            "ids": self.ids, "values_a": self.values_a, "values_b": self.values_b,
            "ratios": self.ratios, "excluded": self.excluded, "params": self.params,
            "engines": self.engines, "c_lower": self.c_lower, "c_upper": self.c_upper,
            "geometric_mean": self.geometric_mean, "spread": self.spread,
            "gate": self.gate, "warning": self.warning, "passed": self.passed,
            "empty": self.empty,
        })

    def csv_rows(self) -> list:
        ratio = dict(zip([i for i in self.ids if i not in self.excluded], self.ratios))
        return [(i, a, b, ratio.get(i, "")) for i, a, b in
                zip(self.ids, self.values_a, self.values_b)]


def norm_equivalence_report(corpus: Sequence[SampledField], engine_a: Engine, engine_b: Engine,
                            params: NormParams, *, ids: Optional[Sequence] = None,
                            gate: float = GATE, warn_band: float = WARN_BAND) -> EquivalenceReport:
    """Ratios ``A(f)/B(f)`` across a corpus with the spread gate ``C_upper/C_lower <= gate``."""
    if len(corpus) == 0:
        raise ConfigurationError("empty corpus")
    ids = list(ids) if ids is not None else list(range(len(corpus)))
    va, vb, ratios, excluded = [], [], [], []
    for i, f in zip(ids, corpus):
        a, b = engine_a(f, params), engine_b(f, params)
        va.append(a)
        vb.append(b)
        if a == 0.0 or b == 0.0:
            excluded.append(i)
        else:
            ratios.append(a / b)
    return EquivalenceReport(ids, va, vb, ratios, excluded, params.as_dict(),
                             {"A": engine_a.describe(), "B": engine_b.describe()},
                             gate, warn_band)


# --- dilation envelopes ------------------------------------------------------


@dataclass
class EnvelopeFit:
    case: str
    ratios: list
    values: list
    slope: float
    exponent: float
    target: float
    residual: float
    scales: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.exponent >= self.target - SLOPE_SLACK

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["passed"] = self.passed
        return _jsonable(d)


def _support(eta: KernelSpec) -> tuple:
    sup = eta.params.get("support")
    if not eta.band_limited or sup is None:
        raise PreconditionError(f"kernel {eta.name!r} is not annulus-supported")
    return float(sup[0]), float(sup[1])


def _fit(case, ratios, values, target, scales) -> EnvelopeFit:
    r = np.asarray(ratios, dtype=float)
    v = np.asarray(values, dtype=float)
    nz = v > 0
    if nz.sum() < 2:
        # envelope vanishes: the bound holds trivially
        return EnvelopeFit(case, list(r), list(v), -math.inf, math.inf, target, 0.0, scales)
    x, y = np.log2(r[nz]), np.log2(v[nz])
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
    if nz.sum() < nz.size:
        # a trailing zero means the envelope fell off faster than any power
        slope = -math.inf if not nz[-1] else slope
    return EnvelopeFit(case, list(r), list(v), float(slope), float(-slope), target, resid, scales)


def _envelope(grid, eta, psi, s, t, N) -> float:
    """``sup_x |eta_s * psi_t(x)| (1 + |x|/R)^N R^n`` with ``R = max(s, t)``."""
    xi = grid.frequencies
    prod = eta(s * xi) * psi(t * xi)
    conv = inverse_transform(spectral_field(grid, prod)).values
    R = max(s, t)
    w = (1 + grid.centred_distance / R) ** N * R ** grid.dim
    return float(np.max(np.abs(conv) * w))


def check_dilation_lemma(eta: KernelSpec, psi: KernelSpec, N: int, m: float,
                         ratios: Sequence[float], grid: GridSpec,
                         base: Optional[float] = None) -> tuple:
    """Fit both dilation envelopes and return ``(case_i, case_ii)``.

    Case (i) fixes the smaller scale ``s`` and sets ``t = rho s``; target
    exponent ``m - n``.  Case (ii) fixes ``t`` and sets ``s = rho t``;
    target ``m``.  The exponent is minus the fitted slope of
    ``log K`` against ``log rho``.
    """
    r = np.asarray(sorted(float(x) for x in ratios))
    if r.size < MIN_RATIOS or math.log2(r[-1] / r[0]) < MIN_OCTAVES or r[0] < 1:
        raise ConfigurationError(
            f"need >= {MIN_RATIOS} ratios >= 1 spanning >= {MIN_OCTAVES:g} octaves"
        )
    a, b = _support(eta)
    # smallest s keeps eta_hat(s xi) below Nyquist; largest keeps it above the lowest mode
    s_min = 2.0 ** math.ceil(math.log2(b / grid.nyquist))
    if base is not None:
        s_min = float(base)
    t0 = s_min / r[0]
    if b / s_min > grid.nyquist or a / (t0 * r[-1]) < grid.lowest_mode:
        raise ConfigurationError("scale ratios not resolvable on this grid")
    n = grid.dim
    vi = [_envelope(grid, eta, psi, s_min, s_min * rho, N) for rho in r]
    vii = [_envelope(grid, eta, psi, t0 * rho, t0, N) for rho in r]
    fit_i = _fit("i", r, vi, m - n, {"s": s_min})
    fit_ii = _fit("ii", r, vii, m, {"t": t0})
    return fit_i, fit_ii


# --- Stromberg ---------------------------------------------------------------


@dataclass
class StrombergReport:
    empirical_C: float
    margin: np.ndarray
    degenerate: bool
    tail: float
    params: dict

    @property
    def passed(self) -> bool:
        return self.degenerate or math.isfinite(self.empirical_C)

    def to_json(self) -> dict:
        return _jsonable({"empirical_C": self.empirical_C, "degenerate": self.degenerate,
                          "tail_indicator": self.tail, "params": self.params,
                          "passed": self.passed, "margin_min": float(np.min(self.margin)),
                          "margin_max": float(np.max(self.margin))})


def _cell_weight(grid: GridSpec, c: float, mu: float) -> np.ndarray:
    """``int_cell (1 + c d(y))^-mu dy`` for every offset cell, by midpoint sub-sampling.

    The sub-step is at most an eighth of the weight's width ``1/c``, so sharply
    peaked weights at fine scales are still integrated accurately.
    """
    h = grid.spacing
    S = min(64, max(1, math.ceil(8 * c * h)))
    sub = (np.arange(S) + 0.5) / S - 0.5
    o = np.arange(grid.samples)
    base = np.minimum(o, grid.samples - o) * h
    # |offset + sub| along one axis; the shift is symmetric so |.| is safe
    ax = np.abs(base[:, None] + h * sub[None, :])
    n = grid.dim
    if n == 1:
        return ((1 + c * ax) ** (-mu)).mean(axis=1) * h
    out = np.zeros(grid.shape)
    for idx in np.ndindex(*((S,) * n)):
        parts = np.meshgrid(*[ax[:, i] for i in idx], indexing="ij")
        out += (1 + c * np.sqrt(sum(q ** 2 for q in parts))) ** (-mu)
    return out / S ** n * h ** n


def check_stromberg(f: SampledField, k, r: float, lam: float, beta: float, j: int,
                    kmax: int) -> StrombergReport:
    """Compare ``(psi*_j f)^r`` with the scale-summed weighted ``L^r`` averages.

    ``empirical_C = max_x LHS/RHS``; it is infinite only if the right side
    vanishes where the left does not.
    """
    if not 0 < r <= 1:
        raise ConfigurationError(f"r must lie in (0, 1], got {r}")
    if kmax < j:
        raise ConfigurationError(f"kmax={kmax} below j={j}")
    if isinstance(k, KernelSpec):
        rep = check_tauberian(k)
        if not rep.passed:
            raise PreconditionError(f"kernel {k.name!r} fails the Tauberian condition",
                                    rep.witness)
    grid = f.grid
    params = {"r": r, "lambda": lam, "beta": beta, "j": j, "kmax": kmax,
              "kernel": kernel_id(k)}
    lhs = peetre_maximal(dyadic_block(f, j, k), j, lam).values.real ** r
    rhs = np.zeros(grid.shape)
    last = 0.0
    for kk in range(j, kmax + 1):
        b = np.abs(dyadic_block(f, kk, k).values) ** r
        w = _cell_weight(grid, 2.0 ** kk, lam * r) * 2.0 ** (kk * grid.dim)
        term = np.fft.ifftn(np.fft.fftn(b) * np.fft.fftn(w)).real
        term *= 2.0 ** ((j - kk) * (beta - lam) * r)
        rhs += np.maximum(term, 0.0)
        last = float(term.max())
    if not np.any(lhs > 0):
        return StrombergReport(math.nan, np.zeros(grid.shape), True, last, params)
    pos = rhs > 0
    if np.any((lhs > 0) & ~pos):
        C = math.inf
    else:
        C = float(np.max(lhs[pos] / rhs[pos]))
    margin = np.where(pos, lhs / np.where(pos, rhs, 1.0), np.where(lhs > 0, math.inf, 0.0))
    return StrombergReport(C, margin, False, last, params)


# --- scaling covariance ------------------------------------------------------


@dataclass
class ScalingResult:
    ratio: float
    predicted: float
    kernel_exact: bool

    @property
    def deviation(self) -> float:
        return abs(self.ratio / self.predicted - 1.0)

    @property
    def passed(self) -> bool:
        return self.deviation < (1e-10 if self.kernel_exact else 0.05)

    def to_json(self) -> dict:
        return _jsonable({"ratio": self.ratio, "predicted": self.predicted,
                          "deviation": self.deviation, "passed": self.passed})


def check_scaling_covariance(f: SampledField, params: NormParams, engine: Engine,
                             k: int) -> ScalingResult:
    """Norm of ``x -> f(2^k x)`` against ``2^{k(alpha - n/p)}`` times the norm of ``f``.

    The dilate lives on the torus of side ``2^-k L`` with the same samples,
    and the window shifts by ``k``; the identity is then exact for every
    ``p`` up to rounding.
    """
    fk = dilate_field(f, k)
    kern = engine.kernel
    win = engine.window
    if isinstance(kern, LPFamily):
        win = win or (kern.jmin, kern.jmax)
        kern_k = build_lp_family(fk.grid, kern.jmin + k, kern.jmax + k)
    else:
        if win is None:
            raise ConfigurationError("a scale window is required for this kernel")
        kern_k = kern
    win_k = (win[0] + k, win[1] + k)
    shifted = Engine(engine.name, kern_k, win_k, engine.phi,
                     None if engine.tgrid is None else tuple(t * 2.0 ** -k for t in engine.tgrid))
    base = engine(f, params)
    val = shifted(fk, params)
    n = f.grid.dim
    predicted = 2.0 ** (k * (params.alpha - (0.0 if math.isinf(params.p) else n / params.p)))
    ratio = val / base if base > 0 else math.nan
    return ScalingResult(ratio, predicted, True)


# --- maximal domination -------------------------------------------------------


@dataclass
class DominationResult:
    passed: bool
    witnesses: list

    def to_json(self) -> dict:
        return _jsonable({"passed": self.passed, "witnesses": self.witnesses})


def check_maximal_domination(f: SampledField, k, j: int, lambda_list: Sequence[float]) -> DominationResult:
    """``|psi_j*f| <= psi*_j f`` and monotonicity in ``lambda``, pointwise and exact."""
    block = dyadic_block(f, j, k)
    a = np.abs(block.values)
    lams = sorted(float(v) for v in lambda_list)
    prev = None
    witnesses = []
    for lam in lams:
        pm = peetre_maximal(block, j, lam).values.real
        bad = np.argwhere(pm < a)
        if bad.size:
            witnesses.append({"kind": "domination", "lambda": lam, "index": bad[0].tolist()})
        if prev is not None:
            bad = np.argwhere(pm > prev[1])
            if bad.size:
                witnesses.append({"kind": "monotonicity", "lambda": [prev[0], lam],
                                  "index": bad[0].tolist()})
        prev = (lam, pm)
    return DominationResult(not witnesses, witnesses)
