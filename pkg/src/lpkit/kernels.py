"""Analysis kernels given by Fourier symbols, and numerical admissibility audits.

A kernel is described by its symbol ``psi_hat(xi)``.  The catalogue kernels
(fractional Poisson, Gaussian derivatives) carry exact derivative oracles
built from a small term algebra; other symbols fall back to central finite
differences.  The checkers turn the asymptotic O(.) conditions on the symbol
into falsifiable fitted-slope tests on fixed sampling windows.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import CapabilityError, DomainError, EvaluationError
from .grid import GridSpec, SampledField, inverse_transform, spectral_field

__all__ = [
    "KernelSpec",
    "ConditionReport",
    "Condition",
    "RadialExpSymbol",
    "make_fractional_poisson",
    "make_gaussian_derivative",
    "make_rational",
    "make_zero",
    "make_kernel",
    "symbol_derivative",
    "check_tauberian",
    "check_decay_origin",
    "check_decay_infinity",
    "vanishing_moments",
    "multi_indices",
    "weighted_l1",
    "weighted_l1_study",
    "spatial_kernel",
    "ray_directions",
]

ORIGIN_WINDOW = (2.0 ** -12, 2.0 ** -4)
INFINITY_WINDOW = (2.0 ** 4, 2.0 ** 10)
SLOPE_SLACK = 0.1
RAPID_DECAY_CAP = 32.0
TAUBERIAN_FLOOR = 1e-10


class RadialExpSymbol:
    """Symbol ``sum_t c_t xi^a_t |xi|^s_t * exp(-mu |xi|^d)``.

    The family is closed under differentiation, which gives exact
    derivatives of the fractional Poisson and Gaussian-derivative symbols
    in any dimension.  Terms are stored as ``{(a, s): c}``.
    """

    def __init__(self, dim, terms, mu=0.0, d=1):
        self.dim = dim
        self.mu = float(mu)
        self.d = d
        self.terms = {k: complex(v) for k, v in terms.items() if v != 0}

    def derivative(self, axis: int) -> "RadialExpSymbol":
        out: dict = {}
        e = tuple(int(i == axis) for i in range(self.dim))
        for (a, s), c in self.terms.items():
            if a[axis] > 0:
                key = (tuple(x - y for x, y in zip(a, e)), s)
                out[key] = out.get(key, 0) + c * a[axis]
            up = tuple(x + y for x, y in zip(a, e))
            if s != 0:
                out[(up, s - 2)] = out.get((up, s - 2), 0) + c * s
            if self.mu:
                key = (up, s + self.d - 2)
                out[key] = out.get(key, 0) - c * self.mu * self.d
        return RadialExpSymbol(self.dim, out, self.mu, self.d)

    def partial(self, kappa) -> "RadialExpSymbol":
        sym = self
        for axis, order in enumerate(kappa):
            for _ in range(order):
                sym = sym.derivative(axis)
        return sym

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        rho = np.sqrt(np.sum(xi ** 2, axis=-1))
        out = np.zeros(rho.shape, dtype=complex)
        zero = rho == 0
        safe = np.where(zero, 1.0, rho)
        with np.errstate(over="ignore", under="ignore"):
            damp = np.exp(-self.mu * safe ** self.d) if self.mu else 1.0
            for (a, s), c in self.terms.items():
                mono = np.ones(rho.shape)
                for i, ai in enumerate(a):
                    if ai:
                        mono = mono * xi[..., i] ** ai
                out += c * mono * safe ** s
            out = out * damp
        if zero.any():
            # value at the origin: continuous limit where it exists, else 0
            at0 = sum(c for (a, s), c in self.terms.items() if sum(a) == 0 and s == 0)
            out[zero] = at0
        return out


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """A kernel ``psi`` described by its Fourier symbol.

    ``symbol`` maps an array of frequencies with trailing axis ``dim`` to
    complex symbol values.  ``symbol_grad(xi, kappa)`` (optional) returns the
    partial derivative ``d^kappa psi_hat``.  ``params`` holds the declared
    exponents (beta, r, m, Lambda, ell); the checkers certify them, they are
    not assumed.
    """

    name: str
    dim: int
    symbol: Callable
    symbol_grad: Optional[Callable] = None
    params: dict = field(default_factory=dict)
    band_limited: bool = False

    def __call__(self, xi) -> np.ndarray:
        try:
            vals = np.asarray(self.symbol(np.asarray(xi, dtype=float)), dtype=complex)
        except Exception as exc:  # noqa: BLE001 -- user callables may raise anything
            raise EvaluationError(f"symbol of {self.name!r} failed: {exc}") from exc
        if not np.all(np.isfinite(vals)):
            raise EvaluationError(f"symbol of {self.name!r} returned non-finite values")
        return vals

    def on_lattice(self, grid: GridSpec, scale: float = 1.0) -> np.ndarray:
        """``psi_hat(scale * xi)`` on the grid's frequency lattice."""
        self._check_grid(grid)
        return self(scale * grid.frequencies)

    def value_at_origin(self) -> complex:
        return complex(self(np.zeros((1, self.dim)))[0])

    def _check_grid(self, grid: GridSpec):
        if grid.dim != self.dim:
            raise DomainError(f"kernel {self.name!r} is {self.dim}-d, grid is {grid.dim}-d")


def _radial_kernel(name, sym: RadialExpSymbol, params) -> KernelSpec:
    def grad(xi, kappa):
        return sym.partial(kappa)(xi)

    return KernelSpec(name=name, dim=sym.dim, symbol=sym, symbol_grad=grad, params=params)


def make_fractional_poisson(beta: float, grid: GridSpec) -> KernelSpec:
    """Fractional derivative of the Poisson kernel, symbol ``|xi|^beta e^{-|xi|}``."""
    if not beta >= 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    n = grid.dim
    sym = RadialExpSymbol(n, {((0,) * n, float(beta)): 1.0}, mu=1.0, d=1)
    params = {"beta": float(beta), "r": float(beta), "m": math.inf, "Lambda": 0.0,
              "ell": float(beta)}
    return _radial_kernel(f"poisson:beta={_fmt(beta)}", sym, params)


def make_gaussian_derivative(kappa, grid: GridSpec) -> KernelSpec:
    """``d^kappa`` of the Gaussian ``exp(-|x|^2)``.

    The symbol is ``(i xi)^kappa pi^{n/2} exp(-|xi|^2/4)``; moments of order
    below ``|kappa|`` vanish.
    """
    n = grid.dim
    kappa = tuple(int(k) for k in np.atleast_1d(kappa))
    if len(kappa) != n or min(kappa) < 0:
        raise DomainError(f"kappa must be a nonnegative {n}-multi-index, got {kappa}")
    order = sum(kappa)
    coef = (1j ** order) * np.pi ** (n / 2)
    sym = RadialExpSymbol(n, {(kappa, 0.0): coef}, mu=0.25, d=2)
    params = {"beta": None, "r": float(order), "m": math.inf, "Lambda": 0.0, "ell": math.inf}
    label = ",".join(str(k) for k in kappa)
    return _radial_kernel(f"gaussd:kappa={label}", sym, params)


def make_rational(power: float, grid: GridSpec) -> KernelSpec:
    """Symbol ``(1 + |xi|^2)^(-power)``; no derivative oracle (finite differences)."""
    n = grid.dim

    def sym(xi):
        return (1.0 + np.sum(xi ** 2, axis=-1)) ** (-power)

    params = {"beta": None, "r": 0.0, "m": 2 * power - n, "Lambda": 0.0, "ell": None}
    return KernelSpec(f"rational:power={_fmt(power)}", n, sym, None, params)


def make_zero(grid: GridSpec) -> KernelSpec:
    n = grid.dim

    def sym(xi):
        return np.zeros(np.shape(xi)[:-1], dtype=complex)

    def grad(xi, kappa):
        return sym(xi)

    return KernelSpec("zero", n, sym, grad, {"r": math.inf, "m": math.inf})


def _fmt(x) -> str:
    return repr(float(x)).rstrip("0").rstrip(".") if float(x) != int(x) else str(int(x))


def make_kernel(spec: str, grid: GridSpec) -> KernelSpec:
    """Resolve a registry id such as ``poisson:beta=1.5`` or ``gaussd:kappa=2``.

    ``lp`` (the fixed band-limited kernel) is resolved in
    :func:`lpkit.lp_analysis.resolve_kernel`, which needs a scale window.
    """
    name, _, rest = spec.partition(":")
    opts = {}
    for item in filter(None, rest.split(";")):
        key, _, val = item.partition("=")
        opts[key.strip()] = val.strip()
    try:
        if name == "poisson":
            return make_fractional_poisson(float(opts.get("beta", 0)), grid)
        if name in ("gaussd", "gaussian"):
            raw = opts.get("kappa", "0")
            kappa = [int(v) for v in raw.split(",")]
            if len(kappa) == 1 and grid.dim > 1:
                kappa = kappa + [0] * (grid.dim - 1)
            return make_gaussian_derivative(kappa, grid)
        if name == "rational":
            return make_rational(float(opts.get("power", 1)), grid)
        if name == "zero":
            return make_zero(grid)
    except ValueError as exc:
        raise DomainError(f"bad kernel parameters in {spec!r}: {exc}") from exc
    raise KeyError(f"unknown kernel {spec!r}")


# --- derivatives -----------------------------------------------------------


def _fd_derivative(k: KernelSpec, xi: np.ndarray, kappa) -> np.ndarray:
    order = sum(kappa)
    if order == 0:
        return k(xi)
    rho = np.sqrt(np.sum(xi ** 2, axis=-1))
    # step scales with |xi| near the origin so the stencil never crosses it
    h = np.finfo(float).eps ** (1.0 / (order + 2)) * np.minimum(rho, 1.0)
    stencils = []
    for m in kappa:
        stencils.append([((m / 2 - l), (-1) ** l * math.comb(m, l)) for l in range(m + 1)])
    total = np.zeros(rho.shape, dtype=complex)
    for combo in itertools.product(*stencils):
        shift = np.stack([c[0] * h for c in combo], axis=-1)
        weight = np.prod([c[1] for c in combo])
        total += weight * k(xi + shift)
    return total / h ** order


def symbol_derivative(k: KernelSpec, xi, kappa, finite_difference: bool = True) -> np.ndarray:
    """``d^kappa psi_hat`` at ``xi`` from the oracle, else by central differences."""
    xi = np.asarray(xi, dtype=float)
    kappa = tuple(int(v) for v in kappa)
    if k.symbol_grad is not None:
        vals = np.asarray(k.symbol_grad(xi, kappa), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise EvaluationError(f"derivative oracle of {k.name!r} returned non-finite values")
        return vals
    if not finite_difference:
        raise CapabilityError(
            f"kernel {k.name!r} has no derivative oracle and finite differences are disabled"
        )
    return _fd_derivative(k, xi, kappa)


def multi_indices(dim: int, maxdeg: int) -> list:
    """All multi-indices with ``|kappa| <= maxdeg``, graded then lexicographic."""
    out = []
    for deg in range(maxdeg + 1):
        for kappa in itertools.product(range(deg, -1, -1), repeat=dim):
            if sum(kappa) == deg:
                out.append(tuple(kappa))
    return out


def ray_directions(dim: int, count: Optional[int] = None, offset: float = 0.0) -> np.ndarray:
    """Unit vectors: ``+-1`` in 1-d, ``count`` angles in 2-d, a Fibonacci sphere in 3-d."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        count = count or 64
        th = 2 * np.pi * (np.arange(count) + offset) / count
        return np.stack([np.cos(th), np.sin(th)], axis=-1)
    count = count or 128
    i = np.arange(count) + 0.5
    phi = np.arccos(1 - 2 * i / count)
    th = np.pi * (1 + 5 ** 0.5) * i
    return np.stack([np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi), np.cos(phi)], axis=-1)


# --- condition reports -----------------------------------------------------


class Condition(str, enum.Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    WEIGHTED_L1 = "weightedL1"
    MOMENTS = "moments"


@dataclass
class ConditionReport:
    condition: Condition
    passed: bool
    witness: list
    tolerance: float
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "condition": Condition(self.condition).value,
            "passed": bool(self.passed),
            "tolerance": float(self.tolerance),
            "witness": _jsonable(self.witness),
            "details": _jsonable(self.details),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def check_tauberian(k: KernelSpec, directions: Optional[np.ndarray] = None,
                    floor: float = TAUBERIAN_FLOOR) -> ConditionReport:
    """Search dyadic windows ``[a, 2a]`` on which ``|psi_hat(t w)|`` stays positive.

    Candidates are ``a = 2^(i/4)`` for ``|i| <= 24``; each window is sampled
    at 33 log-spaced points.  Per direction the window with the largest
    minimum ``c0`` is reported.  The check passes when ``c0 > floor`` for
    every direction of the mesh.
    """
    dirs = ray_directions(k.dim) if directions is None else np.asarray(directions, float)
    per_window, per_quarter = 32, 8
    v = np.arange(-24 * per_quarter, 24 * per_quarter + per_window + 1)
    t = 2.0 ** (v / per_window)
    vals = np.abs(k(t[None, :, None] * dirs[:, None, :]))
    starts = np.arange(0, 48 * per_quarter + 1, per_quarter)
    windows = np.stack([vals[:, s:s + per_window + 1].min(axis=1) for s in starts], axis=1)
    best = np.argmax(windows, axis=1)
    witness = []
    ok = True
    for d, b in enumerate(best):
        a = float(t[starts[b]])
        c0 = float(windows[d, b])
        good = c0 > floor
        ok &= good
        witness.append({"direction": dirs[d].tolist(), "a": a, "b": 2 * a, "c0": c0,
                        "passed": bool(good)})
    if not ok:
        witness = [w for w in witness if not w["passed"]]
    c0_min = min(float(windows[d, b]) for d, b in enumerate(best))
    return ConditionReport(Condition.C2, bool(ok), witness, floor,
                           {"c0_min": c0_min, "directions": len(dirs)})


def _fit_slope(rho: np.ndarray, vals: np.ndarray, vacuous: float) -> float:
    """Least-squares slope of ``log|vals|`` against ``log rho``.

    Exact zeros carry no growth information.  If every sample vanishes the
    slope is ``vacuous``; zeros mixed into the tail of the infinity window
    (underflow) mean faster-than-polynomial decay, signalled by ``-inf``.
    """
    mag = np.abs(vals)
    pos = mag > 0
    if not pos.any():
        return vacuous
    if vacuous == -math.inf and not pos.all():
        return -math.inf
    x, y = np.log2(rho[pos]), np.log2(mag[pos])
    if len(x) < 2:
        return vacuous
    return float(np.polyfit(x, y, 1)[0])


def _decay_fits(k, window, Lambda, finite_difference, samples, vacuous):
    if k.symbol_grad is None and not finite_difference:
        raise CapabilityError(
            f"kernel {k.name!r} has no derivative oracle and finite differences are disabled"
        )
    n = k.dim
    max_order = n + 1 + int(math.floor(Lambda))
    rho = np.geomspace(window[0], window[1], samples)
    dirs = ray_directions(n, 16, offset=0.25)
    xi = rho[None, :, None] * dirs[:, None, :]
    fits = []
    for kappa in multi_indices(n, max_order):
        vals = symbol_derivative(k, xi, kappa, finite_difference)
        slopes = [_fit_slope(rho, vals[d], vacuous) for d in range(len(dirs))]
        fits.append((kappa, slopes, dirs))
    return fits


def check_decay_origin(k: KernelSpec, r: float, Lambda: float = 0.0, *,
                       window=ORIGIN_WINDOW, slack: float = SLOPE_SLACK,
                       finite_difference: bool = True, samples: int = 33) -> ConditionReport:
    """Fitted-slope audit of ``d^kappa psi_hat = O(|xi|^(r-|kappa|))`` as ``xi -> 0``."""
    fits = _decay_fits(k, window, Lambda, finite_difference, samples, math.inf)
    witness, summary, ok = [], [], True
    for kappa, slopes, dirs in fits:
        target = r - sum(kappa) - slack
        worst = int(np.argmin(slopes))
        summary.append({"kappa": list(kappa), "min_slope": slopes[worst], "target": target})
        if slopes[worst] < target:
            ok = False
            witness.append({"kappa": list(kappa), "direction": dirs[worst].tolist(),
                            "slope": slopes[worst], "target": target})
    return ConditionReport(Condition.C1, ok, witness if not ok else summary, slack,
                           {"r": r, "Lambda": Lambda, "window": list(window)})


def check_decay_infinity(k: KernelSpec, m: float, Lambda: float = 0.0, *,
                         window=INFINITY_WINDOW, slack: float = SLOPE_SLACK,
                         finite_difference: bool = True, samples: int = 33,
                         rapid_cap: float = RAPID_DECAY_CAP) -> ConditionReport:
    """Fitted-slope audit of ``d^kappa psi_hat = O(|xi|^(-n-m))`` as ``xi -> inf``.

    ``details['rapidly_decreasing']`` is set when the test also passes with
    ``m = rapid_cap``.
    """
    n = k.dim
    fits = _decay_fits(k, window, Lambda, finite_difference, samples, -math.inf)
    witness, summary, ok = [], [], True
    worst_all = -math.inf
    for kappa, slopes, dirs in fits:
        target = -n - m + slack
        worst = int(np.argmax(slopes))
        worst_all = max(worst_all, slopes[worst])
        summary.append({"kappa": list(kappa), "max_slope": slopes[worst], "target": target})
        if slopes[worst] > target:
            ok = False
            witness.append({"kappa": list(kappa), "direction": dirs[worst].tolist(),
                            "slope": slopes[worst], "target": target})
    rapid = worst_all <= -n - rapid_cap + slack
    return ConditionReport(Condition.C3, ok, witness if not ok else summary, slack,
                           {"m": m, "Lambda": Lambda, "window": list(window),
                            "rapidly_decreasing": bool(rapid), "max_slope": worst_all})


# --- spatial side ----------------------------------------------------------


def spatial_kernel(k: KernelSpec, grid: GridSpec, j: float = 0) -> SampledField:
    """The periodised dyadic dilate ``psi_j`` sampled on the grid."""
    return inverse_transform(spectral_field(grid, k.on_lattice(grid, 2.0 ** (-j))))


def _moment_axis(grid: GridSpec, power: int) -> np.ndarray:
    x = grid.axis ** power
    # the sample at -L/2 stands for both ends of the fundamental domain
    half = grid.extent / 2
    x[0] = 0.5 * ((-half) ** power + half ** power)
    return x


def vanishing_moments(k: KernelSpec, grid: GridSpec, maxdeg: int) -> np.ndarray:
    """Grid quadrature of ``int x^kappa psi(x) dx`` for every ``|kappa| <= maxdeg``.

    The order of the returned vector is :func:`multi_indices` ``(dim, maxdeg)``.
    """
    psi = spatial_kernel(k, grid).values
    out = []
    for kappa in multi_indices(grid.dim, maxdeg):
        w = np.ones(grid.shape)
        for axis, power in enumerate(kappa):
            shape = [1] * grid.dim
            shape[axis] = grid.samples
            w = w * _moment_axis(grid, power).reshape(shape)
        out.append(np.sum(w * psi) * grid.cell_measure)
    return np.array(out, dtype=complex)


def weighted_l1(k: KernelSpec, grid: GridSpec, ell: float) -> float:
    """Grid quadrature of ``int (1+|x|)^ell |psi(x)| dx`` over the torus."""
    if not ell >= 0:
        raise DomainError(f"ell must be >= 0, got {ell}")
    psi = spatial_kernel(k, grid).values
    weight = (1.0 + grid.centred_distance) ** ell
    return float(np.sum(weight * np.abs(psi)) * grid.cell_measure)


def weighted_l1_study(k: KernelSpec, grid: GridSpec, ell: float, doublings: int = 2,
                      ratio_threshold: float = 0.95) -> ConditionReport:
    """Track :func:`weighted_l1` as the torus doubles (spacing fixed).

    The increments of a convergent integral shrink geometrically; a ratio of
    successive increments at or above ``ratio_threshold`` is the divergence
    signature.
    """
    values = []
    g = grid
    for _ in range(doublings + 1):
        values.append(weighted_l1(k, g, ell))
        g = GridSpec(g.dim, 2 * g.extent, 2 * g.samples)
    inc = np.diff(values)
    scale = max(abs(values[-1]), 1e-300)
    if np.all(np.abs(inc) <= 1e-9 * scale):
        ratios, ok = [0.0] * (len(inc) - 1), True
    else:
        ratios = [float(abs(inc[i + 1]) / max(abs(inc[i]), 1e-300)) for i in range(len(inc) - 1)]
        ok = all(r < ratio_threshold for r in ratios)
    extents = [grid.extent * 2 ** i for i in range(doublings + 1)]
    return ConditionReport(Condition.WEIGHTED_L1, bool(ok),
                           [{"extent": e, "value": v} for e, v in zip(extents, values)],
                           ratio_threshold, {"ell": ell, "increment_ratios": ratios})
