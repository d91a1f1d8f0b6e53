"""Command-line front end.

Every subcommand reads an optional INI file (``--config``), lets flags
override it, validates the merged configuration, runs, and writes a JSON
report (sorted keys, ``format_version``, full resolved config).  Exit codes:
0 pass, 1 gate or verification failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io as _io
import math
import sys
from typing import Optional

import numpy as np

from . import __version__
from .corpus import FAMILIES, CorpusSpec, generate
from .errors import LPKitError
from .grid import GridSpec, lp_norm
from .io import atomic_write_text, cached_family, dumps_json, field_to_bytes, read_field, write_field
from .kernels import (
    RAPID_DECAY_CAP,
    KernelSpec,
    _jsonable,
    check_decay_infinity,
    check_decay_origin,
    check_tauberian,
    multi_indices,
    vanishing_moments,
    weighted_l1,
    weighted_l1_study,
)
from .lp_analysis import LPFamily, build_calderon_pair, reconstruct, resolve_kernel
from .norms import ENGINES, NormParams, compute_norm
from .verify import (
    Engine,
    check_dilation_lemma,
    check_stromberg,
    norm_equivalence_report,
)

FORMAT_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MOMENT_TOL = 1e-5
MONOTONE_SLACK = 1e-14

GRID_DEFAULTS = {1: (64.0, 1024), 2: (32.0, 256), 3: (16.0, 64)}

# section -> key -> default (strings, as in the INI file)
DEFAULTS = {
    "grid": {"dim": "1", "extent": "", "samples": ""},
    "scales": {"jmin": "-4", "jmax": "6"},
    "corpus": {"family": "", "seed": "0"},
    "output": {"json": "", "csv": ""},
    "check-kernel": {"kernel": "", "alpha": "0", "p": "2", "r": "", "m": "", "ell": ""},
    "norm": {"kernel": "lp", "engine": "besov", "alpha": "0", "p": "2", "q": "2",
             "lambda": "", "input": "", "index": "0"},
    "calderon": {"kernel": "poisson:beta=1", "k": "", "gate": "1e-6"},
    "equivalence": {"a": "lp", "b": "poisson:beta=2", "engine": "besov", "alpha": "0.5",
                    "p": "2", "q": "2", "lambda": "", "gate": "100", "warn": "30"},
    "stromberg": {"kernel": "poisson:beta=1", "r": "1", "lambda": "2", "beta": "1",
                  "j": "", "kmax": ""},
    "dilation": {"eta": "lp", "psi": "poisson:beta=1", "n": "2", "m": "1",
                 "ratios": "2,4,8,16,32,64"},
    "corpus-out": {"dir": "", "format": "lpf"},
}

COMMAND_CORPUS = {
    "norm": "random_bandlimited",
    "calderon": "gaussian",
    "equivalence": "modulated_gaussian",
    "stromberg": "single_block",
    "corpus": "",
}

STROMBERG_SCALES = "-1,1,3"


class ConfigError(LPKitError):
    """Invalid configuration; the message starts with the key path."""


# --- configuration -----------------------------------------------------------


def _sections_for(command: str) -> list:
    own = {"corpus": "corpus-out"}.get(command, command)
    return ["grid", "scales", "corpus", "output", own]


def load_config(command: str, path: Optional[str], overrides: dict, params: list) -> dict:
    """Merge defaults, the INI file and flag overrides into nested string dicts."""
    cfg = {s: dict(DEFAULTS[s]) for s in _sections_for(command)}
    if command in COMMAND_CORPUS and COMMAND_CORPUS[command]:
        cfg["corpus"]["family"] = COMMAND_CORPUS[command]
        if command == "stromberg":
            cfg["corpus"]["scales"] = STROMBERG_SCALES
    if path:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str.lower
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"config: {exc}") from exc
        for section in parser.sections():
            if section not in cfg:
                if section in DEFAULTS:
                    continue  # belongs to another command
                raise ConfigError(f"{section}: unknown section")
            for key, val in parser.items(section):
                if key not in cfg[section] and section != "corpus":
                    raise ConfigError(f"{section}.{key}: unknown key")
                cfg[section][key] = val.strip()
    for dotted, val in overrides.items():
        if val is None:
            continue
        section, key = dotted.split(".", 1)
        cfg[section][key] = str(val)
    for item in params:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"corpus.{item}: expected key=value")
        cfg["corpus"][key.strip().lower()] = val.strip()
    return cfg


def _num(cfg, section, key, kind=float, allow_empty=False):
    raw = cfg[section][key]
    if raw == "" and allow_empty:
        return None
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r} as {kind.__name__}") from exc


def _floats(cfg, section, key) -> tuple:
    raw = cfg[section][key]
    try:
        return tuple(float(v) for v in raw.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: expected comma-separated numbers") from exc


def _grid(cfg) -> GridSpec:
    dim = _num(cfg, "grid", "dim", int)
    if dim not in GRID_DEFAULTS:
        raise ConfigError(f"grid.dim: must be 1, 2 or 3, got {dim}")
    ext = _num(cfg, "grid", "extent", float, True) or GRID_DEFAULTS[dim][0]
    n = _num(cfg, "grid", "samples", int, True) or GRID_DEFAULTS[dim][1]
    cfg["grid"].update(extent=repr(float(ext)), samples=str(n))
    try:
        return GridSpec(dim, ext, n)
    except LPKitError as exc:
        raise ConfigError(f"grid: {exc}") from exc


def _window(cfg) -> tuple:
    jmin, jmax = _num(cfg, "scales", "jmin", int), _num(cfg, "scales", "jmax", int)
    if jmin > jmax:
        raise ConfigError(f"scales: jmin={jmin} exceeds jmax={jmax}")
    return jmin, jmax


def _family(cfg, grid):
    jmin, jmax = _window(cfg)
    try:
        return cached_family(grid, jmin, jmax)
    except LPKitError as exc:
        raise ConfigError(f"scales: {exc}") from exc


def _kernel(cfg, section, key, grid, family):
    spec = cfg[section][key]
    if not spec:
        raise ConfigError(f"{section}.{key}: a kernel id is required")
    try:
        k = resolve_kernel(spec, grid, family)
    except KeyError as exc:
        raise ConfigError(f"{section}.{key}: unknown kernel {spec!r}") from exc
    except LPKitError as exc:
        raise ConfigError(f"{section}.{key}: {exc}") from exc
    return k


def _params(cfg, section) -> NormParams:
    vals = {key: _num(cfg, section, key) for key in ("alpha", "p", "q")}
    lam = _num(cfg, section, "lambda", float, True)
    for key, v in (("p", vals["p"]), ("q", vals["q"]), ("lambda", lam)):
        if v is not None and not v > 0:
            raise ConfigError(f"{section}.{key}: must be positive, got {v:g}")
    try:
        return NormParams(vals["alpha"], vals["p"], vals["q"], lam)
    except LPKitError as exc:
        raise ConfigError(f"{section}: {exc}") from exc


def _corpus_spec(cfg) -> CorpusSpec:
    c = dict(cfg["corpus"])
    fam = c.pop("family")
    if fam not in FAMILIES:
        raise ConfigError(f"corpus.family: unknown family {fam!r}; expected one of {FAMILIES}")
    seed = _num(cfg, "corpus", "seed", int)
    c.pop("seed")
    params = {}
    for key, raw in sorted(c.items()):
        try:
            vals = tuple(float(v) for v in raw.split(",") if v.strip())
        except ValueError as exc:
            raise ConfigError(f"corpus.{key}: expected comma-separated numbers") from exc
        if key in ("count", "cycles", "freq") and len(vals) == 1:
            params[key] = vals[0] if key != "count" else int(vals[0])
        elif key in ("ks", "scales", "at"):
            params[key] = tuple(int(v) for v in vals)
        else:
            params[key] = vals
    return CorpusSpec(fam, params, seed)


def _corpus(cfg, grid) -> list:
    spec = _corpus_spec(cfg)
    try:
        return generate(spec, grid)
    except LPKitError as exc:
        raise ConfigError(f"corpus: {exc}") from exc


# --- output ------------------------------------------------------------------


def _emit(cfg, command, result, passed, csv_rows=None, csv_header=None) -> int:
    code = EXIT_OK if passed else EXIT_FAIL
    doc = {"format_version": FORMAT_VERSION, "lpkit_version": __version__,
           "command": command, "config": cfg, "passed": bool(passed), "exit_code": code,
           "result": _jsonable(result)}
    text = dumps_json(doc)
    out = cfg["output"]["json"]
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)
    if cfg["output"]["csv"] and csv_rows is not None:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(csv_header)
        for row in csv_rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        atomic_write_text(cfg["output"]["csv"], buf.getvalue())
    return code


# --- commands ----------------------------------------------------------------


def _finite_or_cap(v) -> float:
    return RAPID_DECAY_CAP if v is None or math.isinf(v) else float(v)


def cmd_check_kernel(cfg) -> int:
    sec = "check-kernel"
    grid = _grid(cfg)
    family = _family(cfg, grid) if cfg[sec]["kernel"] == "lp" else None
    k = _kernel(cfg, sec, "kernel", grid, family)
    if isinstance(k, LPFamily):
        k = k.kernel()
    alpha, p = _num(cfg, sec, "alpha"), _num(cfg, sec, "p")
    if not p > 0:
        raise ConfigError(f"{sec}.p: must be positive")
    n = grid.dim
    Lambda = float(k.params.get("Lambda", 0.0))
    r_decl = _num(cfg, sec, "r", float, True)
    r = float(k.params.get("r", 0.0)) if r_decl is None else r_decl
    m_decl = _num(cfg, sec, "m", float, True)
    m = _finite_or_cap(k.params.get("m") if m_decl is None else m_decl)
    ell = _num(cfg, sec, "ell", float, True)
    if ell is None:
        ell = max(0.0, alpha - n / p + 0.1)
    taub = check_tauberian(k)
    c1 = check_decay_origin(k, _finite_or_cap(r), Lambda)
    c3 = check_decay_infinity(k, m, Lambda)
    wl1 = weighted_l1_study(k, grid, ell)
    deg = math.floor(alpha) if alpha >= 0 else -1
    moments = vanishing_moments(k, grid, deg) if deg >= 0 else np.zeros(0)
    scale = max(1.0, weighted_l1(k, grid, 0.0))
    mom_ok = bool(np.all(np.abs(moments) <= MOMENT_TOL * scale))
    r_ok = r > alpha
    conditions = {
        "C1": {**c1.to_json(), "r": r, "r_exceeds_alpha": r_ok, "passed": c1.passed and r_ok},
        "C2": taub.to_json(),
        "C3": c3.to_json(),
        "weightedL1": wl1.to_json(),
        "moments": {"condition": "moments", "max_degree": deg, "tolerance": MOMENT_TOL * scale,
                    "indices": [list(i) for i in multi_indices(n, deg)] if deg >= 0 else [],
                    "values": moments.tolist(), "passed": mom_ok},
    }
    passed = all(c["passed"] for c in conditions.values())
    result = {"kernel": k.name, "alpha": alpha, "p": p, "ell": ell, "m": m,
              "conditions": conditions, "certificate": passed}
    return _emit(cfg, "check-kernel", result, passed)


def cmd_norm(cfg) -> int:
    sec = "norm"
    grid = _grid(cfg)
    window = _window(cfg)
    family = _family(cfg, grid) if cfg[sec]["kernel"] == "lp" else None
    k = _kernel(cfg, sec, "kernel", grid, family)
    engine = cfg[sec]["engine"]
    if engine not in ENGINES or engine.startswith("hardy"):
        raise ConfigError(f"{sec}.engine: unsupported engine {engine!r}")
    params = _params(cfg, sec)
    if cfg[sec]["input"]:
        try:
            f = read_field(cfg[sec]["input"])
        except (OSError, LPKitError) as exc:
            raise ConfigError(f"{sec}.input: {exc}") from exc
        if f.grid != grid:
            # a stored field carries its own grid
            grid = f.grid
            cfg["grid"].update({kk: str(v) for kk, v in grid.as_dict().items()})
            family = _family(cfg, grid) if cfg[sec]["kernel"] == "lp" else None
            k = _kernel(cfg, sec, "kernel", grid, family)
        source = {"input": cfg[sec]["input"]}
    else:
        corpus = _corpus(cfg, grid)
        idx = _num(cfg, sec, "index", int)
        if not 0 <= idx < len(corpus):
            raise ConfigError(f"{sec}.index: {idx} outside corpus of size {len(corpus)}")
        f = corpus[idx]
        source = {"corpus_index": idx}
    try:
        res = compute_norm(engine, f, params, k, window)
    except LPKitError as exc:
        raise ConfigError(f"{sec}: {exc}") from exc
    record = res.to_json()
    record.update(source)
    record["lp_norm_2"] = lp_norm(f.spatial(), 2)
    rows = [(j, t) for j, t in zip(range(window[0], window[1] + 1), res.terms)]
    return _emit(cfg, "norm", record, True, rows, ("j", "term"))


def cmd_calderon(cfg) -> int:
    sec = "calderon"
    grid = _grid(cfg)
    family = _family(cfg, grid)
    k = _kernel(cfg, sec, "kernel", grid, family)
    gate = _num(cfg, sec, "gate")
    k0 = _num(cfg, sec, "k", int, True)
    k0 = family.jmin if k0 is None else k0
    try:
        pair = build_calderon_pair(k, family)
    except LPKitError as exc:
        raise ConfigError(f"{sec}.kernel: {exc}") from exc
    corpus = _corpus(cfg, grid)
    studies, rows, passed = [], [], True
    for i, g in enumerate(corpus):
        Ms = list(range(k0 + 1, family.jmax + 1))
        if not Ms:
            raise ConfigError(f"{sec}.k: no scales above k={k0} in the window")
        errs = [reconstruct(g, pair, k0, M).relative_error for M in Ms]
        mono = all(b <= a + MONOTONE_SLACK for a, b in zip(errs, errs[1:]))
        ok = mono and errs[-1] < gate
        passed &= ok
        studies.append({"index": i, "M": Ms, "relative_error": errs, "monotone": mono,
                        "final_error": errs[-1], "passed": ok})
        rows += [(i, M, e) for M, e in zip(Ms, errs)]
    result = {"pair": pair.report(), "k": k0, "gate": gate, "studies": studies}
    return _emit(cfg, "calderon", result, passed, rows, ("index", "M", "relative_error"))


def _engine(cfg, sec, key, grid, family, window):
    k = _kernel(cfg, sec, key, grid, family)
    name = cfg[sec]["engine"]
    if name not in ENGINES or name.startswith("hardy") or name == "triebel_infinity":
        raise ConfigError(f"{sec}.engine: unsupported engine {name!r}")
    return Engine(name, k, None if isinstance(k, LPFamily) else window)


def cmd_equivalence(cfg) -> int:
    sec = "equivalence"
    grid = _grid(cfg)
    window = _window(cfg)
    family = _family(cfg, grid)
    ea = _engine(cfg, sec, "a", grid, family, window)
    eb = _engine(cfg, sec, "b", grid, family, window)
    params = _params(cfg, sec)
    corpus = _corpus(cfg, grid)
    try:
        rep = norm_equivalence_report(corpus, ea, eb, params, gate=_num(cfg, sec, "gate"),
                                      warn_band=_num(cfg, sec, "warn"))
    except LPKitError as exc:
        raise ConfigError(f"{sec}: {exc}") from exc
    return _emit(cfg, "equivalence", rep.to_json(), rep.passed, rep.csv_rows(),
                 ("id", "value_a", "value_b", "ratio"))


def cmd_stromberg(cfg) -> int:
    sec = "stromberg"
    grid = _grid(cfg)
    family = _family(cfg, grid)
    k = _kernel(cfg, sec, "kernel", grid, family)
    r, lam, beta = (_num(cfg, sec, key) for key in ("r", "lambda", "beta"))
    kmax = _num(cfg, sec, "kmax", int, True)
    kmax = family.jmax if kmax is None else kmax
    j_fixed = _num(cfg, sec, "j", int, True)
    spec = _corpus_spec(cfg)
    corpus = _corpus(cfg, grid)
    if j_fixed is None:
        if spec.family != "single_block":
            raise ConfigError(f"{sec}.j: required unless the corpus is single_block")
        count = int(spec.params.get("count", 1))
        scales = [int(j) for j in spec.params.get("scales", (0,)) for _ in range(count)]
    else:
        scales = [j_fixed] * len(corpus)
    out, rows, passed = [], [], True
    for i, (f, j) in enumerate(zip(corpus, scales)):
        try:
            rep = check_stromberg(f, k, r, lam, beta, j, kmax)
        except LPKitError as exc:
            raise ConfigError(f"{sec}: {exc}") from exc
        passed &= rep.passed
        out.append({"index": i, "j": j, **rep.to_json()})
        rows.append((i, j, rep.empirical_C))
    return _emit(cfg, "stromberg", {"reports": out}, passed, rows, ("index", "j", "empirical_C"))


def cmd_dilation(cfg) -> int:
    sec = "dilation"
    grid = _grid(cfg)
    family = _family(cfg, grid)
    eta = _kernel(cfg, sec, "eta", grid, family)
    psi = _kernel(cfg, sec, "psi", grid, family)
    eta = eta.kernel() if isinstance(eta, LPFamily) else eta
    psi = psi.kernel() if isinstance(psi, LPFamily) else psi
    try:
        fit_i, fit_ii = check_dilation_lemma(eta, psi, _num(cfg, sec, "n", int),
                                             _num(cfg, sec, "m"), _floats(cfg, sec, "ratios"),
                                             grid)
    except LPKitError as exc:
        raise ConfigError(f"{sec}: {exc}") from exc
    rows = [(f.case, rr, v) for f in (fit_i, fit_ii) for rr, v in zip(f.ratios, f.values)]
    passed = fit_i.passed and fit_ii.passed
    return _emit(cfg, "dilation", {"case_i": fit_i.to_json(), "case_ii": fit_ii.to_json()},
                 passed, rows, ("case", "ratio", "value"))


def cmd_corpus(cfg) -> int:
    grid = _grid(cfg)
    spec = _corpus_spec(cfg)
    fields = _corpus(cfg, grid)
    fmt = cfg["corpus-out"]["format"]
    if fmt not in ("lpf", "csv"):
        raise ConfigError(f"corpus-out.format: expected lpf or csv, got {fmt!r}")
    outdir = cfg["corpus-out"]["dir"]
    items, rows = [], []
    for i, f in enumerate(fields):
        digest = hashlib.sha256(field_to_bytes(f)).hexdigest()
        entry = {"index": i, "sha256": digest, "l2": lp_norm(f, 2),
                 "max_abs": float(np.abs(f.values).max()),
                 "dc": float(abs(f.spectral().values.flat[0]))}
        if outdir:
            path = f"{outdir.rstrip('/')}/{spec.family}_{i:03d}.{fmt}"
            write_field(path, f)
            entry["path"] = path
        items.append(entry)
        rows.append((i, entry["l2"], digest))
    return _emit(cfg, "corpus", {"spec": spec.as_dict(), "fields": items}, True, rows,
                 ("index", "l2", "sha256"))


COMMANDS = {
    "check-kernel": cmd_check_kernel,
    "norm": cmd_norm,
    "calderon": cmd_calderon,
    "equivalence": cmd_equivalence,
    "stromberg": cmd_stromberg,
    "dilation": cmd_dilation,
    "corpus": cmd_corpus,
}


# --- argument parsing ---------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def add_argument(self, *args, **kwargs):
        dest = kwargs.get("dest", "")
        if "." in dest and "metavar" not in kwargs:
            kwargs["metavar"] = dest.rsplit(".", 1)[1].upper()
        return super().add_argument(*args, **kwargs)

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="INI file; flags override its values")
    p.add_argument("--dim", dest="grid.dim", help="ambient dimension (1, 2 or 3)")
    p.add_argument("--extent", dest="grid.extent", help="torus side length L")
    p.add_argument("--samples", dest="grid.samples", help="samples per axis (power of two)")
    p.add_argument("--scales", help="scale window as JMIN..JMAX")
    p.add_argument("--family", dest="corpus.family", help="corpus family")
    p.add_argument("--seed", dest="corpus.seed", help="corpus seed")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="corpus parameter (repeatable)")
    p.add_argument("--out", dest="output.json", help="JSON report path (default stdout)")
    p.add_argument("--csv", dest="output.csv", help="CSV plot-data path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lpkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lpkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check-kernel", help="audit kernel admissibility conditions")
    p.add_argument("kernel", nargs="?", help="kernel id, e.g. poisson:beta=1")
    for key in ("alpha", "p", "r", "m", "ell"):
        p.add_argument(f"--{key}", dest=f"check-kernel.{key}")
    _common(p)

    p = sub.add_parser("norm", help="compute a Besov or Triebel-Lizorkin norm")
    p.add_argument("--kernel", dest="norm.kernel")
    p.add_argument("--engine", dest="norm.engine", help=f"one of {', '.join(ENGINES[:5])}")
    for key in ("alpha", "p", "q", "lambda", "input", "index"):
        p.add_argument(f"--{key}", dest=f"norm.{key}")
    _common(p)

    p = sub.add_parser("calderon", help="reconstruction study for a Calderon pair")
    p.add_argument("--kernel", dest="calderon.kernel")
    p.add_argument("--k", dest="calderon.k", help="coarsest scale k (default jmin)")
    p.add_argument("--gate", dest="calderon.gate", help="final relative error bound")
    _common(p)

    p = sub.add_parser("equivalence", help="two-engine norm equivalence report")
    p.add_argument("--A", dest="equivalence.a", help="kernel of engine A")
    p.add_argument("--B", dest="equivalence.b", help="kernel of engine B")
    for key in ("engine", "alpha", "p", "q", "lambda", "gate", "warn"):
        p.add_argument(f"--{key}", dest=f"equivalence.{key}")
    _common(p)

    p = sub.add_parser("stromberg", help="pointwise maximal inequality audit")
    p.add_argument("--kernel", dest="stromberg.kernel")
    for key in ("r", "lambda", "beta", "j", "kmax"):
        p.add_argument(f"--{key}", dest=f"stromberg.{key}")
    _common(p)

    p = sub.add_parser("dilation", help="dilation envelope fits")
    p.add_argument("--eta", dest="dilation.eta")
    p.add_argument("--psi", dest="dilation.psi")
    p.add_argument("--N", dest="dilation.n", help="spatial decay power")
    p.add_argument("--m", dest="dilation.m", help="decay exponent")
    p.add_argument("--ratios", dest="dilation.ratios", help="comma-separated scale ratios")
    _common(p)

    p = sub.add_parser("corpus", help="generate a deterministic corpus")
    p.add_argument("--dir", dest="corpus-out.dir", help="directory for field files")
    p.add_argument("--format", dest="corpus-out.format", help="lpf (binary) or csv")
    _common(p)
    return parser


def _glue_negative(argv: list) -> list:
    # "--scales -4..6" would otherwise read -4..6 as an option
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in ("--scales", "--k", "--j", "--kmax", "--alpha") and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def _parse_scales(text: str) -> tuple:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise ConfigError(f"scales: expected JMIN..JMAX, got {text!r}")
    try:
        return int(lo), int(hi)
    except ValueError as exc:
        raise ConfigError(f"scales: expected integers, got {text!r}") from exc


def main(argv: Optional[list] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_glue_negative(argv))
    command = args.command
    ns = vars(args)
    overrides = {k: v for k, v in ns.items() if "." in k}
    if command == "check-kernel" and ns.get("kernel"):
        overrides["check-kernel.kernel"] = ns["kernel"]
    try:
        if ns.get("scales"):
            jmin, jmax = _parse_scales(ns["scales"])
            overrides["scales.jmin"], overrides["scales.jmax"] = jmin, jmax
        cfg = load_config(command, ns.get("config"), overrides, ns.get("param") or [])
        return COMMANDS[command](cfg)
    except LPKitError as exc:
        sys.stderr.write(f"lpkit {command}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
