"""Field serialization, atomic output and the on-disk family cache.

Two field formats are supported:

* text (``.csv``): ``#``-prefixed header lines followed by one ``re,im``
  row per sample in C order, printed with 17 significant digits;
* binary (any other suffix): one JSON header line, then the values as
  little-endian complex128.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import UsageError
from .grid import GridSpec, Representation, SampledField, spectral_field
from .lp_analysis import LPFamily, build_lp_family

__all__ = [
    "FORMAT_VERSION",
    "write_field",
    "read_field",
    "atomic_write_text",
    "dumps_json",
    "cache_dir",
    "cached_family",
]

FORMAT_VERSION = 1
_MAGIC = "lpkit-field"
CACHE_ENV = "LPKIT_CACHE_DIR"


def atomic_write_text(path, text: str):
    """Write ``text`` to a temporary sibling, then rename it over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_bytes(path, data: bytes):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _header(f: SampledField) -> dict:
    return {"format": _MAGIC, "version": FORMAT_VERSION, **f.grid.as_dict(),
            "representation": f.representation.value}


def field_to_text(f: SampledField) -> str:
    lines = [f"# {_MAGIC} v{FORMAT_VERSION}"]
    lines += [f"# {k}={v}" for k, v in _header(f).items() if k not in ("format", "version")]
    lines.append("# re,im")
    flat = f.values.ravel()
    lines += [f"{v.real!r},{v.imag!r}" for v in flat.tolist()]
    return "\n".join(lines) + "\n"


def field_from_text(text: str) -> SampledField:
    meta, rows = {}, []
    lines = text.splitlines()
    if not lines or not lines[0].startswith(f"# {_MAGIC}"):
        raise UsageError("not an lpkit field file")
    for line in lines[1:]:
        if line.startswith("#"):
            key, sep, val = line[1:].strip().partition("=")
            if sep:
                meta[key] = val
        elif line.strip():
            re_, _, im = line.partition(",")
            rows.append(complex(float(re_), float(im)))
    try:
        grid = GridSpec(int(meta["dim"]), float(meta["extent"]), int(meta["samples"]))
        rep = Representation(meta["representation"])
    except KeyError as exc:
        raise UsageError(f"field header lacks {exc}") from exc
    return SampledField(grid, np.array(rows, dtype=complex), rep)


def field_to_bytes(f: SampledField) -> bytes:
    head = json.dumps(_header(f), sort_keys=True).encode() + b"\n"
    return head + np.ascontiguousarray(f.values, dtype="<c16").tobytes()


def field_from_bytes(data: bytes) -> SampledField:
    head, sep, body = data.partition(b"\n")
    if not sep:
        raise UsageError("not an lpkit field file")
    try:
        meta = json.loads(head)
    except ValueError as exc:
        raise UsageError("not an lpkit field file") from exc
    if meta.get("format") != _MAGIC:
        raise UsageError("not an lpkit field file")
    grid = GridSpec(meta["dim"], meta["extent"], meta["samples"])
    vals = np.frombuffer(body, dtype="<c16").astype(complex)
    return SampledField(grid, vals, Representation(meta["representation"]))


def write_field(path, f: SampledField):
    if str(path).endswith(".csv"):
        atomic_write_text(path, field_to_text(f))
    else:
        _atomic_write_bytes(path, field_to_bytes(f))


def read_field(path) -> SampledField:
    path = Path(path)
    if path.suffix == ".csv":
        return field_from_text(path.read_text(encoding="utf-8"))
    return field_from_bytes(path.read_bytes())


# --- family cache ------------------------------------------------------------


def cache_dir():
    val = os.environ.get(CACHE_ENV)
    return Path(val) if val else None


def _family_key(grid: GridSpec, jmin: int, jmax: int) -> str:
    blob = json.dumps({"grid": grid.as_dict(), "window": [jmin, jmax], "kernel": "lp",
                       "version": FORMAT_VERSION}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def cached_family(grid: GridSpec, jmin: int, jmax: int, directory=None) -> LPFamily:
    """:func:`build_lp_family`, reusing multiplier tables stored under ``directory``.

    ``directory`` defaults to ``$LPKIT_CACHE_DIR``; without either the
    family is simply built.  Each scale is stored as a spectral field.
    """
    fam = build_lp_family(grid, jmin, jmax)
    root = Path(directory) if directory is not None else cache_dir()
    if root is None:
        return fam
    where = root / f"lp-{_family_key(grid, jmin, jmax)}"
    files = [where / f"q_{j}.lpf" for j in fam.scales]
    if all(p.exists() for p in files):
        try:
            tables = [read_field(p).values.real for p in files]
            fam.__dict__["qhat"] = np.stack(tables)
            return fam
        except (UsageError, ValueError, OSError):
            pass  # rebuild a damaged cache entry
    for p, j in zip(files, fam.scales):
        write_field(p, spectral_field(grid, fam.table(j)))
    return fam
