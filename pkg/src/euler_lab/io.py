"""File formats: header-plus-binary field snapshots, profile files, CSV series and JSON output.

A snapshot file is one line of JSON followed by the raw little-endian float64
values of each named field in header order, row-major with the radial (or R)
index outer. Analytic profile files carry only the header with the family tag.
"""

from __future__ import annotations

import csv
import glob as globlib
import json
import math
import os
from pathlib import Path
from typing import Any

import numpy as np

from euler_lab.fields import GridSpec, ScalarField2D, State
from euler_lab.selfsim.profiles import AnalyticProfileSet, GridProfileSet, ProfileSet, profile_from_tag

SCHEMA_VERSION = 1
STATE_FIELDS = ("u1", "omega1", "psi1")
PROFILE_FIELDS = ("U", "Omega", "Psi")
_DTYPE = np.dtype("<f8")


class SnapshotFormatError(ValueError):
    """A snapshot or profile file is malformed, truncated or of an unexpected kind."""


# -- JSON with 17 significant digits ----------------------------------------


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def dumps(obj: Any, indent: int | None = None) -> str:
    """JSON text in which every float is written with 17 significant digits."""
    pad = "" if indent is None else "\n"

    def enc(o, level):
        step = " " * (indent or 0)
        inner, outer = pad + step * (level + 1), pad + step * level
        colon = ":" if indent is None else ": "
        if isinstance(o, bool) or o is None:
            return {True: "true", False: "false", None: "null"}[o]
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return format_float(float(o))
        if isinstance(o, str):
            return _json_string(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [inner + _json_string(str(k)) + colon + enc(v, level + 1) for k, v in o.items()]
            return "{" + ",".join(items) + outer + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            seq = o.tolist() if isinstance(o, np.ndarray) else o
            if not seq:
                return "[]"
            return "[" + ",".join(inner + enc(v, level + 1) for v in seq) + outer + "]"
        raise TypeError(f"cannot encode {type(o).__name__} as JSON")

    return enc(obj, 0)


def _json_string(s: str) -> str:
    return json.dumps(s)


def loads(text: str) -> Any:
    return json.loads(text)


# -- raw snapshot container --------------------------------------------------


def write_raw(path, header: dict[str, Any], arrays: list[np.ndarray]) -> None:
    header = dict(header, schema=SCHEMA_VERSION)
    line = dumps(header)
    if "\n" in line:
        raise ValueError("header must serialise to a single line")
    with open(path, "wb") as fh:
        fh.write(line.encode("utf-8") + b"\n")
        for a in arrays:
            fh.write(np.ascontiguousarray(a, dtype=_DTYPE).tobytes(order="C"))


def read_raw(path, shape_of) -> tuple[dict[str, Any], list[np.ndarray]]:
    """Read header and payload; ``shape_of(header)`` gives the per-field shape."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise SnapshotFormatError(f"cannot read {path}: {exc}") from exc
    nl = data.find(b"\n")
    if nl < 0:
        raise SnapshotFormatError(f"{path}: missing header line")
    try:
        header = loads(data[:nl].decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as exc:
        raise SnapshotFormatError(f"{path}: header is not valid JSON") from exc
    if not isinstance(header, dict) or header.get("schema") != SCHEMA_VERSION:
        raise SnapshotFormatError(f"{path}: unsupported schema {header.get('schema') if isinstance(header, dict) else None!r}")
    names = header.get("fields", [])
    try:
        shape = tuple(int(n) for n in shape_of(header))
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotFormatError(f"{path}: header lacks shape information") from exc
    payload = data[nl + 1 :]
    count = int(np.prod(shape)) if names else 0
    expected = _DTYPE.itemsize * count * len(names)
    if len(payload) != expected:
        raise SnapshotFormatError(f"{path}: payload has {len(payload)} bytes, expected {expected}")
    flat = np.frombuffer(payload, dtype=_DTYPE)
    arrays = [flat[k * count : (k + 1) * count].reshape(shape).astype(float) for k in range(len(names))]
    return header, arrays


# -- states ------------------------------------------------------------------


def _grid_header(grid: GridSpec) -> dict[str, Any]:
    return {"nr": grid.nr, "nz": grid.nz, "L": grid.L}


def write_state(path, s: State, tags: dict[str, Any] | None = None) -> None:
    header = {"kind": "state", "grid": _grid_header(s.grid), "t": s.t, "fields": list(STATE_FIELDS), "tags": tags or {}}
    write_raw(path, header, [s.u1.values, s.omega1.values, s.psi1.values])


def read_state(path) -> State:
    header, arrays = read_raw(path, lambda h: (h["grid"]["nr"], h["grid"]["nz"]))
    if header.get("kind") != "state" or tuple(header.get("fields", ())) != STATE_FIELDS:
        raise SnapshotFormatError(f"{path}: not a state snapshot")
    g = header["grid"]
    try:
        grid = GridSpec(int(g["nr"]), int(g["nz"]), float(g["L"]))
        fields = [ScalarField2D(grid, a) for a in arrays]
        return State(float(header["t"]), *fields)
    except ValueError as exc:
        raise SnapshotFormatError(f"{path}: {exc}") from exc


def read_states(pattern: str) -> list[State]:
    paths = sorted(globlib.glob(pattern))
    return sorted((read_state(p) for p in paths), key=lambda s: s.t)


# -- profiles ----------------------------------------------------------------


def write_profile(path, ps: ProfileSet, extra: dict[str, Any] | None = None) -> None:
    if isinstance(ps, AnalyticProfileSet):
        if ps.tag is None:
            raise ValueError("only tagged analytic profiles (exact families) can be written without sampling")
        header = {"kind": "profile-analytic", "family": ps.tag, "fields": [], "tags": extra or {}}
        write_raw(path, header, [])
        return
    if not isinstance(ps, GridProfileSet):
        raise TypeError(f"cannot serialise {type(ps).__name__}")
    header = {
        "kind": "profile-grid",
        "lattice": {"R": ps.R_nodes, "Z": ps.Z_nodes},
        "fields": list(PROFILE_FIELDS),
        "tags": dict(extra or {}, **({"family": ps.tag} if ps.tag else {})),
    }
    write_raw(path, header, [ps.U, ps.Omega, ps.Psi])


def read_profile(path) -> ProfileSet:
    def shape_of(h):
        if h.get("kind") == "profile-analytic":
            return (0,)
        return (len(h["lattice"]["R"]), len(h["lattice"]["Z"]))

    header, arrays = read_raw(path, shape_of)
    kind = header.get("kind")
    try:
        if kind == "profile-analytic":
            return profile_from_tag(header["family"])
        if kind == "profile-grid":
            if tuple(header.get("fields", ())) != PROFILE_FIELDS:
                raise SnapshotFormatError(f"{path}: unexpected profile fields {header.get('fields')}")
            lat = header["lattice"]
            return GridProfileSet(np.array(lat["R"], float), np.array(lat["Z"], float), *arrays, tag=header["tags"].get("family"))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SnapshotFormatError):
            raise
        raise SnapshotFormatError(f"{path}: invalid profile file ({exc})") from exc
    raise SnapshotFormatError(f"{path}: not a profile file (kind {kind!r})")


# -- CSV series --------------------------------------------------------------


def write_csv(path, columns: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([format_float(float(row[c])) for c in columns])


def read_series_csv(path, t_column: str = "t", value_column: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Two numeric columns from a headed CSV; the value column defaults to ``sup`` or else the second column."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise ValueError(f"{path}: expected a header row and data rows")
    head = [h.strip() for h in rows[0]]
    if t_column not in head:
        raise ValueError(f"{path}: no {t_column!r} column")
    if value_column is None:
        value_column = "sup" if "sup" in head else next((h for h in head if h != t_column), None)
    if value_column not in head:
        raise ValueError(f"{path}: no {value_column!r} column")
    it, iv = head.index(t_column), head.index(value_column)
    try:
        t = np.array([float(r[it]) for r in rows[1:]])
        v = np.array([float(r[iv]) for r in rows[1:]])
    except (IndexError, ValueError) as exc:
        raise ValueError(f"{path}: malformed data row ({exc})") from exc
    return t, v


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    if not os.access(p, os.W_OK):
        raise PermissionError(f"output directory {p} is not writable")
    return p
