"""Plain-text formats: filtrations, point clouds, graphs, profiles, diagrams."""
from __future__ import annotations

import csv
import json
import math
import os
from pathlib import Path

import numpy as np

from .complex import FiltrationError, MultiFiltration
from .euler import GridSpec, ProfileGrid
from .graph import Graph

__all__ = [
    "ParseError",
    "format_number",
    "read_attributes",
    "read_filtration",
    "read_graph",
    "read_point_cloud",
    "read_profile",
    "write_filtration",
    "write_json",
    "write_point_cloud",
    "write_profile",
]


class ParseError(ValueError):
    def __init__(self, path, lineno: int | None, message: str):
        self.path, self.lineno = str(path), lineno
        where = f"{path}:{lineno}" if lineno is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.message = message

    def __reduce__(self):
        return type(self), (self.path, self.lineno, self.message)


def format_number(x) -> str:
    """Shortest round-trip decimal; integers without a fractional part."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            yield lineno, line.rstrip("\n")


def read_filtration(path) -> MultiFiltration:
    """Read ``# m=<int>`` then ``v0 v1 ... ; t1 ... tm`` lines."""
    m = None
    simplices, values = [], []
    for lineno, line in _lines(path):
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            body = text[1:].strip().replace(" ", "")
            if body.startswith("m=") and m is None:
                try:
                    m = int(body[2:])
                except ValueError:
                    raise ParseError(path, lineno, f"bad header {text!r}") from None
                if m < 1:
                    raise ParseError(path, lineno, "m must be >= 1")
            continue
        if m is None:
            raise ParseError(path, lineno, "missing '# m=<int>' header before the first simplex")
        left, sep, right = text.partition(";")
        if not sep:
            raise ParseError(path, lineno, "expected '<vertices> ; <values>'")
        try:
            verts = [int(tok) for tok in left.split()]
            vals = [float(tok) for tok in right.split()]
        except ValueError as exc:
            raise ParseError(path, lineno, str(exc)) from None
        if not verts:
            raise ParseError(path, lineno, "simplex has no vertices")
        if len(vals) != m:
            raise ParseError(path, lineno, f"expected {m} values, got {len(vals)}")
        if any(v < 0 for v in verts) or len(set(verts)) != len(verts):
            raise ParseError(path, lineno, "vertices must be distinct non-negative integers")
        simplices.append(verts)
        values.append(vals)
    if m is None:
        raise ParseError(path, None, "missing '# m=<int>' header")
    try:
        return MultiFiltration(simplices, np.array(values, dtype=float).reshape(len(values), m), m=m)
    except FiltrationError as exc:
        raise ParseError(path, None, str(exc)) from None


def write_filtration(filtration: MultiFiltration, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# m={filtration.m}\n")
        for simplex, vals in filtration:
            fh.write(" ".join(map(str, simplex)) + " ; " + " ".join(format_number(v) for v in vals) + "\n")


def read_point_cloud(path, skip_header: bool = False) -> np.ndarray:
    rows = []
    width = None
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if skip_header and lineno == 1:
                continue
            if not row or all(not c.strip() for c in row):
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ParseError(path, lineno, f"expected {width} coordinates, got {len(vals)}")
            if not all(math.isfinite(v) for v in vals):
                raise ParseError(path, lineno, "non-finite coordinate")
            rows.append(vals)
    if not rows:
        raise ParseError(path, None, "no points")
    return np.array(rows, dtype=float)


def write_point_cloud(points, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in np.asarray(points, dtype=float):
            fh.write(",".join(format_number(v) for v in p) + "\n")


def read_attributes(path, skip_header: bool = False) -> np.ndarray:
    return read_point_cloud(path, skip_header=skip_header)


def read_graph(path, attributes=None) -> Graph:
    """Edge list ``u v`` per line; optional ``# n=<int>`` header."""
    n = None
    edges = []
    for lineno, line in _lines(path):
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            body = text[1:].strip().replace(" ", "")
            if body.startswith("n="):
                try:
                    n = int(body[2:])
                except ValueError:
                    raise ParseError(path, lineno, f"bad header {text!r}") from None
            continue
        parts = text.replace(",", " ").split()
        if len(parts) != 2:
            raise ParseError(path, lineno, "expected 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(path, lineno, str(exc)) from None
        if u == v:
            raise ParseError(path, lineno, "self-loop")
        if u < 0 or v < 0:
            raise ParseError(path, lineno, "negative vertex index")
        edges.append((min(u, v), max(u, v)))
    if len(set(edges)) != len(edges):
        raise ParseError(path, None, "duplicate edge")
    try:
        return Graph.from_edges(edges, n=n, attributes=attributes)
    except ValueError as exc:
        raise ParseError(path, None, str(exc)) from None


def write_profile(grid: ProfileGrid, prefix, extra: dict | None = None) -> tuple[Path, Path]:
    """Write ``<prefix>.csv`` (row-major values, one per line) and ``<prefix>.json``."""
    prefix = Path(prefix)
    csv_path = prefix.with_name(prefix.name + ".csv")
    json_path = prefix.with_name(prefix.name + ".json")
    data = grid.flat
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        for v in data.tolist():
            fh.write(format_number(v) + "\n")
    meta = grid.sidecar()
    if extra:
        meta.update(extra)
    write_json(meta, json_path)
    return csv_path, json_path


def read_profile(prefix) -> ProfileGrid:
    prefix = Path(prefix)
    with open(prefix.with_name(prefix.name + ".json"), encoding="utf-8") as fh:
        meta = json.load(fh)
    kind = meta.pop("kind", "ecp")
    spec = GridSpec(tuple(meta.pop("axis_min")), tuple(meta.pop("axis_max")), tuple(meta.pop("shape")))
    meta.pop("m", None)
    raw = [line.strip() for line in open(prefix.with_name(prefix.name + ".csv"), encoding="utf-8") if line.strip()]
    dtype = np.int64 if kind == "ecp" else float
    data = np.array([dtype(float(x)) if dtype is float else int(x) for x in raw], dtype=dtype)
    return ProfileGrid(spec, data.reshape(spec.shape), kind=kind, meta=meta)


def write_json(doc, path) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
