"""Text formats: complexes, point clouds, hyperedges, resistance/measure tables.

Complex format, one simplex per line::

    # comment
    k v0 v1 ... vk [weight]

The weight is omitted when it equals 1.  Reals are written with ``repr`` (the
shortest string that round-trips to the same double).
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from collections.abc import Iterable

import numpy as np

from .builders import PointCloud
from .complex import SimplicialComplex, assemble_complex, canonical_simplex
from .errors import ParseError, ScsparseError
from .sparsify import ProbabilityMeasure


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line


def format_real(x: float) -> str:
    return repr(float(x))


def parse_complex(lines: Iterable[str], path=None) -> SimplicialComplex:
    flat, weights = [], {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            k = int(tok[0])
        except ValueError:
            raise ParseError(f"order {tok[0]!r} is not an integer", path, lineno) from None
        if k < 0 or len(tok) not in (k + 2, k + 3):
            raise ParseError(f"expected {k + 1} vertices and an optional weight, got {len(tok) - 1} fields", path, lineno)
        try:
            verts = [int(v) for v in tok[1:k + 2]]
            s = canonical_simplex(verts)
        except ValueError as exc:
            raise ParseError(str(exc), path, lineno) from None
        if len(tok) == k + 3:
            try:
                w = float(tok[-1])
            except ValueError:
                raise ParseError(f"weight {tok[-1]!r} is not a number", path, lineno) from None
            if s in weights and weights[s] != w:
                raise ParseError(f"conflicting weights for {list(s)}", path, lineno)
            weights[s] = w
        flat.append(s)
    try:
        return assemble_complex(flat, weights, by_order=False)
    except ScsparseError as exc:
        raise type(exc)(f"{path}: {exc}" if path else str(exc)) from None


def read_complex(path) -> SimplicialComplex:
    with open(path, encoding="utf-8") as fh:
        return parse_complex(fh, path=str(path))


def format_complex(c: SimplicialComplex) -> str:
    out = []
    for s, w in c.simplices():
        fields = [str(len(s) - 1), *map(str, s)]
        if w != 1.0:
            fields.append(format_real(w))
        out.append(" ".join(fields))
    return "\n".join(out) + ("\n" if out else "")


def write_complex(c: SimplicialComplex, path) -> None:
    Path(path).write_text(format_complex(c), encoding="utf-8")


def read_points(path) -> PointCloud:
    pts = []
    for lineno, line in _lines(path):
        parts = [p for p in line.replace(",", " ").split()]
        if len(parts) != 2:
            raise ParseError(f"expected 'x,y', got {line!r}", str(path), lineno)
        try:
            pts.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ParseError(f"non-numeric coordinate in {line!r}", str(path), lineno) from None
    return PointCloud(np.array(pts).reshape(-1, 2))


def write_points(pc: PointCloud, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if pc.seed is not None:
            fh.write(f"# seed={pc.seed} cluster_offset={pc.cluster_offset!r}\n")
        for x, y in pc.points.tolist():
            fh.write(f"{format_real(x)},{format_real(y)}\n")


def read_hyperedges(path) -> list[list[int]]:
    """One hyperedge per line, whitespace- or comma-separated node ids."""
    out = []
    for lineno, line in _lines(path):
        try:
            out.append([int(v) for v in line.replace(",", " ").split()])
        except ValueError:
            raise ParseError(f"non-integer node id in {line!r}", str(path), lineno) from None
    return out


def write_vectors(path_stem, c: SimplicialComplex, k: int, columns: dict[str, np.ndarray], meta: dict) -> tuple[Path, Path]:
    """Write per-``(k+1)``-simplex columns as ``<stem>.csv`` and ``<stem>.json``."""
    stem = Path(path_stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    level = c.level(k + 1)
    csv_path, json_path = stem.with_suffix(".csv"), stem.with_suffix(".json")
    names = list(columns)
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "simplex", *names])
        for i, s in enumerate(level):
            w.writerow([i, " ".join(map(str, s)), *(format_real(columns[n][i]) for n in names)])
    payload = dict(meta)
    payload["k"] = k
    payload["simplices"] = [list(s) for s in level]
    for n in names:
        payload[n] = [float(v) for v in columns[n]]
    json_path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
    return csv_path, json_path


def read_measure(path, m: int | None = None) -> ProbabilityMeasure:
    """Read ``p`` from a JSON file (key ``"p"``) or a CSV with a ``p`` column."""
    path = Path(path)
    if path.suffix == ".json":
        try:
            probs = json.loads(path.read_text(encoding="utf-8"))["p"]
        except (KeyError, json.JSONDecodeError) as exc:
            raise ParseError(f"no measure found ({exc})", str(path)) from None
    else:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        if not rows or "p" not in rows[0]:
            raise ParseError("CSV needs a 'p' column", str(path))
        probs = [float(r["p"]) for r in rows]
    probs = np.asarray(probs, dtype=float)
    if m is not None and probs.size != m:
        raise ParseError(f"measure has {probs.size} entries, expected {m}", str(path))
    return ProbabilityMeasure.normalized(probs)


def write_json(path, payload) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(payload, indent=1, default=_jsonable) + "\n", encoding="utf-8")


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, os.PathLike):
        return os.fspath(obj)
    raise TypeError(f"not serializable: {type(obj).__name__}")
