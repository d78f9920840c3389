"""JSON file schemas: weight instances, polynomial matrices, reports.

Everything is UTF-8 JSON with sorted keys; rationals serialize as bare
integers or reduced "a/b" strings, so files are bit-reproducible.
"""

from __future__ import annotations

import hashlib
import json

from .core import ParseError, format_rational, format_subset, parse_rational, parse_subset
from .realization import FlagMatrix, PolyMatrix, format_poly, parse_poly
from .tropical import FlagInstance, PluckerVector


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def pretty_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def _reject_duplicate_keys(pairs):
    seen = set()
    for key, _ in pairs:
        if key in seen:
            raise ParseError(f"duplicate key {key!r}")
        seen.add(key)
    return dict(pairs)


def loads_json(text: str):
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", exc.pos) from exc


def load_json(path: str):
    with open(path, encoding="utf-8") as handle:
        return loads_json(handle.read())


def _require(obj, key, kind, context):
    if not isinstance(obj, dict):
        raise ParseError(f"{context}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise ParseError(f"{context}: missing key {key!r}")
    value = obj[key]
    if kind is int and isinstance(value, bool):
        raise ParseError(f"{context}: key {key!r} must be an integer")
    if not isinstance(value, kind):
        raise ParseError(f"{context}: key {key!r} has type {type(value).__name__}")
    return value


def instance_to_dict(flag: FlagInstance, metadata: dict | None = None) -> dict:
    layers = []
    for layer in flag.layers:
        weights = {format_subset(s): format_rational(v) for s, v in layer.items()}
        layers.append({"d": layer.d, "weights": weights})
    out = {"n": flag.n, "layers": layers}
    if metadata:
        out["metadata"] = metadata
    return out


def instance_from_dict(obj) -> tuple[FlagInstance, dict]:
    n = _require(obj, "n", int, "instance")
    raw_layers = _require(obj, "layers", list, "instance")
    if not raw_layers:
        raise ParseError("instance: needs at least one layer")
    layers = []
    for idx, raw in enumerate(raw_layers):
        context = f"layer {idx}"
        d = _require(raw, "d", int, context)
        weights_obj = _require(raw, "weights", dict, context)
        table = {}
        for key, value in weights_obj.items():
            subset = parse_subset(key, n)
            if subset.card != d:
                raise ParseError(f"{context}: key {key!r} is not a {d}-subset")
            table[subset] = parse_rational(value)
        layers.append(PluckerVector.from_weights(n, d, table))
    metadata = obj.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise ParseError("instance: metadata must be an object")
    return FlagInstance(tuple(layers)), metadata


def matrix_to_dict(fm: FlagMatrix, metadata: dict | None = None) -> dict:
    entries = [[format_poly(e) for e in row] for row in fm.matrix.entries]
    out = {"n": fm.n, "dims": list(fm.dims), "entries": entries}
    if metadata:
        out["metadata"] = metadata
    return out


def matrix_from_dict(obj) -> tuple[FlagMatrix, dict]:
    n = _require(obj, "n", int, "matrix")
    dims = _require(obj, "dims", list, "matrix")
    entries = _require(obj, "entries", list, "matrix")
    if not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise ParseError("matrix: dims must be integers")
    grid = []
    for r, row in enumerate(entries):
        if not isinstance(row, list):
            raise ParseError(f"matrix: row {r} is not a list")
        grid.append([parse_poly(str(cell)) for cell in row])
    matrix = PolyMatrix.from_rows(grid)
    metadata = obj.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise ParseError("matrix: metadata must be an object")
    try:
        fm = FlagMatrix(n, tuple(dims), matrix)
    except Exception as exc:
        raise ParseError(f"matrix: {exc}") from exc
    return fm, metadata
