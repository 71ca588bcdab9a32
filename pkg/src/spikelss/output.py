"""JSON and CSV emission with 17 significant digits for every float."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def _plain(obj):
    """Convert numpy scalars and arrays to built-in types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def sanitize(doc):
    """Built-in types with non-finite floats replaced by ``None``."""
    doc = _plain(doc)

    def walk(v):
        if isinstance(v, dict):
            return {k: walk(x) for k, x in v.items()}
        if isinstance(v, list):
            return [walk(x) for x in v]
        if isinstance(v, float) and not math.isfinite(v):
            return None
        return v

    return walk(doc)


def _encode(v, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, list):
        if not v:
            return "[]"
        items = [_encode(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(pad + s for s in items) + "\n" + end + "]"
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{json.dumps(k)}: {_encode(x, indent, level + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(pad + s for s in items) + "\n" + end + "}"
    raise TypeError(f"cannot encode {type(v).__name__}")


def to_json(doc, indent: int = 2) -> str:
    return _encode(sanitize(doc), indent, 0) + "\n"


def flatten(doc, prefix: str = "") -> list[tuple[str, object]]:
    """Dotted-key rows; list entries are indexed by position."""
    rows: list[tuple[str, object]] = []
    if isinstance(doc, dict):
        for k, v in doc.items():
            rows.extend(flatten(v, f"{prefix}.{k}" if prefix else k))
    elif isinstance(doc, list):
        if not doc:
            rows.append((prefix, ""))
        for i, v in enumerate(doc):
            rows.extend(flatten(v, f"{prefix}.{i}"))
    else:
        rows.append((prefix, doc))
    return rows


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def to_csv(doc) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in flatten(sanitize(doc)):
        w.writerow([k, _cell(v)])
    return buf.getvalue()


def read_csv(text: str) -> dict[str, str]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["key", "value"]:
        raise ValueError("missing key,value header")
    return {k: v for k, v in rows[1:]}


def render(doc, fmt: str) -> str:
    if fmt == "json":
        return to_json(doc)
    if fmt == "csv":
        return to_csv(doc)
    raise ValueError(f"unknown format {fmt!r}")
