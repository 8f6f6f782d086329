"""Deterministic JSON emission.

The stdlib encoder prints floats with repr (shortest round-trip form); report
files instead pin floats to 17 significant digits, which is still value-exact
for binary64 and keeps output bytes independent of Python version. Dicts are
emitted in insertion order, so builders construct keys deterministically.
"""
from __future__ import annotations

import json
import math
from pathlib import Path


def _format_float(v: float) -> str:
    if math.isnan(v) or math.isinf(v):
        raise ValueError(f"non-finite float in JSON document: {v}")
    if v == int(v) and abs(v) < 1e16:
        return f"{v:.1f}"  # keep a float-typed token like 1.0, not 1
    return format(v, ".17g")


def _emit(obj, out: list[str], indent: int | None, depth: int) -> None:
    pad = "" if indent is None else "\n" + " " * (indent * (depth + 1))
    end_pad = "" if indent is None else "\n" + " " * (indent * depth)
    sep = "," if indent is None else ","
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(sep)
            out.append(pad)
            _emit(item, out, indent, depth + 1)
        out.append(end_pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object key must be str, got {type(key).__name__}")
            if i:
                out.append(sep)
            out.append(pad)
            out.append(json.dumps(key, ensure_ascii=True))
            out.append(": ")
            _emit(value, out, indent, depth + 1)
        out.append(end_pad + "}")
    else:
        raise TypeError(f"not JSON-serializable: {type(obj).__name__}")


def dumps(obj, indent: int | None = 2) -> str:
    """Serialize to a deterministic JSON string (no trailing newline)."""
    out: list[str] = []
    _emit(obj, out, indent, 0)
    return "".join(out)


def dump(obj, path: str | Path, indent: int | None = 2) -> None:
    Path(path).write_text(dumps(obj, indent) + "\n", encoding="utf-8")


def load(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
