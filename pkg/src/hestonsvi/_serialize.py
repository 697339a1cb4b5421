"""Deterministic JSON/CSV text output.

All floats are written with 17 significant digits so that values round-trip
exactly and files are bitwise stable across runs on the same platform.
"""

from __future__ import annotations

import json
import math
from typing import Any


def fmt_float(x: float) -> str:
    """Render a finite float with 17 significant digits."""
    if isinstance(x, bool):
        raise TypeError("bool is not a float")
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(float(x), ".17g")


def dumps(obj: Any, indent: int = 2) -> str:
    """Serialize dicts/lists/scalars to JSON, floats via :func:`fmt_float`.

    Dict insertion order is preserved, so output is deterministic as long as
    callers build their dicts in a fixed order.
    """
    out: list[str] = []
    _write(obj, out, indent, 0)
    return "".join(out)


def _write(obj: Any, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    closing_pad = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(fmt_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be str, got {key!r}")
            out.append(f"{pad}{json.dumps(key)}: ")
            _write(value, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(f"{closing_pad}}}")
    elif isinstance(obj, (list, tuple)):
        if not len(obj):
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(obj):
            out.append(pad)
            _write(value, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(f"{closing_pad}]")
    else:
        try:
            out.append(fmt_float(float(obj)))
        except (TypeError, ValueError):
            raise TypeError(f"cannot serialize {type(obj).__name__}") from None
