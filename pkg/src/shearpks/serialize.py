"""Deterministic JSON rendering shared by the CLI and run outputs.

Floats are printed with %.15g and non-finite values become the strings
"inf", "-inf", "nan" (plain JSON has no spelling for them).  Keys are
sorted.  Rendering the same data twice yields identical bytes, which the
rerun-reproducibility checks rely on.
"""

from __future__ import annotations

import json
import math
from typing import Any

_INDENT = "  "


def _render(obj: Any, depth: int) -> str:
    pad = _INDENT * depth
    inner = _INDENT * (depth + 1)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isfinite(obj):
            return "%.15g" % obj
        if math.isnan(obj):
            return '"nan"'
        return '"inf"' if obj > 0 else '"-inf"'
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        keys = sorted(obj, key=str)
        body = ",\n".join(
            "%s%s: %s" % (inner, json.dumps(str(k)), _render(obj[k], depth + 1))
            for k in keys)
        return "{\n%s\n%s}" % (body, pad)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        body = ",\n".join(inner + _render(v, depth + 1) for v in obj)
        return "[\n%s\n%s]" % (body, pad)
    raise TypeError("cannot render %r" % type(obj))


def render_json(obj: Any) -> str:
    return _render(obj, 0) + "\n"


def parse_float(value: Any) -> float:
    """Inverse of the non-finite encoding above."""
    if isinstance(value, str):
        return float(value)
    return float(value)
