"""Canonical JSON: sorted keys and floats written with 17 significant digits.

Reports written this way are byte-identical across runs, so they can be
diffed and used as regression fixtures.
"""
from __future__ import annotations

import dataclasses
import json
import math

from .contracts import Contract, contract_to_dict
from .domain import (Distribution, Project, UtilityFn, distribution_to_dict, project_to_dict,
                     utility_to_dict)


def to_jsonable(obj):
    """Convert library objects into plain dicts, lists and scalars."""
    if isinstance(obj, Contract):
        return contract_to_dict(obj)
    if isinstance(obj, Project):
        return project_to_dict(obj)
    if isinstance(obj, Distribution):
        return distribution_to_dict(obj)
    if isinstance(obj, UtilityFn):
        return utility_to_dict(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return obj.item()
    return obj


def _number(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    x += 0.0  # drop the sign of zero
    return format(x, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Serialize ``obj`` canonically, with a trailing newline."""
    return _encode(to_jsonable(obj), indent, 0) + "\n"


def loads(text: str):
    """Parse JSON written by :func:`dumps`; "Infinity" strings stay strings."""
    return json.loads(text)
