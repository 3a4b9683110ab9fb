"""Deterministic JSON encoding for reports.

Complex numbers become ``{"re": x, "im": y}``, non-finite floats become the
strings ``"nan"``, ``"inf"`` and ``"-inf"``, and key order follows insertion
so identical inputs always give identical bytes.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math

import numpy as np

SCHEMA_VERSION = 1


def _float(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def plain(obj):
    """Recursively convert ``obj`` into JSON-safe builtins."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, enum.Enum):
        return plain(obj.value)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        return {"re": _float(c.real), "im": _float(c.imag)}
    if isinstance(obj, np.ndarray):
        return [plain(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(x) for x in obj]
    if hasattr(obj, "to_dict"):
        return plain(obj.to_dict())
    if dataclasses.is_dataclass(obj):
        return plain({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return json.dumps(plain(obj), indent=indent, allow_nan=False) + "\n"


def envelope(command: str, config: dict, tolerances: dict, body) -> dict:
    """Report with the versioned header every command writes."""
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "tolerances": tolerances,
        "report": body,
    }
