"""Conversion of report objects to plain JSON-compatible values."""

from __future__ import annotations

import dataclasses
import math
from enum import Enum
from typing import Any

import numpy as np


def jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays, complex numbers, enums and
    dataclasses into JSON-friendly values.  Non-finite floats become the
    strings ``"inf"``, ``"-inf"`` and ``"nan"`` so the output stays strict JSON.
    """
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if isinstance(obj, Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if not f.name.startswith("_")}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def parse_real(value: Any) -> float:
    """Inverse of :func:`jsonable` for a single real number."""
    if isinstance(value, str):
        return float(value)
    return float(value)


def parse_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(parse_real(re), parse_real(im))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)
