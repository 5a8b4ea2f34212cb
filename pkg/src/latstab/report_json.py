"""JSON encoding for report objects.

Fractions become "num/den" strings, floats are rounded to 15 significant
digits, and the tagged infinity (or a float inf) becomes {"infinite": true}.
Boxes, cubes and point sets get small structural encodings.
"""

from __future__ import annotations

import dataclasses
import json
import math
from collections.abc import Mapping
from fractions import Fraction

from latstab.entropy_info import is_infinite
from latstab.lattice_core import CubeSpec, LatticeBox, PointSet

INFINITY_TAG = {"infinite": True}


def _float(x: float):
    if math.isnan(x):
        return None
    if math.isinf(x):
        return dict(INFINITY_TAG) if x > 0 else {"infinite": True, "negative": True}
    return float(format(x, ".15g"))


def _fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def to_jsonable(obj):
    """Recursively convert report values into plain JSON types."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if is_infinite(obj):
        return dict(INFINITY_TAG)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return _fraction(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, CubeSpec):
        return {"corner": list(obj.corner), "side": obj.side}
    if isinstance(obj, LatticeBox):
        return {"edges": [sorted(e) for e in obj.edges]}
    if isinstance(obj, PointSet):
        return {"dim": obj.dim, "points": [list(p) for p in obj.sorted_points]}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        for name in ("passed", "holds", "claims_ok"):
            if hasattr(type(obj), name) and isinstance(getattr(type(obj), name), property):
                out[name] = to_jsonable(getattr(obj, name))
        return out
    if isinstance(obj, tuple) and hasattr(obj, "_asdict"):
        return {k: to_jsonable(v) for k, v in obj._asdict().items()}
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        items = sorted(obj)
        return [list(x) if isinstance(x, tuple) else to_jsonable(x) for x in items]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return to_jsonable(obj.item())
    raise TypeError(f"cannot encode {type(obj).__name__} as JSON")


def dumps(obj, indent: int | None = 2) -> str:
    return json.dumps(to_jsonable(obj), indent=indent, sort_keys=True, allow_nan=False)
