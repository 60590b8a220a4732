import json
from fractions import Fraction
from typing import Any

from loopalg.linalg.scalars import FieldSpec, Residue


def json_serial(obj: Any) -> Any:
    """JSON serializer for objects not serializable by default json code"""

    if isinstance(obj, Fraction):
        if obj.denominator == 1:
            return str(obj.numerator)
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, Residue):
        return obj.value
    if isinstance(obj, FieldSpec):
        return "q" if obj.p is None else {"fp": obj.p}
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "as_dict"):
        return obj.as_dict()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def dumps(document: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(document, default=json_serial, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
