"""Bound reports and the canonical JSON encoding used by every report stream."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

# Absolute slack applied against the claim whenever a float bound is compared.
FLOAT_SLACK = 1e-9

_RELATIONS = {
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
    "==": lambda a, b: a == b,
}

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass(frozen=True)
class BoundReport:
    name: str
    computed: Any
    bound: Any
    relation: str
    satisfied: bool
    status: str = ""
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.status:
            object.__setattr__(self, "status", PASS if self.satisfied else FAIL)

    @classmethod
    def compare(cls, name, computed, relation, bound, *, slack=0.0, **detail):
        """Build a report for ``computed <relation> bound``.

        ``slack`` is subtracted from (``<=``) or added to (``>=``) the bound,
        so rounding noise can only make the check stricter.
        """
        op = _RELATIONS[relation]
        if relation in ("<=", "<"):
            ok = op(computed, bound - slack)
        elif relation in (">=", ">"):
            ok = op(computed, bound + slack)
        else:
            ok = op(computed, bound)
        return cls(name, computed, bound, relation, bool(ok), detail=detail)

    @classmethod
    def inconclusive(cls, name, computed, relation, bound, **detail):
        return cls(name, computed, bound, relation, False, INCONCLUSIVE, detail)

    @property
    def is_inconclusive(self) -> bool:
        return self.status == INCONCLUSIVE

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "computed": self.computed,
            "relation": self.relation,
            "bound": self.bound,
            "status": self.status,
            "detail": self.detail,
        }


def overall_status(reports) -> str:
    statuses = {r.status for r in reports}
    if FAIL in statuses:
        return FAIL
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return PASS


def format_real(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot be serialized")
    if x == 0:
        return "0"
    return format(x, ".12g")


def canonical_json(obj) -> str:
    """Serialize ``obj`` compactly, keeping key order and 12 significant digits for reals.

    Parsing the output with :func:`json.loads` and serializing again gives
    identical bytes.
    """
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(int(obj))
    if isinstance(obj, float):
        return format_real(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = (json.dumps(str(k), ensure_ascii=False) + ":" + canonical_json(v) for k, v in obj.items())
        return "{" + ",".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in obj) + "]"
    if hasattr(obj, "as_dict"):
        return canonical_json(obj.as_dict())
    # numpy scalars
    if hasattr(obj, "item"):
        return canonical_json(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")
