from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvariantError
from .rational import fmt_q, parse_q

KINDS = ("upper_bound", "lower_bound", "equality", "pass", "fail", "inconclusive")


@dataclass(frozen=True)
class Certificate:
    kind: str
    quantity: str
    value: Fraction | None = None
    witness: dict = field(default_factory=dict)
    verified: bool = False
    lower: Fraction | None = None
    upper: Fraction | None = None
    stage: str | None = None

    @property
    def passed(self) -> bool:
        return self.verified and self.kind not in ("fail", "inconclusive")

    def interval(self) -> tuple[Fraction | None, Fraction | None]:
        lo, hi = self.lower, self.upper
        if self.kind in ("lower_bound", "equality") and lo is None:
            lo = self.value
        if self.kind in ("upper_bound", "equality") and hi is None:
            hi = self.value
        return lo, hi

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "quantity": self.quantity, "verified": self.verified}
        for name in ("value", "lower", "upper"):
            v = getattr(self, name)
            if v is not None:
                out[name] = fmt_q(v)
        if self.stage is not None:
            out["stage"] = self.stage
        out["witness"] = jsonable(self.witness)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        def opt(name):
            return parse_q(d[name]) if name in d else None

        return cls(d["kind"], d["quantity"], opt("value"), d.get("witness", {}), bool(d.get("verified")),
                   opt("lower"), opt("upper"), d.get("stage"))


def jsonable(x):
    """Convert nested witness data into JSON-ready values; rationals become "p/q"."""
    if isinstance(x, Fraction):
        return fmt_q(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        raise InvariantError("floats are not allowed in certificates")
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (frozenset, set)):
        return [jsonable(v) for v in sorted(x)]
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_dict"):
        return jsonable(x.to_dict())
    raise InvariantError(f"cannot serialise {type(x).__name__}")
