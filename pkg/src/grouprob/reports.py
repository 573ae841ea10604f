"""Inequality verdict records and their JSON form.

The ``exact`` flag states how the *verdict* was reached: True means exact
rational arithmetic (possibly through sound directed enclosures of
irrational roots), False means float arithmetic under a tolerance or a
Monte-Carlo estimate.  Individual lhs/rhs fields serialize as "p/q"
strings when they are exact rationals and as JSON numbers otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .rational import Scalar, scalar_to_json


@dataclass(frozen=True)
class ConstantInfo:
    value: float
    formula: str

    def to_json_dict(self) -> dict:
        return {"value": self.value, "formula": self.formula}


@dataclass
class InequalityReport:
    inequality: str
    lhs: Scalar
    rhs: Scalar
    satisfied: bool
    exact: bool
    constant: Optional[ConstantInfo] = None
    witness: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def slack(self) -> Scalar:
        """rhs / lhs; infinity on a vacuous (lhs = 0) inequality."""
        if self.lhs == 0:
            return math.inf
        if isinstance(self.lhs, Fraction) and isinstance(self.rhs, Fraction):
            return self.rhs / self.lhs
        return float(self.rhs) / float(self.lhs)

    def to_json_dict(self) -> dict:
        out = {
            "inequality": self.inequality,
            "lhs": scalar_to_json(self.lhs),
            "rhs": scalar_to_json(self.rhs),
            "satisfied": self.satisfied,
            "slack": scalar_to_json(self.slack),
            "exact": self.exact,
        }
        if self.constant is not None:
            out["constant"] = self.constant.to_json_dict()
        if self.witness:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out
