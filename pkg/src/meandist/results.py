"""Result containers shared by the moment front ends."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

CLOSED_FORM = "closed-form"
QUADRATURE = "quadrature"
MONTE_CARLO = "monte-carlo"


class Normalize(Enum):
    NONE = "none"
    UNIT_VOLUME = "volume"
    UNIT_V1 = "v1"

    @classmethod
    def parse(cls, value) -> "Normalize":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        aliases = {"unit_volume": "volume", "unit-volume": "volume", "unit_v1": "v1", "unit-v1": "v1"}
        text = aliases.get(text, text)
        for item in cls:
            if item.value == text or item.name.lower() == text:
                return item
        raise ValueError(f"unknown normalization {value!r}")


@dataclass(frozen=True)
class MomentResult:
    """A moment value with where it came from and how far to trust it.

    ``provenance`` is one of the three method tags, or several joined by
    "+" when the value mixes them.  ``error`` is an absolute bound for
    closed-form and quadrature values and one standard error for Monte Carlo.
    """

    value: float
    provenance: str = CLOSED_FORM
    error: float = 0.0
    details: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "provenance": self.provenance,
            "error": self.error,
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
