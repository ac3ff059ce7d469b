from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable


@total_ordering
@dataclass(frozen=True)
class DimensionValue:
    """A natural number or -inf (value None); -inf only for empty sets."""

    value: int | None

    @classmethod
    def minus_infinity(cls) -> "DimensionValue":
        return cls(None)

    @property
    def is_minus_infinity(self) -> bool:
        return self.value is None

    def __lt__(self, other: "DimensionValue") -> bool:
        if self.value is None:
            return other.value is not None
        if other.value is None:
            return False
        return self.value < other.value

    def __add__(self, k: int) -> "DimensionValue":
        if self.value is None:
            return self
        return DimensionValue(self.value + k)

    def __str__(self) -> str:
        return "-inf" if self.value is None else str(self.value)

    def to_json(self) -> int | str:
        return "-inf" if self.value is None else self.value


def dim_max(values: Iterable[DimensionValue]) -> DimensionValue:
    out = DimensionValue.minus_infinity()
    for v in values:
        if out < v:
            out = v
    return out


def dim_min(values: Iterable[DimensionValue]) -> DimensionValue:
    values = list(values)
    if not values:
        raise ValueError("minimum of no dimensions")
    out = values[0]
    for v in values[1:]:
        if v < out:
            out = v
    return out
