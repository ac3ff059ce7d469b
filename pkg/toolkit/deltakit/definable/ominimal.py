"""Definable o-minimal types: cuts on the line and their fiberwise lifting to K^n."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from toolkit.deltakit.core.errors import InconsistentInputError, PreconditionError
from toolkit.deltakit.engine.geometry import dim, fiber, fiber_split, is_empty, line_pieces
from toolkit.deltakit.engine.sets import SemialgebraicSet
from toolkit.deltakit.tower.point import AlgebraicPoint
from toolkit.deltakit.tower.tower import Tower, TowerElement, join

logger = logging.getLogger("deltakit.types")


class CutKind(str, Enum):
    POINT = "point"
    RIGHT_OF = "right-of"
    MINUS_INFINITY = "minus-infinity"


@dataclass(frozen=True)
class OMinimalCut:
    """point(a), right-of(a) = a+, or -inf, over the field generated so far."""

    kind: CutKind
    endpoint: TowerElement | None = None

    def __post_init__(self) -> None:
        if (self.endpoint is None) != (self.kind is CutKind.MINUS_INFINITY):
            raise PreconditionError(f"malformed {self.kind.value} cut: endpoint={self.endpoint}")

    @property
    def contribution(self) -> int:
        return 0 if self.kind is CutKind.POINT else 1

    def realize(self, tower: Tower) -> tuple[Tower, TowerElement]:
        """Adjoin a realization on top of `tower`: a fresh generator unless the cut is a point."""
        if self.kind is CutKind.MINUS_INFINITY:
            return tower.with_minus_infinite()
        tower = join(tower, self.endpoint.tower)
        endpoint = self.endpoint.lift(tower)
        if self.kind is CutKind.POINT:
            return tower, endpoint
        tower, eps = tower.with_infinitesimal()
        return tower, endpoint.lift(tower) + eps

    def to_text(self) -> str:
        if self.endpoint is None:
            return self.kind.value
        return f"{self.kind.value}({self.endpoint.to_text()})"

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.endpoint is not None:
            out["endpoint"] = self.endpoint.to_json()
            out["endpoint_tower"] = self.endpoint.tower.to_json()
        return out


@dataclass(frozen=True)
class OMinimalTypeDescriptor:
    cuts: tuple[OMinimalCut, ...]
    realization: AlgebraicPoint

    @property
    def contributions(self) -> tuple[int, ...]:
        return tuple(c.contribution for c in self.cuts)

    @property
    def dimension(self) -> int:
        return sum(self.contributions)

    def to_json(self) -> dict:
        return {
            "cuts": [c.to_json() for c in self.cuts],
            "contributions": list(self.contributions),
            "dimension": self.dimension,
            "realization": self.realization.to_json(),
        }


def ominimal_type_1(X: SemialgebraicSet) -> OMinimalCut:
    """The cut of the least point of a finite X, else of the leftmost maximal open interval in X."""
    if X.ambient != 1:
        raise PreconditionError(f"ominimal_type_1 needs a subset of the line, got ambient {X.ambient}")
    pieces = line_pieces(X)
    cut: OMinimalCut | None = None
    for i, piece in enumerate(pieces):
        if piece.inside and not piece.section:
            # The previous sector is outside, so the interval is maximal on the left.
            cut = OMinimalCut(CutKind.RIGHT_OF, pieces[i - 1].sample) if i else OMinimalCut(CutKind.MINUS_INFINITY)
            break
    if cut is None:
        first = next((p for p in pieces if p.inside), None)
        if first is None:
            raise InconsistentInputError(f"empty set has no type: {X.to_text()}")
        cut = OMinimalCut(CutKind.POINT, first.sample)
    _, value = cut.realize(X.base.tower)
    if not X.contains(AlgebraicPoint(value.tower, (value,))):
        raise PreconditionError(f"realization of {cut.to_text()} escaped {X.to_text()}")
    return cut


def ominimal_type_n(X: SemialgebraicSet) -> OMinimalTypeDescriptor:
    """A definable type in X of dimension dim(X), built coordinate by coordinate."""
    if is_empty(X):
        raise InconsistentInputError(f"empty set has no type: {X.to_text()}")
    out = _descend(X)
    if not X.contains(out.realization):
        raise PreconditionError(f"realization escaped {X.to_text()}")
    return out


def _descend(X: SemialgebraicSet) -> OMinimalTypeDescriptor:
    if X.ambient == 0:
        return OMinimalTypeDescriptor((), AlgebraicPoint(X.base.tower, ()))
    if X.ambient == 1:
        cut = ominimal_type_1(X)
        tower, value = cut.realize(X.base.tower)
        return OMinimalTypeDescriptor((cut,), AlgebraicPoint(tower, (value,)))
    x0, x1 = fiber_split(X)
    d = dim(X)
    i = 1 if not is_empty(x1) and dim(x1) + 1 == d else 0
    logger.debug("ominimal_type_n: ambient=%d dim=%s branch X(%d)", X.ambient, d, i)
    head = _descend(x1 if i else x0)
    F = fiber(X, head.realization)
    cut = ominimal_type_1(F)
    tower, value = cut.realize(F.base.tower)
    point = head.realization.lift(tower).extend(value)
    return OMinimalTypeDescriptor(head.cuts + (cut,), point)
