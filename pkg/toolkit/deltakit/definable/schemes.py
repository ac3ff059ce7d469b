"""Finite presentations of definable CODF types and their canonical realizations."""

from __future__ import annotations

import hashlib
import json
import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import sympy

from toolkit.deltakit.core.errors import MalformedSchemeError, PreconditionError
from toolkit.deltakit.definable.density import HullTrace, derived_relation, jet_polynomial
from toolkit.deltakit.definable.ominimal import OMinimalTypeDescriptor
from toolkit.deltakit.engine.sets import poly_text
from toolkit.deltakit.formula.jets import DiffPolynomial, JetVar, base_name, jet_of_symbol, v_symbol
from toolkit.deltakit.tower.point import AlgebraicPoint, evaluate, homogenize, isolate_roots
from toolkit.deltakit.tower.tower import Tower, TowerElement, join

logger = logging.getLogger("deltakit.types")

_V_NAME = re.compile(r"^v(\d+)$")


class TailKind(str, Enum):
    ZERO = "zero-tail"
    ALGEBRAIC = "algebraic-tail"
    MINUS_INFINITY = "minus-infinity-tail"


@dataclass(frozen=True)
class AlgebraicTail:
    """delta^order x is the branch-th root of poly(v_0..v_order); higher jets solve S*v + R_l = 0."""

    order: int
    poly: sympy.Expr
    branch: int
    indeterminate: int

    @property
    def separant(self) -> sympy.Expr:
        return sympy.expand(sympy.diff(self.poly, v_symbol(self.order)))

    def relation(self, ell: int) -> sympy.Expr:
        return derived_relation(self.poly, self.order, ell, self.indeterminate)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "poly": poly_text(self.poly),
            "branch": self.branch,
            "separant": poly_text(self.separant),
        }


@dataclass(frozen=True)
class DeltaTypeScheme:
    """A jet descriptor for the first jets of one indeterminate plus a rule for every higher jet.

    `context` lists the schemes of earlier indeterminates this one was built over and
    `context_jets` the values of their jets that the construction used.
    """

    kind: TailKind
    indeterminate: int
    window: int
    jet: OMinimalTypeDescriptor
    tail: AlgebraicTail | None = None
    context: tuple["DeltaTypeScheme", ...] = ()
    context_jets: tuple[tuple[JetVar, TowerElement], ...] = ()
    trace: HullTrace | None = None

    def __post_init__(self) -> None:
        if (self.tail is not None) != (self.kind is TailKind.ALGEBRAIC):
            raise MalformedSchemeError(f"{self.kind.value} scheme with tail={self.tail}")
        if self.tail is not None and self.tail.order != len(self.jet.cuts):
            raise MalformedSchemeError(
                f"algebraic tail at order {self.tail.order} after {len(self.jet.cuts)} jet cuts"
            )

    @property
    def tower(self) -> Tower:
        return self.jet.realization.tower

    @property
    def name(self) -> str:
        return base_name(self.indeterminate)

    def trace_ref(self) -> str | None:
        if self.trace is None:
            return None
        blob = json.dumps(self.trace.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha1(blob.encode("utf-8")).hexdigest()

    def annihilator(self) -> DiffPolynomial | None:
        """A nonzero differential polynomial vanishing at the realization; None for minus-infinity tails."""
        if self.kind is TailKind.ZERO:
            return DiffPolynomial.jet(self.indeterminate, len(self.jet.cuts))
        if self.kind is TailKind.ALGEBRAIC:
            return jet_polynomial(self.tail.poly, self.indeterminate)
        return None

    def tail_text(self) -> str:
        first = JetVar(self.indeterminate, len(self.jet.cuts)).to_text()
        if self.kind is TailKind.ZERO:
            return f"{first} and every higher jet are 0"
        if self.kind is TailKind.MINUS_INFINITY:
            return f"{first} and every higher jet are fresh negative-infinite generators"
        return f"{first} is root #{self.tail.branch} of {poly_text(self.tail.poly)} in {v_symbol(self.tail.order)}"

    def to_text(self) -> str:
        cuts = ", ".join(c.to_text() for c in self.jet.cuts)
        return f"{self.kind.value} {self.name}: [{cuts}]; {self.tail_text()}"

    def to_json(self) -> dict:
        tail: dict = {"kind": self.kind.value, "from_order": len(self.jet.cuts)}
        if self.tail is not None:
            tail.update(self.tail.to_json())
        return {
            "kind": self.kind.value,
            "indeterminate": self.name,
            "window": self.window,
            "jet": [c.to_json() for c in self.jet.cuts],
            "jet_text": [c.to_text() for c in self.jet.cuts],
            "realization": self.jet.realization.to_json(),
            "tail": tail,
            "context": [c.name for c in self.context],
            "trace_ref": self.trace_ref(),
        }


def scheme_chain(schemes: Iterable[DeltaTypeScheme]) -> list[DeltaTypeScheme]:
    """The schemes with their contexts first, one per indeterminate, in construction order."""
    ordered: list[DeltaTypeScheme] = []

    def visit(s: DeltaTypeScheme) -> None:
        for c in s.context:
            visit(c)
        same = next((o for o in ordered if o.indeterminate == s.indeterminate), None)
        if same is None:
            ordered.append(s)
        elif same is not s and same != s:
            raise MalformedSchemeError(f"two different schemes for {s.name}")

    for s in schemes:
        visit(s)
    return ordered


class JetRealizer:
    """Canonical values of the jets of a chain of schemes, extended on demand through their tails.

    Every value lives in one tower that only grows; new generators go on top of it.
    """

    def __init__(self, schemes: Iterable[DeltaTypeScheme] = ()) -> None:
        self.tower = Tower()
        self._schemes: dict[int, DeltaTypeScheme] = {}
        self._order: list[int] = []
        self._values: dict[int, list[TowerElement]] = {}
        for s in scheme_chain(schemes):
            self.add(s)

    @property
    def indeterminates(self) -> list[int]:
        return list(self._order)

    def add(self, s: DeltaTypeScheme) -> None:
        if s.indeterminate in self._schemes:
            raise MalformedSchemeError(f"{s.name} already has a scheme")
        try:
            self.tower = join(self.tower, s.tower)
        except PreconditionError as exc:
            raise MalformedSchemeError(f"scheme for {s.name} lives in a tower unrelated to its context") from exc
        for jv, value in sorted(s.context_jets, key=lambda kv: kv[0]):
            known = self._values.get(jv.base)
            if known is None:
                raise MalformedSchemeError(f"scheme for {s.name} uses {jv.to_text()} without its scheme")
            if jv.order == len(known):
                known.append(value)
        self._schemes[s.indeterminate] = s
        self._order.append(s.indeterminate)
        self._values[s.indeterminate] = list(s.jet.realization.coords)

    def jet_value(self, jet: JetVar) -> TowerElement:
        s = self._schemes.get(jet.base)
        if s is None:
            raise PreconditionError(f"no scheme realizes {jet.to_text()}")
        values = self._values[jet.base]
        while len(values) <= jet.order:
            values.append(self._next(s, len(values)))
        return values[jet.order].lift(self.tower)

    def jets(self, base: int, count: int) -> list[TowerElement]:
        return [self.jet_value(JetVar(base, k)) for k in range(count)]

    def known_jets(self, bases: Iterable[int]) -> tuple[tuple[JetVar, TowerElement], ...]:
        """Every jet value computed so far for the given indeterminates."""
        out = []
        for b in bases:
            for k, value in enumerate(self._values.get(b, ())):
                out.append((JetVar(b, k), value.lift(self.tower)))
        return tuple(out)

    def point(self, jets: Iterable[JetVar]) -> AlgebraicPoint:
        values = [self.jet_value(jv) for jv in jets]
        return AlgebraicPoint(self.tower, tuple(v.lift(self.tower) for v in values))

    def _values_for(self, s: DeltaTypeScheme, exprs: Iterable[sympy.Expr], skip: sympy.Symbol | None = None) -> dict:
        values: dict[sympy.Symbol, TowerElement] = {}
        for expr in exprs:
            for sym in expr.free_symbols:
                if sym == skip or sym in values:
                    continue
                m = _V_NAME.match(sym.name)
                if m:
                    values[sym] = self.jet_value(JetVar(s.indeterminate, int(m.group(1))))
                    continue
                jv = jet_of_symbol(sym)
                if jv is not None:
                    values[sym] = self.jet_value(jv)
        return {sym: v.lift(self.tower) for sym, v in values.items()}

    def _next(self, s: DeltaTypeScheme, k: int) -> TowerElement:
        if s.kind is TailKind.ZERO:
            return TowerElement.rational(self.tower, 0)
        if s.kind is TailKind.MINUS_INFINITY:
            if self._order[-1] != s.indeterminate:
                raise MalformedSchemeError(
                    f"minus-infinity tail of {s.name} can only grow on the last coordinate"
                )
            self.tower, value = self.tower.with_minus_infinite()
            return value
        tail = s.tail
        if k < tail.order:
            raise MalformedSchemeError(f"jet {k} of {s.name} precedes its tail at order {tail.order}")
        w = v_symbol(tail.order)
        if k == tail.order:
            values = self._values_for(s, [tail.poly], skip=w)
            numer, _ = homogenize(self.tower, tail.poly, values)
            roots = isolate_roots(self.tower, numer, w)
            if len(roots) < tail.branch:
                raise MalformedSchemeError(
                    f"{poly_text(tail.poly)} has {len(roots)} roots, branch {tail.branch} requested"
                )
            self.tower, value = roots[tail.branch - 1].adjoin()
            return value
        relation = tail.relation(k - tail.order)
        values = self._values_for(s, [relation, tail.separant])
        den = evaluate(self.tower, tail.separant, values)
        if den.is_zero():
            raise MalformedSchemeError(f"separant of {poly_text(tail.poly)} vanishes at the realization")
        value = -evaluate(self.tower, relation, values) / den
        logger.debug("jet %d of %s = %s", k, s.name, value.to_text())
        return value
