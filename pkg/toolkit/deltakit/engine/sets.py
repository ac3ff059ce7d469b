"""Semialgebraic sets: an ambient dimension plus a canonical DNF over v0..v_{n-1}."""

from __future__ import annotations

from dataclasses import dataclass

import sympy

from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.formula.ast import Formula, Rel, expr_to_text, is_quantifier_free
from toolkit.deltakit.formula.jets import v_symbol
from toolkit.deltakit.formula.normalize import (
    DNF_FALSE,
    DNF_TRUE,
    Dnf,
    NormAtom,
    dnf_and,
    dnf_not,
    dnf_or,
    normalize,
)
from toolkit.deltakit.formula.parse import parse_or
from toolkit.deltakit.tower.point import AlgebraicPoint, homogenize, sign_at
from toolkit.deltakit.tower.tower import Tower, TowerElement, join, level_index


@dataclass(frozen=True)
class Base:
    """The coefficient field of a set: a tower, plus parameter symbols bound to its elements."""

    tower: Tower = Tower()
    params: tuple[tuple[sympy.Symbol, TowerElement], ...] = ()

    @property
    def is_trivial(self) -> bool:
        return not self.tower.levels and not self.params

    def param_map(self) -> dict[sympy.Symbol, TowerElement]:
        return {s: e.lift(self.tower) for s, e in self.params}

    def lift(self, tower: Tower) -> "Base":
        tower = join(self.tower, tower)
        return Base(tower, tuple((s, e.lift(tower)) for s, e in self.params))

    def with_params(self, params: dict[sympy.Symbol, TowerElement]) -> "Base":
        tower = self.tower
        for e in params.values():
            tower = join(tower, e.tower)
        merged = dict(self.params)
        merged.update(params)
        ordered = tuple(sorted(merged.items(), key=lambda kv: kv[0].name))
        return Base(tower, tuple((s, e.lift(tower)) for s, e in ordered))

    def resolve(self, expr: sympy.Expr) -> tuple[sympy.Expr, int]:
        """Substitute the parameters; returns (N, s) with sign(expr) = s * sign(N) pointwise."""
        if not self.params:
            return sympy.expand(expr), 1
        return homogenize(self.tower, expr, self.param_map())

    def to_json(self) -> dict:
        return {
            "tower": self.tower.to_json(),
            "params": {s.name: e.to_json() for s, e in self.params},
        }


def _resolve_atom(base: Base, atom: NormAtom) -> NormAtom:
    poly, sign = base.resolve(atom.poly)
    if atom.rel is Rel.LT and sign < 0:
        poly = sympy.expand(-poly)
    return NormAtom(poly, atom.rel)


@dataclass(frozen=True)
class SemialgebraicSet:
    ambient: int
    dnf: Dnf
    base: Base = Base()

    def __post_init__(self) -> None:
        if self.ambient < 0:
            raise PreconditionError("ambient dimension must be >= 0")
        allowed = set(self.variables()) | {s for s, _ in self.base.params}
        for sym in self.dnf.symbols():
            if sym in allowed:
                continue
            idx = level_index(sym)
            if idx is not None and idx < len(self.base.tower):
                continue
            raise PreconditionError(f"symbol {sym} is outside v0..v{self.ambient - 1}")

    @classmethod
    def from_formula(cls, ambient: int, f: Formula, base: Base | None = None) -> "SemialgebraicSet":
        if not is_quantifier_free(f):
            raise PreconditionError("a set description must be quantifier-free; eliminate first")
        return cls(ambient, normalize(f), base or Base())

    @classmethod
    def parse(cls, ambient: int, text: str) -> "SemialgebraicSet":
        return cls.from_formula(ambient, parse_or(text))

    @classmethod
    def empty(cls, ambient: int, base: Base | None = None) -> "SemialgebraicSet":
        return cls(ambient, DNF_FALSE, base or Base())

    @classmethod
    def full(cls, ambient: int, base: Base | None = None) -> "SemialgebraicSet":
        return cls(ambient, DNF_TRUE, base or Base())

    def variables(self) -> list[sympy.Symbol]:
        return [v_symbol(i) for i in range(self.ambient)]

    def cylinder(self, ambient: int) -> "SemialgebraicSet":
        """X x K^(ambient - n): the same description read in a larger ambient space."""
        if ambient < self.ambient:
            raise PreconditionError(f"cylinder over ambient {self.ambient} cannot live in {ambient}")
        return SemialgebraicSet(ambient, self.dnf, self.base)

    def param_symbols(self) -> list[sympy.Symbol]:
        return [s for s, _ in self.base.params]

    def polys(self) -> list[sympy.Expr]:
        return self.dnf.polys()

    def resolved(self) -> Dnf:
        """The description with parameters substituted by their tower values."""
        if not self.base.params:
            return self.dnf
        return Dnf(tuple(tuple(_resolve_atom(self.base, a) for a in d) for d in self.dnf.disjuncts))

    def _combine_base(self, other: "SemialgebraicSet") -> Base:
        if self.ambient != other.ambient:
            raise PreconditionError(f"ambient mismatch: {self.ambient} vs {other.ambient}")
        if self.base == other.base or other.base.is_trivial:
            return self.base
        if self.base.is_trivial:
            return other.base
        lifted = self.base.lift(other.base.tower)
        return lifted.with_params(other.base.param_map())

    def union(self, other: "SemialgebraicSet") -> "SemialgebraicSet":
        return SemialgebraicSet(self.ambient, dnf_or(self.dnf, other.dnf), self._combine_base(other))

    def intersection(self, other: "SemialgebraicSet") -> "SemialgebraicSet":
        return SemialgebraicSet(self.ambient, dnf_and(self.dnf, other.dnf), self._combine_base(other))

    def complement(self) -> "SemialgebraicSet":
        return SemialgebraicSet(self.ambient, dnf_not(self.dnf), self.base)

    def difference(self, other: "SemialgebraicSet") -> "SemialgebraicSet":
        return self.intersection(other.complement())

    def contains(self, point: AlgebraicPoint) -> bool:
        """Membership of a point whose coordinates live in a tower extending the base."""
        if len(point) != self.ambient:
            raise PreconditionError(f"point has {len(point)} coordinates, set lives in {self.ambient}")
        tower = join(self.base.tower, point.tower)
        point = point.lift(tower)
        for conjunct in self.resolved().disjuncts:
            if all(a.rel.holds(sign_at(a.poly, point, self.variables())) for a in conjunct):
                return True
        return False

    def to_formula(self) -> Formula:
        return self.dnf.to_formula()

    def to_text(self) -> str:
        return self.dnf.to_text()

    def to_json(self) -> dict:
        out: dict = {"ambient": self.ambient, "dnf": self.dnf.to_json(), "formula": self.to_text()}
        if not self.base.is_trivial:
            out["base"] = self.base.to_json()
        return out


def poly_text(expr: sympy.Expr) -> str:
    return expr_to_text(expr)
