"""Ordered towers Q^ralg(t0)(t1)... and exact arithmetic on their elements.

Level k of a tower is one of
  - a positive infinitesimal: 0 < t_k < every positive element of the field below it,
  - a negative infinite element: t_k < every element of the field below it,
  - a real root handle: the `index`-th (ascending, 0-based) distinct real root of a
    polynomial in t_0..t_k whose coefficients live in the field below.

Elements are quotients of polynomials in the level symbols t_0, t_1, ... over Q.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

import sympy

from toolkit.deltakit.core.budget import current_budget
from toolkit.deltakit.core.errors import PreconditionError, TowerDivisionError

_LEVEL_NAME = re.compile(r"^t(\d+)$")


class LevelKind(str, Enum):
    INFINITESIMAL = "positive-infinitesimal"
    MINUS_INFINITE = "negative-infinite"
    ROOT = "root"


def level_symbol(k: int) -> sympy.Symbol:
    return sympy.Symbol(f"t{k}")


def level_index(sym: sympy.Symbol) -> int | None:
    m = _LEVEL_NAME.match(sym.name)
    return int(m.group(1)) if m else None


@dataclass(frozen=True)
class Level:
    kind: LevelKind
    poly: sympy.Expr | None = None
    index: int = 0

    def to_json(self) -> dict:
        if self.kind is LevelKind.ROOT:
            return {"kind": self.kind.value, "poly": _text(self.poly), "index": self.index}
        return {"kind": self.kind.value}


@dataclass(frozen=True)
class Tower:
    levels: tuple[Level, ...] = ()

    def __len__(self) -> int:
        return len(self.levels)

    def symbols(self) -> tuple[sympy.Symbol, ...]:
        return tuple(level_symbol(k) for k in range(len(self.levels)))

    def prefix(self, k: int) -> "Tower":
        return Tower(self.levels[:k])

    def is_prefix_of(self, other: "Tower") -> bool:
        return other.levels[: len(self.levels)] == self.levels

    def extend(self, level: Level) -> "Tower":
        k = len(self.levels)
        if level.kind is LevelKind.ROOT:
            if level.poly is None:
                raise PreconditionError("a root level needs a defining polynomial")
            for sym in sympy.sympify(level.poly).free_symbols:
                idx = level_index(sym)
                if idx is None or idx > k:
                    raise PreconditionError(f"root level {k} refers to {sym}, which is not below it")
        return Tower(self.levels + (level,))

    def with_infinitesimal(self) -> tuple["Tower", "TowerElement"]:
        tower = self.extend(Level(LevelKind.INFINITESIMAL))
        return tower, TowerElement.level(tower, len(tower) - 1)

    def with_minus_infinite(self) -> tuple["Tower", "TowerElement"]:
        tower = self.extend(Level(LevelKind.MINUS_INFINITE))
        return tower, TowerElement.level(tower, len(tower) - 1)

    def generator_indices(self) -> list[int]:
        return [k for k, lv in enumerate(self.levels) if lv.kind is not LevelKind.ROOT]

    def to_json(self) -> dict:
        return {"levels": [lv.to_json() for lv in self.levels]}


def join(a: Tower, b: Tower) -> Tower:
    """The longer of two towers when one extends the other."""
    if a.is_prefix_of(b):
        return b
    if b.is_prefix_of(a):
        return a
    raise PreconditionError("elements live in unrelated towers (mixed towers are not supported)")


Scalar = Union[int, Fraction, sympy.Rational]


def _text(expr: sympy.Expr | None) -> str:
    from toolkit.deltakit.formula.ast import expr_to_text

    return expr_to_text(sympy.sympify(expr))


def _canonical(tower: Tower, num: sympy.Expr, den: sympy.Expr) -> tuple[sympy.Expr, sympy.Expr]:
    num = sympy.expand(num)
    den = sympy.expand(den)
    if den == 0:
        raise TowerDivisionError("zero denominator")
    if num == 0:
        return sympy.Integer(0), sympy.Integer(1)
    gens = sorted(num.free_symbols | den.free_symbols, key=lambda s: level_index(s) or 0, reverse=True)
    if not gens:
        return sympy.Rational(num / den), sympy.Integer(1)
    n, d = sympy.fraction(sympy.cancel(num / den))
    d_poly = sympy.Poly(d, *gens, domain="QQ")
    content = d_poly.LC()
    den_poly = d_poly.quo_ground(content)
    den_z = den_poly.clear_denoms(convert=True)
    scale = sympy.Rational(content) / sympy.Rational(den_z[0])
    num = sympy.expand(n / scale)
    den = den_z[1].as_expr()
    budget = current_budget()
    for part in (num, den):
        syms = sorted(part.free_symbols, key=str)
        if syms:
            budget.check_tower_degree(sympy.Poly(part, *syms).total_degree())
    return num, sympy.expand(den)


@dataclass(frozen=True)
class TowerElement:
    """num/den over the tower; den has a positive leading coefficient (lex, top level first)."""

    tower: Tower
    num: sympy.Expr
    den: sympy.Expr = sympy.Integer(1)

    @classmethod
    def make(cls, tower: Tower, num: sympy.Expr | Scalar, den: sympy.Expr | Scalar = 1) -> "TowerElement":
        n, d = _canonical(tower, _as_expr(num), _as_expr(den))
        return cls(tower, n, d)

    @classmethod
    def rational(cls, tower: Tower, value: Scalar) -> "TowerElement":
        return cls(tower, _as_expr(value), sympy.Integer(1))

    @classmethod
    def level(cls, tower: Tower, k: int) -> "TowerElement":
        if not 0 <= k < len(tower):
            raise PreconditionError(f"tower has no level {k}")
        return cls(tower, level_symbol(k), sympy.Integer(1))

    def is_rational(self) -> bool:
        return not self.num.free_symbols and not self.den.free_symbols

    def rational_value(self) -> Fraction:
        q = sympy.Rational(self.num / self.den)
        return Fraction(int(q.p), int(q.q))

    def lift(self, tower: Tower) -> "TowerElement":
        if tower == self.tower:
            return self
        if not self.tower.is_prefix_of(tower):
            raise PreconditionError("cannot lift an element into a tower that does not extend its own")
        return TowerElement(tower, self.num, self.den)

    def sign(self) -> int:
        from toolkit.deltakit.tower.signs import sign_of

        return sign_of(self.tower, self.num) * sign_of(self.tower, self.den)

    def is_zero(self) -> bool:
        return self.sign() == 0

    def compare(self, other: "TowerElement | Scalar") -> int:
        return (self - other).sign()

    def _pair(self, other: "TowerElement | Scalar") -> tuple[Tower, "TowerElement", "TowerElement"]:
        if not isinstance(other, TowerElement):
            other = TowerElement.rational(self.tower, other)
        tower = join(self.tower, other.tower)
        return tower, self.lift(tower), other.lift(tower)

    def __add__(self, other: "TowerElement | Scalar") -> "TowerElement":
        tower, a, b = self._pair(other)
        return TowerElement.make(tower, a.num * b.den + b.num * a.den, a.den * b.den)

    __radd__ = __add__

    def __neg__(self) -> "TowerElement":
        return TowerElement(self.tower, sympy.expand(-self.num), self.den)

    def __sub__(self, other: "TowerElement | Scalar") -> "TowerElement":
        tower, a, b = self._pair(other)
        return TowerElement.make(tower, a.num * b.den - b.num * a.den, a.den * b.den)

    def __rsub__(self, other: "TowerElement | Scalar") -> "TowerElement":
        return (-self) + other

    def __mul__(self, other: "TowerElement | Scalar") -> "TowerElement":
        tower, a, b = self._pair(other)
        return TowerElement.make(tower, a.num * b.num, a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "TowerElement | Scalar") -> "TowerElement":
        tower, a, b = self._pair(other)
        if b.sign() == 0:
            raise TowerDivisionError("division by an element that is zero in the tower")
        return TowerElement.make(tower, a.num * b.den, a.den * b.num)

    def __rtruediv__(self, other: "TowerElement | Scalar") -> "TowerElement":
        return TowerElement.rational(self.tower, other) / self

    def __pow__(self, exponent: int) -> "TowerElement":
        if exponent < 0:
            return TowerElement.rational(self.tower, 1) / (self ** (-exponent))
        return TowerElement.make(self.tower, self.num**exponent, self.den**exponent)

    def to_text(self) -> str:
        if self.den == 1:
            return _text(self.num)
        return f"({_text(self.num)})/({_text(self.den)})"

    def to_json(self) -> dict:
        return {"num": _text(self.num), "den": _text(self.den)}


def _as_expr(value: sympy.Expr | Scalar) -> sympy.Expr:
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    return sympy.sympify(value)
