"""Real root isolation over towers, root handles and algebraic points."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Sequence, Union

import sympy

from toolkit.deltakit.core.cache import get_cache
from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.formula.jets import v_symbol
from toolkit.deltakit.tower.realalg import RealAlgNumber
from toolkit.deltakit.tower.signs import degree, root_count, sign_of, trim
from toolkit.deltakit.tower.tower import Level, LevelKind, Tower, TowerElement, join, level_index, level_symbol

W = sympy.Symbol("w")


@dataclass(frozen=True)
class RootRef:
    """The `index`-th distinct real root (ascending) of `poly` in w over `tower`.

    `poly` is an irreducible factor over Q[t, w] of the polynomial that was isolated.
    Linear factors carry their root as `value`; rational factors carry `real`.
    """

    tower: Tower
    poly: sympy.Expr
    index: int
    value: TowerElement | None = None
    real: RealAlgNumber | None = None

    def adjoin(self) -> tuple[Tower, TowerElement]:
        """A tower containing the root and the root as an element of it."""
        if self.value is not None:
            return self.tower, self.value
        k = len(self.tower)
        tower = self.tower.extend(Level(LevelKind.ROOT, sympy.expand(self.poly.subs(W, level_symbol(k))), self.index))
        return tower, TowerElement.level(tower, k)

    def to_json(self) -> dict:
        if self.value is not None:
            return {"value": self.value.to_json()}
        out: dict = {"poly": _text(self.poly), "index": self.index}
        if self.real is not None:
            out["real"] = self.real.to_json()
        return out


def _text(expr: sympy.Expr) -> str:
    from toolkit.deltakit.formula.ast import expr_to_text

    return expr_to_text(expr)


def _linear_root(tower: Tower, f: sympy.Expr, w: sympy.Symbol) -> TowerElement:
    c1, c0 = sympy.Poly(f, w).all_coeffs()
    return TowerElement.make(tower, -c0, c1)


def isolate_roots(tower: Tower, p: sympy.Expr, w: sympy.Symbol = W) -> list[RootRef]:
    """Distinct real roots of p(w) (coefficients in the tower symbols), ascending."""
    p = trim(tower, sympy.expand(p), w)
    if p == 0:
        raise PreconditionError("cannot isolate the roots of the zero polynomial")
    if w not in p.free_symbols:
        return []
    p = sympy.expand(p.subs(w, W))
    return get_cache().get_or_compute("roots", (tower, p), lambda: _isolate(tower, p))


def _isolate(tower: Tower, p: sympy.Expr) -> list[RootRef]:
    candidates: list[RootRef] = []
    rational = p.free_symbols <= {W}
    _, factors = sympy.factor_list(p)
    for f, _ in factors:
        f = trim(tower, f.as_expr() if isinstance(f, sympy.Poly) else f, W)
        d = degree(f, W)
        if d < 1:
            continue
        if d == 1:
            candidates.append(RootRef(tower, f, 0, value=_linear_root(tower, f, W)))
        elif rational:
            for i, r in enumerate(RealAlgNumber.roots_of(sympy.Poly(f, W))):
                candidates.append(RootRef(tower, f, i, real=r))
        else:
            for i in range(root_count(tower, f, W)):
                candidates.append(RootRef(tower, f, i))
    candidates.sort(key=cmp_to_key(compare_roots))
    out: list[RootRef] = []
    for r in candidates:
        if out and compare_roots(out[-1], r) == 0:
            continue
        out.append(r)
    return out


def compare_roots(a: RootRef, b: RootRef) -> int:
    tower = join(a.tower, b.tower)
    if a.poly == b.poly and a.value is None and b.value is None:
        return (a.index > b.index) - (a.index < b.index)
    if a.real is not None and b.real is not None:
        return a.real.compare(b.real)
    if a.value is not None and b.value is not None:
        return a.value.lift(tower).compare(b.value.lift(tower))
    if a.value is not None:
        return -compare_roots(b, a)
    ext, ta = RootRef(tower, a.poly, a.index).adjoin()
    if b.value is not None:
        return (ta - b.value.lift(ext)).sign()
    k = len(ext)
    ext2 = ext.extend(Level(LevelKind.ROOT, sympy.expand(b.poly.subs(W, level_symbol(k))), b.index))
    return sign_of(ext2, ta.num - level_symbol(k))


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """A short rational in the open interval (lo, hi)."""
    q = 1
    while True:
        p = (lo * q).__floor__() + 1
        if Fraction(p, q) < hi:
            return Fraction(p, q)
        q += 1


def _rational_bounds(r: RootRef) -> tuple[Fraction, Fraction] | None:
    if r.real is not None:
        return r.real.interval()
    if r.value is not None and r.value.is_rational():
        v = r.value.rational_value()
        return v, v
    return None


def sample_below(r: RootRef) -> tuple[Tower, TowerElement]:
    bounds = _rational_bounds(r)
    if bounds is not None:
        return r.tower, TowerElement.rational(r.tower, bounds[0].__floor__() - 1)
    tower, value = r.adjoin()
    return tower, value - 1


def sample_above(r: RootRef) -> tuple[Tower, TowerElement]:
    bounds = _rational_bounds(r)
    if bounds is not None:
        return r.tower, TowerElement.rational(r.tower, bounds[1].__ceil__() + 1)
    tower, value = r.adjoin()
    return tower, value + 1


def sample_between(a: RootRef, b: RootRef) -> tuple[Tower, TowerElement]:
    """A point strictly between two consecutive roots a < b."""
    ba, bb = _rational_bounds(a), _rational_bounds(b)
    if ba is not None and bb is not None:
        while ba[1] >= bb[0]:
            if a.real is not None:
                ba = a.real.refine()
            if b.real is not None:
                bb = b.real.refine()
        return a.tower, TowerElement.rational(a.tower, _simplest_between(ba[1], bb[0]))
    ta_tower, ta = a.adjoin()
    if b.value is not None:
        return ta_tower, (ta + b.value.lift(ta_tower)) / 2
    rb = RootRef(ta_tower, b.poly, b.index)
    tb_tower, tb = rb.adjoin()
    return tb_tower, (ta.lift(tb_tower) + tb) / 2


Coordinate = Union[TowerElement, RootRef, int, Fraction]


@dataclass(frozen=True)
class AlgebraicPoint:
    tower: Tower
    coords: tuple[TowerElement, ...]

    @classmethod
    def build(cls, coords: Iterable[Coordinate], tower: Tower | None = None) -> "AlgebraicPoint":
        """Adjoin root handles as tower levels, left to right."""
        tower = tower or Tower()
        out: list[TowerElement] = []
        for c in coords:
            if isinstance(c, RootRef):
                ref = RootRef(join(tower, c.tower), c.poly, c.index, c.value, c.real)
                tower, value = ref.adjoin()
            elif isinstance(c, TowerElement):
                tower = join(tower, c.tower)
                value = c
            else:
                value = TowerElement.rational(tower, c)
            out.append(value)
        return cls(tower, tuple(v.lift(tower) for v in out))

    def __len__(self) -> int:
        return len(self.coords)

    def extend(self, value: TowerElement) -> "AlgebraicPoint":
        tower = join(self.tower, value.tower)
        return AlgebraicPoint(tower, tuple(c.lift(tower) for c in self.coords) + (value.lift(tower),))

    def lift(self, tower: Tower) -> "AlgebraicPoint":
        return AlgebraicPoint(tower, tuple(c.lift(tower) for c in self.coords))

    def prefix(self, k: int) -> "AlgebraicPoint":
        return AlgebraicPoint(self.tower, self.coords[:k])

    def substitution(self, variables: Sequence[sympy.Symbol] | None = None) -> dict[sympy.Symbol, TowerElement]:
        variables = variables if variables is not None else [v_symbol(i) for i in range(len(self.coords))]
        return dict(zip(variables, self.coords))

    def to_json(self) -> dict:
        return {"tower": self.tower.to_json(), "coords": [c.to_json() for c in self.coords]}


def homogenize(tower: Tower, q: sympy.Expr, values: dict[sympy.Symbol, TowerElement]) -> tuple[sympy.Expr, int]:
    """(N, s) with sign(q at values) = s * sign(N), N a polynomial in the tower symbols."""
    q = sympy.expand(q)
    used = [v for v in values if v in q.free_symbols]
    if not used:
        return q, 1
    poly = sympy.Poly(q, *used)
    degrees = poly.degree_list()
    total = sympy.Integer(0)
    for monom, coeff in poly.terms():
        term = coeff
        for var, e, d in zip(used, monom, degrees):
            value = values[var]
            term = term * value.num**e * value.den ** (d - e)
        total = total + term
    sign = 1
    for var, d in zip(used, degrees):
        if d % 2 and values[var].den != 1:
            sign *= sign_of(tower, values[var].den)
    return sympy.expand(total), sign


def sign_at(q: sympy.Expr, point: AlgebraicPoint, variables: Sequence[sympy.Symbol] | None = None) -> int:
    """Exact sign of q at the point; q may also use the point tower's level symbols."""
    q = sympy.sympify(q)
    values = point.substitution(variables)
    missing = [s.name for s in q.free_symbols if s not in values and level_index(s) is None]
    if missing:
        raise PreconditionError(f"point does not cover {', '.join(sorted(missing))}")
    numer, sign = homogenize(point.tower, q, values)
    return sign * sign_of(point.tower, numer)


def evaluate(tower: Tower, q: sympy.Expr, values: dict[sympy.Symbol, TowerElement]) -> TowerElement:
    """The value of q at the given elements, as an element of the tower."""
    q = sympy.expand(q)
    used = [v for v in values if v in q.free_symbols]
    if not used:
        return TowerElement.make(tower, q)
    numer, _ = homogenize(tower, q, values)
    degrees = sympy.Poly(q, *used).degree_list()
    den = sympy.Integer(1)
    for var, d in zip(used, degrees):
        den = den * values[var].den ** d
    return TowerElement.make(tower, numer, den)
