"""Differential polynomials over Q in jet normal form."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import sympy

from toolkit.deltakit.core.errors import PreconditionError

_NAMES = {1: "x", 2: "y", 3: "z"}
_JET_SYMBOL = re.compile(r"^x(\d+)_(\d+)$")


@dataclass(frozen=True, order=True)
class JetVar:
    base: int
    order: int = 0

    def __post_init__(self) -> None:
        if self.base < 1:
            raise ValueError("JetVar.base must be >= 1")
        if self.order < 0:
            raise ValueError("JetVar.order must be >= 0")

    def symbol(self) -> sympy.Symbol:
        return sympy.Symbol(f"x{self.base}_{self.order}")

    def to_text(self) -> str:
        text = base_name(self.base)
        for _ in range(self.order):
            text = f"d({text})"
        return text

    def shifted(self, by: int = 1) -> "JetVar":
        return JetVar(self.base, self.order + by)


def base_name(base: int) -> str:
    return _NAMES.get(base, f"x{base}")


def jet_of_symbol(sym: sympy.Symbol) -> JetVar | None:
    m = _JET_SYMBOL.match(sym.name)
    if not m:
        return None
    return JetVar(int(m.group(1)), int(m.group(2)))


_ANCHOR = sympy.Symbol("x1_0")


def _gen_key(sym: sympy.Symbol) -> tuple[int, int]:
    jv = jet_of_symbol(sym)
    if jv is None:
        raise PreconditionError(f"symbol {sym} has no jet binding")
    return jv.base, jv.order


def _term_key(factors: list[tuple[JetVar, int]]) -> tuple:
    return (sum(e for _, e in factors), tuple((v.base, v.order, e) for v, e in reversed(factors)))


def format_rational(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_terms(terms: Iterable[tuple[Fraction, list[tuple[str, int]]]]) -> str:
    """Render (coefficient, [(factor text, exponent)]) pairs in the formula grammar."""
    pieces: list[str] = []
    for coeff, factors in terms:
        negative = coeff < 0
        mag = -coeff if negative else coeff
        body = "*".join(f if e == 1 else f"{f}^{e}" for f, e in factors)
        if not body:
            text = format_rational(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{format_rational(mag)}*{body}"
        if not pieces:
            pieces.append(f"-{text}" if negative else text)
        else:
            pieces.append(f" - {text}" if negative else f" + {text}")
    return "".join(pieces) if pieces else "0"


def _canonical(expr: sympy.Expr) -> sympy.Poly:
    expr = sympy.expand(sympy.sympify(expr))
    gens = sorted(expr.free_symbols, key=_gen_key)
    return sympy.Poly(expr, *(gens or [_ANCHOR]), domain="QQ")


@dataclass(frozen=True)
class DiffPolynomial:
    """A sympy Poly over QQ whose generators are exactly the jet symbols it uses.

    Constants carry the single generator x1_0, so equal polynomials have equal gens.
    """

    poly: sympy.Poly = field(default_factory=lambda: sympy.Poly(0, _ANCHOR, domain="QQ"))

    @classmethod
    def from_expr(cls, expr: sympy.Expr) -> "DiffPolynomial":
        return cls(_canonical(expr))

    @classmethod
    def constant(cls, value: Fraction | int) -> "DiffPolynomial":
        value = Fraction(value)
        return cls.from_expr(sympy.Rational(value.numerator, value.denominator))

    @classmethod
    def jet(cls, base: int, order: int = 0) -> "DiffPolynomial":
        return cls.from_expr(JetVar(base, order).symbol())

    def is_zero(self) -> bool:
        return self.poly.is_zero

    def is_constant(self) -> bool:
        return self.poly.is_ground

    def jets(self) -> set[JetVar]:
        if self.poly.is_ground:
            return set()
        return {jet_of_symbol(g) for g in self.poly.gens}

    def bases(self) -> set[int]:
        return {v.base for v in self.jets()}

    def __add__(self, other: "DiffPolynomial | int | Fraction") -> "DiffPolynomial":
        return DiffPolynomial.from_expr((self.poly + _coerce(other).poly).as_expr())

    __radd__ = __add__

    def __neg__(self) -> "DiffPolynomial":
        return DiffPolynomial(-self.poly)

    def __sub__(self, other: "DiffPolynomial | int | Fraction") -> "DiffPolynomial":
        return DiffPolynomial.from_expr((self.poly - _coerce(other).poly).as_expr())

    def __rsub__(self, other: "DiffPolynomial | int | Fraction") -> "DiffPolynomial":
        return _coerce(other) - self

    def __mul__(self, other: "DiffPolynomial | int | Fraction") -> "DiffPolynomial":
        return DiffPolynomial.from_expr((self.poly * _coerce(other).poly).as_expr())

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "DiffPolynomial":
        if exponent < 0:
            raise ValueError("negative exponent")
        return DiffPolynomial.from_expr((self.poly**exponent).as_expr())

    def to_sympy(self) -> sympy.Expr:
        return self.poly.as_expr()

    def to_text(self) -> str:
        jets = [jet_of_symbol(g) for g in self.poly.gens]
        rows = []
        for monom, coeff in self.poly.terms():
            factors = sorted(((v, e) for v, e in zip(jets, monom) if e), reverse=True)
            q = sympy.Rational(coeff)
            rows.append((_term_key(factors), Fraction(int(q.p), int(q.q)), factors))
        rows.sort(key=lambda row: row[0], reverse=True)
        return format_terms((c, [(v.to_text(), e) for v, e in factors]) for _, c, factors in rows)

    def __str__(self) -> str:
        return self.to_text()


def _coerce(value: "DiffPolynomial | int | Fraction") -> DiffPolynomial:
    if isinstance(value, DiffPolynomial):
        return value
    return DiffPolynomial.constant(Fraction(value))


def from_sympy(expr: sympy.Expr, binding: Mapping[sympy.Symbol, JetVar] | None = None) -> DiffPolynomial:
    """Inverse of to_sympy; symbols are read through `binding` or the x{base}_{order} naming."""
    expr = sympy.sympify(expr)
    if binding:
        expr = expr.xreplace({s: jv.symbol() for s, jv in binding.items()})
    return DiffPolynomial.from_expr(expr)


def order_of(p: DiffPolynomial) -> int:
    if p.is_zero():
        raise PreconditionError("order of the zero polynomial is undefined")
    return max((v.order for v in p.jets()), default=0)


def windows_of(p: DiffPolynomial) -> dict[int, int]:
    windows: dict[int, int] = {}
    for v in p.jets():
        windows[v.base] = max(windows.get(v.base, 0), v.order + 1)
    return windows


def jet_layout(windows: Mapping[int, int]) -> list[JetVar]:
    """Jet variables in v-index order: bases ascending, orders ascending within a base."""
    return [JetVar(base, order) for base in sorted(windows) for order in range(windows[base])]


def v_symbol(index: int) -> sympy.Symbol:
    return sympy.Symbol(f"v{index}")


def algebraize(
    p: DiffPolynomial, windows: Mapping[int, int] | None = None
) -> tuple[sympy.Expr, dict[sympy.Symbol, JetVar]]:
    """f* over v0, v1, ... with the binding of the jets that occur in p."""
    if p.is_zero():
        raise PreconditionError("cannot algebraize the zero polynomial")
    layout = jet_layout(windows if windows is not None else windows_of(p))
    index = {jv: i for i, jv in enumerate(layout)}
    present = p.jets()
    substitution = {jv.symbol(): v_symbol(index[jv]) for jv in present}
    binding = {v_symbol(index[jv]): jv for jv in sorted(present, key=lambda jv: index[jv])}
    return sympy.expand(p.to_sympy().xreplace(substitution)), binding


def top_jet(p: DiffPolynomial) -> JetVar:
    jets = p.jets()
    if not jets:
        raise PreconditionError("constant polynomial has no top jet")
    return max(jets, key=lambda v: (v.order, v.base))


def partial(p: DiffPolynomial, var: JetVar) -> DiffPolynomial:
    sym = var.symbol()
    if sym not in p.poly.gens:
        return DiffPolynomial()
    return DiffPolynomial.from_expr(p.poly.diff(sym).as_expr())


def separant(p: DiffPolynomial) -> DiffPolynomial:
    if p.is_constant():
        raise PreconditionError("separant of a constant polynomial is undefined")
    return partial(p, top_jet(p))


def differentiate(p: DiffPolynomial) -> DiffPolynomial:
    """Chain rule on jets: d(f) = sum of df/dx{b}_{k} * x{b}_{k+1}."""
    if p.is_constant():
        return DiffPolynomial()
    expr = sympy.Add(
        *(p.poly.diff(g).as_expr() * jet_of_symbol(g).shifted().symbol() for g in p.poly.gens)
    )
    return DiffPolynomial.from_expr(expr)


def differentiate_n(p: DiffPolynomial, times: int) -> DiffPolynomial:
    for _ in range(times):
        p = differentiate(p)
    return p
