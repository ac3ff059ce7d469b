"""Real algebraic numbers as (irreducible integer polynomial, isolating interval)."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

W = sympy.Symbol("w_alg")


@dataclass
class _Refinement:
    lo: Fraction
    hi: Fraction
    lock: threading.Lock = field(default_factory=threading.Lock)


def _to_fraction(value: sympy.Rational) -> Fraction:
    q = sympy.Rational(value)
    return Fraction(int(q.p), int(q.q))


def _rat(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


@dataclass(frozen=True)
class RealAlgNumber:
    """A real root of `poly`, the unique one in [lo, hi].

    `poly` is irreducible over Q with a positive leading coefficient. Rational numbers are
    stored with a linear polynomial and lo == hi. The isolating interval shrinks on demand;
    refinement state is shared between threads behind a lock and never changes the value.
    """

    poly: sympy.Poly
    lo: Fraction
    hi: Fraction
    _state: _Refinement | None = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        if self._state is None:
            object.__setattr__(self, "_state", _Refinement(self.lo, self.hi))

    @classmethod
    def rational(cls, value: Fraction | int) -> "RealAlgNumber":
        value = Fraction(value)
        poly = sympy.Poly(value.denominator * W - value.numerator, W, domain="ZZ")
        return cls(poly, value, value)

    @classmethod
    def roots_of(cls, expr: sympy.Expr | sympy.Poly) -> list["RealAlgNumber"]:
        """Distinct real roots of a univariate rational polynomial, ascending."""
        poly = expr if isinstance(expr, sympy.Poly) else sympy.Poly(expr, *sorted(sympy.sympify(expr).free_symbols, key=str) or [W])
        if poly.is_zero:
            raise ValueError("roots of the zero polynomial")
        poly = sympy.Poly(poly.as_expr().subs(poly.gen, W), W, domain="QQ")
        out: list[RealAlgNumber] = []
        _, factors = sympy.factor_list(poly)
        for f, _ in factors:
            fz = sympy.Poly(f.as_expr(), W).clear_denoms(convert=True)[1].primitive()[1]
            if fz.LC() < 0:
                fz = -fz
            if fz.degree() < 1:
                continue
            for (a, b), _ in fz.intervals():
                out.append(cls(fz, _to_fraction(a), _to_fraction(b)))
        out.sort(key=_SortKey)
        return out

    @property
    def is_rational(self) -> bool:
        return self.poly.degree() == 1

    def rational_value(self) -> Fraction:
        coeffs = self.poly.all_coeffs()
        return -_to_fraction(coeffs[1]) / _to_fraction(coeffs[0])

    def interval(self) -> tuple[Fraction, Fraction]:
        if self.is_rational:
            v = self.rational_value()
            return v, v
        state = self._state
        assert state is not None
        with state.lock:
            return state.lo, state.hi

    def refine(self) -> tuple[Fraction, Fraction]:
        """Halve the isolating interval once."""
        if self.is_rational:
            return self.interval()
        state = self._state
        assert state is not None
        with state.lock:
            lo, hi = state.lo, state.hi
            mid = (lo + hi) / 2
            s_lo = self._sign_poly_at(lo)
            s_mid = self._sign_poly_at(mid)
            if s_lo * s_mid < 0:
                state.hi = mid
            else:
                state.lo = mid
            return state.lo, state.hi

    def _sign_poly_at(self, x: Fraction) -> int:
        value = self.poly.eval(_rat(x))
        return int(sympy.sign(value))

    def sign_of(self, q: sympy.Poly | sympy.Expr) -> int:
        """Sign of a univariate rational polynomial at this number."""
        if isinstance(q, sympy.Poly):
            expr = q.as_expr().subs(q.gen, W) if q.gens else q.as_expr()
        else:
            expr = sympy.sympify(q)
            syms = expr.free_symbols
            if len(syms) > 1:
                raise ValueError("sign_of expects a univariate polynomial")
            if syms:
                expr = expr.subs(next(iter(syms)), W)
        expr = sympy.expand(expr)
        if not expr.free_symbols:
            return int(sympy.sign(expr))
        if self.is_rational:
            return int(sympy.sign(expr.subs(W, _rat(self.rational_value()))))
        qp = sympy.Poly(expr, W, domain="QQ")
        if qp.rem(self.poly.set_domain("QQ")).is_zero:
            return 0
        while True:
            lo, hi = self.interval()
            if qp.count_roots(_rat(lo), _rat(hi)) == 0:
                mid = _rat((lo + hi) / 2)
                value = qp.eval(mid)
                return int(sympy.sign(value))
            self.refine()

    def compare(self, other: "RealAlgNumber") -> int:
        if self.poly == other.poly and self.interval() == other.interval():
            return 0
        if self.is_rational and other.is_rational:
            a, b = self.rational_value(), other.rational_value()
            return (a > b) - (a < b)
        if self.is_rational:
            return -other.sign_of(W - _rat(self.rational_value()))
        if other.is_rational:
            return self.sign_of(W - _rat(other.rational_value()))
        if self.poly == other.poly:
            # Isolating intervals of one polynomial share a root iff their overlap holds one.
            while True:
                a_lo, a_hi = self.interval()
                b_lo, b_hi = other.interval()
                if a_hi < b_lo:
                    return -1
                if b_hi < a_lo:
                    return 1
                if self.poly.count_roots(_rat(max(a_lo, b_lo)), _rat(min(a_hi, b_hi))) > 0:
                    return 0
                self.refine()
                other.refine()
        # Distinct irreducible polynomials never share a root.
        while True:
            a_lo, a_hi = self.interval()
            b_lo, b_hi = other.interval()
            if a_hi < b_lo:
                return -1
            if b_hi < a_lo:
                return 1
            self.refine()
            other.refine()

    def approx(self, digits: int = 12) -> float:
        while True:
            lo, hi = self.interval()
            if hi - lo < Fraction(1, 10**digits) or self.is_rational:
                return float((lo + hi) / 2)
            self.refine()

    def to_json(self) -> dict:
        lo, hi = self.interval()
        return {
            "poly": str(self.poly.as_expr()).replace("**", "^").replace("w_alg", "w"),
            "interval": [str(lo), str(hi)],
        }


class _SortKey:
    def __init__(self, value: RealAlgNumber) -> None:
        self.value = value

    def __lt__(self, other: "_SortKey") -> bool:
        return self.value.compare(other.value) < 0
