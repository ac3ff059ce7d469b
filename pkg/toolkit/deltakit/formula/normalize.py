"""Canonical disjunctive normal form with `p = 0` / `p < 0` atoms only."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable

import sympy

from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.formula.ast import (
    And,
    Atom,
    Const,
    Formula,
    Not,
    Or,
    Quantified,
    Rel,
    conj,
    disj,
    expr_to_text,
    natural_key,
    to_text,
)
from toolkit.deltakit.formula.jets import DiffPolynomial


@dataclass(frozen=True)
class NormAtom:
    poly: sympy.Expr
    rel: Rel  # Rel.EQ or Rel.LT

    def sort_key(self) -> tuple:
        return (0 if self.rel is Rel.EQ else 1, _degree(self.poly), str(self.poly))

    def to_formula(self) -> Atom:
        return Atom(self.poly, self.rel)

    def to_text(self) -> str:
        return to_text(self.to_formula())


Conjunct = tuple[NormAtom, ...]


@dataclass(frozen=True)
class Dnf:
    disjuncts: tuple[Conjunct, ...]

    @property
    def is_false(self) -> bool:
        return not self.disjuncts

    @property
    def is_true(self) -> bool:
        return any(not d for d in self.disjuncts)

    def polys(self) -> list[sympy.Expr]:
        seen: dict[str, sympy.Expr] = {}
        for d in self.disjuncts:
            for a in d:
                seen.setdefault(str(a.poly), a.poly)
        return [seen[k] for k in sorted(seen)]

    def symbols(self) -> set[sympy.Symbol]:
        out: set[sympy.Symbol] = set()
        for d in self.disjuncts:
            for a in d:
                out |= a.poly.free_symbols
        return out

    def to_formula(self) -> Formula:
        return disj(*(conj(*(a.to_formula() for a in d)) for d in self.disjuncts))

    def to_text(self) -> str:
        return to_text(self.to_formula())

    def to_json(self) -> list[list[dict[str, str]]]:
        return [[{"poly": expr_to_text(a.poly), "rel": a.rel.value} for a in d] for d in self.disjuncts]


DNF_FALSE = Dnf(())
DNF_TRUE = Dnf(((),))


def _degree(expr: sympy.Expr) -> int:
    gens = sorted(expr.free_symbols, key=natural_key)
    if not gens:
        return 0
    return sympy.Poly(expr, *gens).total_degree()


def _gens(expr: sympy.Expr) -> list[sympy.Symbol]:
    return sorted(expr.free_symbols, key=natural_key)


def canonical_poly(expr: sympy.Expr, *, positive_lc: bool) -> tuple[sympy.Rational, sympy.Expr]:
    """(c, p) with expr = c * p, p primitive over Z; lc(p) > 0 when `positive_lc`."""
    expr = sympy.expand(expr)
    gens = _gens(expr)
    if not gens:
        return sympy.Rational(expr), sympy.Integer(1)
    poly = sympy.Poly(expr, *gens, domain="QQ")
    denom, zpoly = poly.clear_denoms(convert=True)
    content, prim = zpoly.primitive()
    c = sympy.Rational(content) / sympy.Rational(denom)
    if not positive_lc:
        return abs(c), (prim * (1 if c > 0 else -1)).as_expr()
    if prim.LC() < 0:
        prim = -prim
        c = -c
    return c, prim.as_expr()


def canonical_eq(expr: sympy.Expr) -> Dnf:
    expr = sympy.expand(expr)
    gens = _gens(expr)
    if not gens:
        return DNF_TRUE if expr == 0 else DNF_FALSE
    sqf = sympy.sqf_part(sympy.Poly(expr, *gens, domain="QQ")).as_expr()
    _, p = canonical_poly(sqf, positive_lc=True)
    return Dnf((((NormAtom(p, Rel.EQ)),),))


def canonical_lt(expr: sympy.Expr) -> Dnf:
    """p < 0 as a DNF: odd-multiplicity factors carry the sign, even ones must not vanish."""
    expr = sympy.expand(expr)
    gens = _gens(expr)
    if not gens:
        return DNF_TRUE if expr < 0 else DNF_FALSE
    coeff, factors = sympy.sqf_list(sympy.Poly(expr, *gens, domain="QQ"))
    sign = 1 if coeff > 0 else -1
    odd = sympy.Integer(1)
    even: list[sympy.Expr] = []
    for f, k in factors:
        c, p = canonical_poly(f.as_expr(), positive_lc=True)
        if c < 0 and k % 2:
            sign = -sign
        if k % 2:
            odd = odd * p
        else:
            even.append(p)
    if odd == 1:
        if sign > 0:
            return DNF_FALSE
        head = DNF_TRUE
    else:
        _, g = canonical_poly(sign * odd, positive_lc=False)
        head = Dnf(((NormAtom(g, Rel.LT),),))
    result = head
    for p in even:
        result = dnf_and(result, Dnf(((NormAtom(p, Rel.LT),), (NormAtom(sympy.expand(-p), Rel.LT),))))
    return result


def dnf_or(*parts: Dnf) -> Dnf:
    return _simplify([d for part in parts for d in part.disjuncts])


def dnf_and(*parts: Dnf) -> Dnf:
    acc: list[Conjunct] = [()]
    for part in parts:
        acc = [a + b for a, b in product(acc, part.disjuncts)]
        if not acc:
            return DNF_FALSE
    return _simplify(acc)


def _contradictory(atoms: Iterable[NormAtom]) -> bool:
    eqs = {str(a.poly) for a in atoms if a.rel is Rel.EQ}
    lts = {str(a.poly) for a in atoms if a.rel is Rel.LT}
    if eqs & lts:
        return True
    for a in atoms:
        if a.rel is Rel.LT:
            neg = str(sympy.expand(-a.poly))
            if neg in lts or neg in eqs:
                return True
    return False


def _simplify(conjuncts: list[Conjunct]) -> Dnf:
    cleaned: dict[tuple, Conjunct] = {}
    for conjunct in conjuncts:
        unique = {a.sort_key(): a for a in conjunct}
        atoms = tuple(unique[k] for k in sorted(unique))
        if _contradictory(atoms):
            continue
        key = tuple(a.sort_key() for a in atoms)
        cleaned[key] = atoms
    if () in cleaned:
        return DNF_TRUE
    keys = sorted(cleaned)
    kept = []
    for k in keys:
        ks = set(k)
        if any(set(other) < ks for other in keys if other != k):
            continue
        kept.append(cleaned[k])
    return Dnf(tuple(kept))


def _atom_dnf(atom: Atom, negate: bool) -> Dnf:
    term = atom.term
    expr = term.to_sympy() if isinstance(term, DiffPolynomial) else sympy.expand(term)
    rel = atom.rel.negated() if negate else atom.rel
    if rel is Rel.EQ:
        return canonical_eq(expr)
    if rel is Rel.NE:
        return dnf_or(canonical_lt(expr), canonical_lt(-expr))
    if rel is Rel.LT:
        return canonical_lt(expr)
    if rel is Rel.LE:
        return dnf_or(canonical_lt(expr), canonical_eq(expr))
    if rel is Rel.GT:
        return canonical_lt(-expr)
    return dnf_or(canonical_lt(-expr), canonical_eq(expr))


def _to_dnf(f: Formula, negate: bool) -> Dnf:
    if isinstance(f, Atom):
        return _atom_dnf(f, negate)
    if isinstance(f, Const):
        return DNF_TRUE if f.value != negate else DNF_FALSE
    if isinstance(f, Not):
        return _to_dnf(f.arg, not negate)
    if isinstance(f, And):
        parts = [_to_dnf(a, negate) for a in f.args]
        return dnf_or(*parts) if negate else dnf_and(*parts)
    if isinstance(f, Or):
        parts = [_to_dnf(a, negate) for a in f.args]
        return dnf_and(*parts) if negate else dnf_or(*parts)
    if isinstance(f, Quantified):
        raise PreconditionError("normalize expects a quantifier-free formula")
    raise TypeError(f"not a formula: {f!r}")


def normalize(f: Formula) -> Dnf:
    return _to_dnf(f, False)


def dnf_not(d: Dnf) -> Dnf:
    return normalize(Not(d.to_formula()))


def dnf_from_conjuncts(conjuncts: Iterable[Conjunct]) -> Dnf:
    """A DNF from already-canonical atoms, with duplicate and subsumed conjuncts removed."""
    return _simplify(list(conjuncts))
