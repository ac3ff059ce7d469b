"""Formula trees shared by the differential (L_delta) and ordered-field (L_or) languages.

Atoms compare a term with zero. In L_delta the term is a DiffPolynomial, in L_or it is an
expanded sympy expression. Both print in the same text grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterator, Union

import sympy

from toolkit.deltakit.formula.jets import DiffPolynomial, format_terms

Term = Union[DiffPolynomial, sympy.Expr]


class Rel(str, Enum):
    EQ = "="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

    def holds(self, sign: int) -> bool:
        return {
            Rel.EQ: sign == 0,
            Rel.NE: sign != 0,
            Rel.LT: sign < 0,
            Rel.LE: sign <= 0,
            Rel.GT: sign > 0,
            Rel.GE: sign >= 0,
        }[self]

    def negated(self) -> "Rel":
        return {
            Rel.EQ: Rel.NE,
            Rel.NE: Rel.EQ,
            Rel.LT: Rel.GE,
            Rel.LE: Rel.GT,
            Rel.GT: Rel.LE,
            Rel.GE: Rel.LT,
        }[self]


class Quant(str, Enum):
    EXISTS = "ex"
    FORALL = "all"


@dataclass(frozen=True)
class Atom:
    term: Term
    rel: Rel


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Quantified:
    quant: Quant
    variables: tuple[sympy.Symbol, ...]
    body: "Formula"


Formula = Union[Atom, And, Or, Not, Const, Quantified]

TRUE = Const(True)
FALSE = Const(False)


def conj(*args: Formula) -> Formula:
    flat: list[Formula] = []
    for a in args:
        if a == TRUE:
            continue
        if a == FALSE:
            return FALSE
        flat.append(a)
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*args: Formula) -> Formula:
    flat: list[Formula] = []
    for a in args:
        if a == FALSE:
            continue
        if a == TRUE:
            return TRUE
        flat.append(a)
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def iter_atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from iter_atoms(a)
    elif isinstance(f, Not):
        yield from iter_atoms(f.arg)
    elif isinstance(f, Quantified):
        yield from iter_atoms(f.body)


def map_atoms(f: Formula, fn: Callable[[Atom], Formula]) -> Formula:
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, And):
        return And(tuple(map_atoms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(map_atoms(a, fn) for a in f.args))
    if isinstance(f, Not):
        return Not(map_atoms(f.arg, fn))
    if isinstance(f, Quantified):
        return Quantified(f.quant, f.variables, map_atoms(f.body, fn))
    return f


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, Quantified):
        return False
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    return True


def evaluate(f: Formula, atom_value: Callable[[Atom], bool]) -> bool:
    """Boolean value of a quantifier-free formula given the truth of each atom."""
    if isinstance(f, Atom):
        return atom_value(f)
    if isinstance(f, Const):
        return f.value
    if isinstance(f, And):
        return all(evaluate(a, atom_value) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, atom_value) for a in f.args)
    if isinstance(f, Not):
        return not evaluate(f.arg, atom_value)
    raise ValueError("evaluate expects a quantifier-free formula")


def _term_symbols(term: Term) -> set[sympy.Symbol]:
    if isinstance(term, DiffPolynomial):
        return {v.symbol() for v in term.jets()}
    return set(term.free_symbols)


def free_symbols(f: Formula) -> set[sympy.Symbol]:
    if isinstance(f, Atom):
        return _term_symbols(f.term)
    if isinstance(f, (And, Or)):
        out: set[sympy.Symbol] = set()
        for a in f.args:
            out |= free_symbols(a)
        return out
    if isinstance(f, Not):
        return free_symbols(f.arg)
    if isinstance(f, Quantified):
        return free_symbols(f.body) - set(f.variables)
    return set()


_NATURAL = re.compile(r"(\d+)")


def natural_key(sym: sympy.Symbol) -> tuple:
    parts = _NATURAL.split(sym.name)
    return tuple(int(p) if p.isdigit() else p for p in parts)


def expr_to_text(expr: sympy.Expr) -> str:
    expr = sympy.expand(expr)
    gens = sorted(expr.free_symbols, key=natural_key)
    if not gens:
        value = sympy.Rational(expr)
        return format_terms([(Fraction(int(value.p), int(value.q)), [])]) if value != 0 else "0"
    poly = sympy.Poly(expr, *gens, domain="QQ")
    terms = []
    for monom, coeff in poly.terms():
        q = sympy.Rational(coeff)
        factors = [(g.name, e) for g, e in zip(gens, monom) if e]
        terms.append((Fraction(int(q.p), int(q.q)), factors))
    return format_terms(terms)


def term_to_text(term: Term) -> str:
    if isinstance(term, DiffPolynomial):
        return term.to_text()
    return expr_to_text(term)


def to_text(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"{term_to_text(f.term)} {f.rel.value} 0"
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        return f"!({to_text(f.arg)})"
    if isinstance(f, (And, Or)):
        sep = " & " if isinstance(f, And) else " | "
        parts = []
        for a in f.args:
            text = to_text(a)
            if isinstance(a, (And, Or, Quantified)):
                text = f"({text})"
            parts.append(text)
        return sep.join(parts)
    if isinstance(f, Quantified):
        names = ", ".join(v.name for v in f.variables)
        return f"{f.quant.value} {names}. ({to_text(f.body)})"
    raise TypeError(f"not a formula: {f!r}")
