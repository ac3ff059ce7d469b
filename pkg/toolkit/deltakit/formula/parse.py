"""Recursive-descent parser for the formula grammar.

One grammar serves both languages. `parse` reads quantifier-free L_delta text over the
indeterminates x, y, z, x1..x9 with the derivation d(t). `parse_or` reads L_or text over
arbitrary lower-case identifiers with `ex v. ...` / `all v. ...` quantifier blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Generic, TypeVar

import sympy

from toolkit.deltakit.core.errors import (
    ArityError,
    FormulaSyntaxError,
    GrammarError,
    LexicalError,
    UnknownSymbolError,
)
from toolkit.deltakit.formula.ast import (
    And,
    Atom,
    Const,
    Formula,
    Not,
    Or,
    Quant,
    Quantified,
    Rel,
    free_symbols,
)
from toolkit.deltakit.formula.jets import DiffPolynomial, differentiate

T = TypeVar("T")

_DELTA_NAMES = {"x": 1, "y": 2, "z": 3, **{f"x{i}": i for i in range(1, 10)}}
_KEYWORDS = {"true", "false", "ex", "all", "d"}
_TWO_CHAR = {"!=", "<=", ">="}
_ONE_CHAR = set("+-*^/(),.=<>&|!")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "op", "end"
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line, col = 1, 1
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(Token("num", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        pair = text[i : i + 2]
        if pair in _TWO_CHAR:
            tokens.append(Token("op", pair, line, col))
            i += 2
            col += 2
            continue
        if ch in _ONE_CHAR:
            tokens.append(Token("op", ch, line, col))
            i += 1
            col += 1
            continue
        raise LexicalError(f"unexpected character {ch!r}", line=line, column=col)
    tokens.append(Token("end", "", line, col))
    return tokens


class _Algebra(Generic[T]):
    def number(self, value: Fraction) -> T:
        raise NotImplementedError

    def variable(self, tok: Token) -> T:
        raise NotImplementedError

    def derive(self, term: T, tok: Token) -> T:
        raise NotImplementedError


class _DeltaAlgebra(_Algebra[DiffPolynomial]):
    def number(self, value: Fraction) -> DiffPolynomial:
        return DiffPolynomial.constant(value)

    def variable(self, tok: Token) -> DiffPolynomial:
        base = _DELTA_NAMES.get(tok.text)
        if base is None:
            raise UnknownSymbolError(
                f"unknown variable {tok.text!r} (expected x, y, z or x1..x9)", line=tok.line, column=tok.column
            )
        return DiffPolynomial.jet(base, 0)

    def derive(self, term: DiffPolynomial, tok: Token) -> DiffPolynomial:
        return differentiate(term)


class _OrAlgebra(_Algebra[sympy.Expr]):
    def number(self, value: Fraction) -> sympy.Expr:
        return sympy.Rational(value.numerator, value.denominator)

    def variable(self, tok: Token) -> sympy.Expr:
        return sympy.Symbol(tok.text)

    def derive(self, term: sympy.Expr, tok: Token) -> sympy.Expr:
        raise GrammarError("the derivation d(...) is not part of L_or", line=tok.line, column=tok.column)


class _Parser(Generic[T]):
    def __init__(self, text: str, algebra: _Algebra[T], *, allow_quantifiers: bool) -> None:
        self.tokens = tokenize(text)
        self.pos = 0
        self.algebra = algebra
        self.allow_quantifiers = allow_quantifiers

    # token helpers

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in {"op", "ident"} and tok.text == text

    def advance(self) -> Token:
        tok = self.peek()
        self.pos = min(self.pos + 1, len(self.tokens) - 1)
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if not self.at(text):
            found = tok.text or "end of input"
            raise GrammarError(f"expected {text!r}, found {found!r}", line=tok.line, column=tok.column)
        return self.advance()

    def fail(self, message: str) -> FormulaSyntaxError:
        tok = self.peek()
        return GrammarError(message, line=tok.line, column=tok.column)

    # formulas

    def parse_top(self) -> Formula:
        f = self.formula()
        if self.peek().kind != "end":
            raise self.fail(f"unexpected {self.peek().text!r} after formula")
        return f

    def formula(self) -> Formula:
        args = [self.conjunction()]
        while self.at("|"):
            self.advance()
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self) -> Formula:
        args = [self.unary()]
        while self.at("&"):
            self.advance()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> Formula:
        if self.at("!"):
            self.advance()
            return Not(self.unary())
        if self.at("ex") or self.at("all"):
            return self.quantified()
        return self.primary()

    def quantified(self) -> Formula:
        tok = self.advance()
        if not self.allow_quantifiers:
            raise GrammarError("quantifiers are not allowed here", line=tok.line, column=tok.column)
        quant = Quant.EXISTS if tok.text == "ex" else Quant.FORALL
        names = [self._bound_name()]
        while self.at(","):
            self.advance()
            names.append(self._bound_name())
        self.expect(".")
        body = self.formula()
        variables = tuple(sympy.Symbol(n.text) for n in names)
        missing = [v.name for v in variables if v not in free_symbols(body)]
        if missing:
            raise GrammarError(
                f"bound variable(s) {', '.join(missing)} do not occur in the matrix", line=tok.line, column=tok.column
            )
        return Quantified(quant, variables, body)

    def _bound_name(self) -> Token:
        tok = self.advance()
        if tok.kind != "ident" or tok.text in _KEYWORDS:
            raise GrammarError("expected a variable name", line=tok.line, column=tok.column)
        return tok

    def primary(self) -> Formula:
        if self.at("true"):
            self.advance()
            return Const(True)
        if self.at("false"):
            self.advance()
            return Const(False)
        if self.at("("):
            start = self.pos
            try:
                return self.atom()
            except FormulaSyntaxError as atom_error:
                self.pos = start
                try:
                    self.expect("(")
                    f = self.formula()
                    self.expect(")")
                    return f
                except FormulaSyntaxError as group_error:
                    raise _furthest(atom_error, group_error) from None
        return self.atom()

    def atom(self) -> Formula:
        lhs = self.term()
        tok = self.peek()
        rel = _RELS.get(tok.text) if tok.kind == "op" else None
        if rel is None:
            found = tok.text or "end of input"
            raise GrammarError(f"expected a relation, found {found!r}", line=tok.line, column=tok.column)
        self.advance()
        rhs = self.term()
        return Atom(_normal_term(lhs - rhs), rel)

    # terms

    def term(self) -> T:
        if self.at("-"):
            self.advance()
            value = -self.product()
        else:
            value = self.product()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def product(self) -> T:
        value = self.power()
        while self.at("*"):
            self.advance()
            value = value * self.power()
        return value

    def power(self) -> T:
        value = self.factor()
        if self.at("^"):
            caret = self.advance()
            tok = self.peek()
            if self.at("-"):
                raise GrammarError("negative exponents are not allowed", line=tok.line, column=tok.column)
            if tok.kind != "num":
                raise GrammarError("expected a natural-number exponent", line=caret.line, column=caret.column)
            self.advance()
            value = value ** int(tok.text)
        return value

    def factor(self) -> T:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            value = Fraction(int(tok.text))
            if self.at("/"):
                self.advance()
                den = self.peek()
                if den.kind != "num":
                    raise GrammarError("division is only allowed between integer literals", line=den.line, column=den.column)
                self.advance()
                if int(den.text) == 0:
                    raise GrammarError("zero denominator", line=den.line, column=den.column)
                value = value / int(den.text)
            return self.algebra.number(value)
        if self.at("-"):
            self.advance()
            return -self.factor()
        if self.at("("):
            self.advance()
            value = self.term()
            self.expect(")")
            return value
        if tok.kind == "ident" and tok.text == "d":
            self.advance()
            self.expect("(")
            args = [self.term()]
            while self.at(","):
                self.advance()
                args.append(self.term())
            self.expect(")")
            if len(args) != 1:
                raise ArityError(f"d expects 1 argument, got {len(args)}", line=tok.line, column=tok.column)
            return self.algebra.derive(args[0], tok)
        if tok.kind == "ident" and tok.text not in _KEYWORDS:
            self.advance()
            return self.algebra.variable(tok)
        found = tok.text or "end of input"
        raise GrammarError(f"expected a term, found {found!r}", line=tok.line, column=tok.column)


_RELS = {r.value: r for r in Rel}


def _normal_term(term: DiffPolynomial | sympy.Expr) -> DiffPolynomial | sympy.Expr:
    if isinstance(term, DiffPolynomial):
        return term
    return sympy.expand(term)


def _furthest(a: FormulaSyntaxError, b: FormulaSyntaxError) -> FormulaSyntaxError:
    return a if (a.line, a.column) > (b.line, b.column) else b


def _run(text: str, algebra: _Algebra, *, allow_quantifiers: bool) -> Formula:
    return _Parser(text, algebra, allow_quantifiers=allow_quantifiers).parse_top()


def parse(text: str) -> Formula:
    """Quantifier-free L_delta formula."""
    return _run(text, _DeltaAlgebra(), allow_quantifiers=False)


def parse_or(text: str) -> Formula:
    """L_or formula, quantifier blocks allowed."""
    return _run(text, _OrAlgebra(), allow_quantifiers=True)


def parse_term(text: str) -> DiffPolynomial:
    parser = _Parser(text, _DeltaAlgebra(), allow_quantifiers=False)
    value = parser.term()
    if parser.peek().kind != "end":
        raise parser.fail(f"unexpected {parser.peek().text!r} after term")
    return value

