"""Decision and quantifier elimination by truth propagation over a CAD.

Quantifier-free results are read off the sign vectors of the free-level projection
factors. When a true and a false cell share a sign vector the factor set is augmented
with derivatives and the decomposition rebuilt.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import sympy

from toolkit.deltakit.core.budget import checkpoint
from toolkit.deltakit.core.cache import get_cache
from toolkit.deltakit.core.errors import PreconditionError, ResourceLimitError
from toolkit.deltakit.engine.cad import Cad, CadCell, factor_set, main_level
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
    conj,
    disj,
    free_symbols,
    natural_key,
    to_text,
)
from toolkit.deltakit.formula.jets import DiffPolynomial
from toolkit.deltakit.formula.normalize import DNF_FALSE, DNF_TRUE, Dnf, normalize
from toolkit.deltakit.tower.tower import Tower, level_index

logger = logging.getLogger("deltakit.qe")

_AUGMENT_ROUNDS = 3
_ALL = frozenset({-1, 0, 1})
_WIDENINGS = {
    0: (frozenset({0, 1}), frozenset({0, -1})),
    1: (frozenset({1, 0}), frozenset({1, -1})),
    -1: (frozenset({-1, 0}), frozenset({-1, 1})),
}


@dataclass(frozen=True)
class Prenex:
    prefix: tuple[tuple[Quant, sympy.Symbol], ...]
    matrix: Formula

    @property
    def bound(self) -> list[sympy.Symbol]:
        return [s for _, s in self.prefix]


def _term_expr(term: DiffPolynomial | sympy.Expr) -> sympy.Expr:
    if isinstance(term, DiffPolynomial):
        return term.to_sympy()
    return sympy.expand(term)


def _rename(f: Formula, mapping: dict[sympy.Symbol, sympy.Symbol]) -> Formula:
    if isinstance(f, Atom):
        return Atom(_term_expr(f.term).xreplace(mapping), f.rel)
    if isinstance(f, And):
        return And(tuple(_rename(a, mapping) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_rename(a, mapping) for a in f.args))
    if isinstance(f, Not):
        return Not(_rename(f.arg, mapping))
    if isinstance(f, Quantified):
        inner = {k: v for k, v in mapping.items() if k not in f.variables}
        return Quantified(f.quant, f.variables, _rename(f.body, inner))
    return f


def _dual(q: Quant) -> Quant:
    return Quant.FORALL if q is Quant.EXISTS else Quant.EXISTS


def prenex(f: Formula) -> Prenex:
    """Pull every quantifier to the front, renaming bound variables apart."""
    counter = itertools.count()

    def walk(g: Formula) -> tuple[list[tuple[Quant, sympy.Symbol]], Formula]:
        if isinstance(g, Atom):
            return [], Atom(_term_expr(g.term), g.rel)
        if isinstance(g, Const):
            return [], g
        if isinstance(g, Not):
            prefix, m = walk(g.arg)
            return [(_dual(q), s) for q, s in prefix], Not(m)
        if isinstance(g, (And, Or)):
            prefix: list[tuple[Quant, sympy.Symbol]] = []
            parts = []
            for a in g.args:
                p, m = walk(a)
                prefix.extend(p)
                parts.append(m)
            return prefix, (And(tuple(parts)) if isinstance(g, And) else Or(tuple(parts)))
        if isinstance(g, Quantified):
            fresh = {v: sympy.Symbol(f"_q{next(counter)}") for v in g.variables}
            prefix, m = walk(_rename(g.body, fresh))
            return [(g.quant, fresh[v]) for v in g.variables] + prefix, m
        raise TypeError(f"not a formula: {g!r}")

    prefix, matrix = walk(f)
    return Prenex(tuple(prefix), matrix)


def _truth(cell: CadCell, nfree: int, quantifiers: Sequence[Quant], matrix: Dnf) -> bool:
    total = nfree + len(quantifiers)
    if cell.depth == total:
        return cell.holds(matrix)
    checkpoint()
    q = quantifiers[cell.depth - nfree]
    kids = cell.children()
    if q is Quant.EXISTS:
        return any(_truth(k, nfree, quantifiers, matrix) for k in kids)
    return all(_truth(k, nfree, quantifiers, matrix) for k in kids)


def _matches(allowed: Sequence[frozenset[int]], vec: Sequence[int]) -> bool:
    return all(v in a for a, v in zip(allowed, vec))


def sign_condition(poly: sympy.Expr, allowed: frozenset[int]) -> Formula:
    if allowed == _ALL:
        return Const(True)
    if len(allowed) == 1:
        (s,) = allowed
        rel = {0: Rel.EQ, 1: Rel.GT, -1: Rel.LT}[s]
    else:
        rel = {frozenset({0, 1}): Rel.GE, frozenset({0, -1}): Rel.LE, frozenset({1, -1}): Rel.NE}[allowed]
    return Atom(poly, rel)


def solution_formula(
    factors: Sequence[sympy.Expr],
    true_vectors: set[tuple[int, ...]],
    false_vectors: set[tuple[int, ...]],
) -> Dnf:
    """A DNF true on every true sign vector and false on every false one.

    Each true vector is widened literal by literal while no false vector matches.
    """
    if not true_vectors:
        return DNF_FALSE
    if not false_vectors:
        return DNF_TRUE
    falses = sorted(false_vectors)
    covers: list[list[frozenset[int]]] = []
    for vec in sorted(true_vectors):
        if any(_matches(c, vec) for c in covers):
            continue
        allowed = [frozenset({s}) for s in vec]
        for i, s in enumerate(vec):
            for option in (_ALL,) + _WIDENINGS[s]:
                trial = allowed[:i] + [option] + allowed[i + 1 :]
                if not any(_matches(trial, f) for f in falses):
                    allowed = trial
                    break
        covers.append(allowed)
    formula = disj(*(conj(*(sign_condition(p, a) for p, a in zip(factors, c))) for c in covers))
    return normalize(formula)


def describe_cells(
    variables: Sequence[sympy.Symbol],
    polys: Sequence[sympy.Expr],
    depth: int,
    truth: Callable[[CadCell], bool],
    tower: Tower | None = None,
) -> Dnf:
    """Quantifier-free description over variables[:depth] of the cells where `truth` holds.

    `truth` must be invariant on the cells of any CAD for `polys` and its augmentations.
    """
    polys = list(polys)
    tower = tower or Tower()
    for attempt in range(_AUGMENT_ROUNDS + 1):
        cad = Cad(variables, polys, tower)
        factors = cad.factors(depth)
        true_vectors: set[tuple[int, ...]] = set()
        false_vectors: set[tuple[int, ...]] = set()
        for cell in cad.cells(depth):
            checkpoint()
            vec = cell.sign_vector(factors)
            (true_vectors if truth(cell) else false_vectors).add(vec)
        if not true_vectors & false_vectors:
            return solution_formula(factors, true_vectors, false_vectors)
        logger.debug("qe: sign-vector conflict at attempt %d, augmenting with derivatives", attempt)
        derivatives = []
        for f in factors:
            x = variables[main_level(f, variables)]
            if sympy.degree(f, x) >= 2:
                derivatives.append(sympy.diff(f, x))
        before = set(map(str, factor_set(polys, variables, tower)))
        after = factor_set(polys + derivatives, variables, tower)
        if set(map(str, after)) == before:
            break
        polys = polys + derivatives
    raise ResourceLimitError(
        "no sign-vector description separates the true cells from the false ones",
        kind="solution-formula",
    )


def solve(
    variables: Sequence[sympy.Symbol],
    quantifiers: Sequence[Quant],
    matrix: Dnf,
    tower: Tower | None = None,
) -> Dnf:
    """Q_1 x_{k} ... Q_m x_{k+m-1} matrix as a DNF over the first k variables.

    `variables` lists the free variables first and then the bound ones in prefix order.
    """
    nfree = len(variables) - len(quantifiers)
    if matrix.is_false or matrix.is_true:
        return matrix
    return describe_cells(
        variables, matrix.polys(), nfree, lambda cell: _truth(cell, nfree, quantifiers, matrix), tower
    )


def _ordered_free(f: Formula, bound: Sequence[sympy.Symbol]) -> list[sympy.Symbol]:
    out = free_symbols(f) - set(bound)
    return sorted((s for s in out if level_index(s) is None), key=natural_key)


def decide(f: Formula, tower: Tower | None = None) -> bool:
    """Truth of a closed sentence over the real closure of Q (or of the given tower)."""
    p = prenex(f)
    free = _ordered_free(p.matrix, p.bound)
    if free:
        raise PreconditionError(f"decide expects a closed sentence; free: {', '.join(s.name for s in free)}")
    matrix = normalize(p.matrix)
    if matrix.is_true or matrix.is_false:
        return matrix.is_true
    cad = Cad(p.bound, matrix.polys(), tower)
    result = _truth(cad.root, 0, [q for q, _ in p.prefix], matrix)
    logger.debug("decide: %s -> %s", to_text(f), result)
    return result


def eliminate(f: Formula, variables: Sequence[sympy.Symbol] | None = None, tower: Tower | None = None) -> Dnf:
    """A normalized quantifier-free equivalent of f.

    `variables` fixes the order of the free variables (default: natural order).
    """
    p = prenex(f)
    free = _ordered_free(p.matrix, p.bound)
    if variables is not None:
        missing = set(free) - set(variables)
        if missing:
            raise PreconditionError(f"free variables not listed: {', '.join(sorted(s.name for s in missing))}")
        free = list(variables)
    matrix = normalize(p.matrix)
    if not p.prefix:
        return matrix
    key = (to_text(f), tuple(s.name for s in free), tower)

    def compute() -> Dnf:
        return solve(free + p.bound, [q for q, _ in p.prefix], matrix, tower)

    return get_cache().get_or_compute("eliminate", key, compute)
