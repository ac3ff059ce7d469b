"""delta-dimension of quantifier-free differential formulas, read off their starred sets."""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

import sympy

from toolkit.deltakit.core.errors import MalformedSchemeError, PreconditionError
from toolkit.deltakit.dimension.value import DimensionValue, dim_max
from toolkit.deltakit.engine.cad import CadCell
from toolkit.deltakit.engine.geometry import dim, is_empty
from toolkit.deltakit.engine.qe import describe_cells
from toolkit.deltakit.engine.sets import Base, SemialgebraicSet
from toolkit.deltakit.formula.ast import (
    And,
    Atom,
    Formula,
    Or,
    Quant,
    Quantified,
    Rel,
    map_atoms,
)
from toolkit.deltakit.formula.jets import DiffPolynomial, v_symbol
from toolkit.deltakit.formula.star import formula_windows, star

if TYPE_CHECKING:
    from toolkit.deltakit.definable.schemes import DeltaTypeScheme

logger = logging.getLogger("deltakit.dimension")


def _leaves(cell: CadCell, depth: int) -> list[CadCell]:
    if cell.depth == depth:
        return [cell]
    out: list[CadCell] = []
    for kid in cell.children():
        out.extend(_leaves(kid, depth))
    return out


def _block_dim(X: SemialgebraicSet, windows: Sequence[int]) -> DimensionValue:
    """Fibered dimension of a starred set whose coordinates split into consecutive jet blocks."""
    if is_empty(X):
        return DimensionValue.minus_infinity()
    if len(windows) == 1:
        return DimensionValue(1 if dim(X) == DimensionValue(X.ambient) else 0)
    depth = X.ambient - windows[-1]
    dnf = X.resolved()
    variables = X.variables()
    tower = X.base.tower

    def open_fiber(cell: CadCell) -> bool:
        return any(
            leaf.holds(dnf) and all(leaf.is_sector(k) for k in range(depth, X.ambient))
            for leaf in _leaves(cell, X.ambient)
        )

    def thin_fiber(cell: CadCell) -> bool:
        leaves = _leaves(cell, X.ambient)
        return any(leaf.holds(dnf) for leaf in leaves) and not open_fiber(cell)

    polys = dnf.polys()
    x1 = SemialgebraicSet(depth, describe_cells(variables, polys, depth, open_fiber, tower), Base(tower))
    x0 = SemialgebraicSet(depth, describe_cells(variables, polys, depth, thin_fiber, tower), Base(tower))
    head = list(windows[:-1])
    return dim_max([_block_dim(x1, head) + 1, _block_dim(x0, head)])


def delta_dim_1(phi: Formula) -> DimensionValue:
    """-inf when the formula has no solution, 1 when its starred set has interior, else 0.

    A thin starred set is checked against its hull: jets that no point can carry
    (delta x = 1 & delta^2 x = 1) leave the hull empty.
    """
    from toolkit.deltakit.definable.density import hull_of, single_indeterminate, starred_set

    base = single_indeterminate(phi)
    _, X = starred_set(phi, base)
    if is_empty(X):
        return DimensionValue.minus_infinity()
    if dim(X) == DimensionValue(X.ambient):
        return DimensionValue(1)
    if is_empty(hull_of(X, base).hull):
        return DimensionValue.minus_infinity()
    return DimensionValue(0)


def delta_dim_n(phi: Formula, bases: Sequence[int] | None = None) -> DimensionValue:
    """Fibered delta-dimension over the listed indeterminates (default: those phi mentions)."""
    mentioned = set(formula_windows(phi))
    bases = sorted(set(bases) if bases is not None else mentioned) or [1]
    if not mentioned <= set(bases):
        raise PreconditionError(f"formula mentions indeterminates {sorted(mentioned - set(bases))} outside {bases}")
    if len(bases) == 1:
        return delta_dim_1(phi)
    sf = star(phi, {b: 1 for b in bases})
    windows = sf.windows()
    X = SemialgebraicSet.from_formula(sf.ambient, sf.formula)
    out = _block_dim(X, [windows[b] for b in bases])
    logger.debug("delta_dim_n over %s: %s", bases, out)
    return out


def ball_sentence(X: SemialgebraicSet, center: Sequence[Fraction | int] | None = None) -> Formula:
    """First-order 'X contains an open box around the center' (around some point when None).

    exists r > 0, for all y: some |y_i - c_i| >= r, or y in X.
    """
    n = X.ambient
    r = sympy.Symbol("r")
    ys = [sympy.Symbol(f"y{i}") for i in range(n)]
    if center is None:
        cs = [sympy.Symbol(f"c{i}") for i in range(n)]
    else:
        cs = [sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) for c in center]
    rename = {v_symbol(i): ys[i] for i in range(n)}
    body = map_atoms(X.resolved().to_formula(), lambda a: Atom(sympy.expand(a.term.xreplace(rename)), a.rel))
    away: list[Formula] = []
    for y, c in zip(ys, cs):
        away.append(Atom(sympy.expand(y - c - r), Rel.GE))
        away.append(Atom(sympy.expand(c - y - r), Rel.GE))
    inner: Formula = Quantified(Quant.FORALL, tuple(ys), Or(tuple(away) + (body,))) if ys else body
    sentence: Formula = Quantified(Quant.EXISTS, (r,), And((Atom(-r, Rel.LT), inner)))
    if center is None and cs:
        sentence = Quantified(Quant.EXISTS, tuple(cs), sentence)
    return sentence


def scheme_dim(s: "DeltaTypeScheme", battery: Sequence[DiffPolynomial] | None = None) -> DimensionValue:
    """cl-dimension of the scheme's canonical realization.

    Zero and algebraic tails are annihilated by a nonzero differential polynomial; a
    minus-infinity tail makes every nonzero differential polynomial dominated by its top
    jet. With a battery, the answer is corroborated by decide on each polynomial.
    """
    from toolkit.deltakit.definable.membership import decide
    from toolkit.deltakit.definable.schemes import TailKind

    if s.kind is TailKind.MINUS_INFINITY:
        value = DimensionValue(1)
    elif s.kind in (TailKind.ZERO, TailKind.ALGEBRAIC):
        value = DimensionValue(0)
    else:
        raise MalformedSchemeError(f"unknown scheme kind {s.kind!r}")
    if battery:
        x = s.indeterminate
        for q in battery:
            if q.is_zero() or q.bases() - {x}:
                continue
            vanishes = decide(s, Atom(q, Rel.EQ))
            if value.value == 1 and vanishes and not q.is_constant():
                raise MalformedSchemeError(f"{q.to_text()} vanishes at a transcendental realization")
        annihilator = s.annihilator()
        if annihilator is not None and not decide(s, Atom(annihilator, Rel.EQ)):
            raise MalformedSchemeError(f"annihilator {annihilator.to_text()} does not vanish")
    return value
