"""Dimension, closure and interior, projections, fibers and the fiber-dimension split."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import sympy

from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.dimension.value import DimensionValue
from toolkit.deltakit.engine.cad import Cad, CadCell
from toolkit.deltakit.engine.qe import describe_cells, solve
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
from toolkit.deltakit.formula.jets import v_symbol
from toolkit.deltakit.formula.normalize import (
    DNF_FALSE,
    Dnf,
    NormAtom,
    dnf_and,
    dnf_from_conjuncts,
    dnf_not,
)
from toolkit.deltakit.tower.point import AlgebraicPoint, RootRef, homogenize
from toolkit.deltakit.tower.signs import sign_of
from toolkit.deltakit.tower.tower import Tower, TowerElement, join

logger = logging.getLogger("deltakit.geometry")


def _cad(X: SemialgebraicSet, extra: Sequence[sympy.Expr] = ()) -> Cad:
    return Cad(X.variables(), X.resolved().polys() + list(extra), X.base.tower)


def _realized(dnf: Dnf, variables: Sequence[sympy.Symbol], tower: Tower) -> Dnf:
    """dnf without the conjuncts that hold at no cell."""
    if dnf.is_false or dnf.is_true:
        return dnf
    cells = list(Cad(variables, dnf.polys(), tower).cells())
    kept = tuple(c for c in dnf.disjuncts if any(cell.holds(Dnf((c,))) for cell in cells))
    if len(kept) < len(dnf.disjuncts):
        logger.debug("dropped %d empty conjuncts", len(dnf.disjuncts) - len(kept))
    return Dnf(kept)


def dim(X: SemialgebraicSet) -> DimensionValue:
    """The largest cell dimension among the CAD cells inside X; -inf iff X is empty."""
    dnf = X.resolved()
    if dnf.is_false:
        return DimensionValue.minus_infinity()
    if dnf.is_true:
        return DimensionValue(X.ambient)
    best: int | None = None
    for cell in _cad(X).cells():
        if cell.holds(dnf) and (best is None or cell.dimension > best):
            best = cell.dimension
            if best == X.ambient:
                break
    return DimensionValue(best)


def is_empty(X: SemialgebraicSet) -> bool:
    return dim(X).is_minus_infinity


def prefix_dims(X: SemialgebraicSet) -> list[DimensionValue]:
    """dim of the projection of X onto its first k coordinates, for k = 1..ambient."""
    dnf = X.resolved()
    best: list[int | None] = [None] * X.ambient
    if dnf.is_false:
        return [DimensionValue.minus_infinity()] * X.ambient
    for cell in _cad(X).cells():
        if not cell.holds(dnf):
            continue
        count = 0
        for k, i in enumerate(cell.index):
            count += i % 2 == 0
            if best[k] is None or count > best[k]:
                best[k] = count
    return [DimensionValue(b) for b in best]


def _joint_cells(X: SemialgebraicSet, Y: SemialgebraicSet) -> tuple[Dnf, Dnf, Cad]:
    if X.ambient != Y.ambient:
        raise PreconditionError(f"ambient mismatch: {X.ambient} vs {Y.ambient}")
    tower = join(X.base.tower, Y.base.tower)
    dx, dy = X.resolved(), Y.resolved()
    return dx, dy, Cad(X.variables(), dx.polys() + dy.polys(), tower)


def is_subset(X: SemialgebraicSet, Y: SemialgebraicSet) -> bool:
    dx, dy, cad = _joint_cells(X, Y)
    return all(cell.holds(dy) for cell in cad.cells() if cell.holds(dx))


def same_set(X: SemialgebraicSet, Y: SemialgebraicSet) -> bool:
    dx, dy, cad = _joint_cells(X, Y)
    return all(cell.holds(dx) == cell.holds(dy) for cell in cad.cells())


def _less_than(var: sympy.Symbol, value: TowerElement, tower: Tower) -> NormAtom:
    """var < value as an atom with polynomial coefficients."""
    s = sign_of(tower, value.den)
    return NormAtom(sympy.expand(s * (value.den * var - value.num)), Rel.LT)


def _greater_than(var: sympy.Symbol, value: TowerElement, tower: Tower) -> NormAtom:
    s = sign_of(tower, value.den)
    return NormAtom(sympy.expand(s * (value.num - value.den * var)), Rel.LT)


def meets_box(dnf: Dnf, point: AlgebraicPoint, variables: Sequence[sympy.Symbol]) -> bool:
    """Whether the set meets the open box of infinitesimal radius around the point."""
    tower, eps = point.tower.with_infinitesimal()
    point = point.lift(tower)
    atoms: list[NormAtom] = []
    for var, c in zip(variables, point.coords):
        atoms.append(_greater_than(var, c - eps, tower))
        atoms.append(_less_than(var, c + eps, tower))
    box = Dnf((tuple(atoms),))
    combined = dnf_and(dnf, box)
    if combined.is_false:
        return False
    cad = Cad(variables, combined.polys(), tower)
    return any(cell.holds(combined) for cell in cad.cells())


def closure(X: SemialgebraicSet) -> SemialgebraicSet:
    dnf = X.resolved()
    if dnf.is_false or dnf.is_true:
        return X
    variables = X.variables()

    def truth(cell: CadCell) -> bool:
        if cell.holds(dnf):
            return True
        if cell.dimension == X.ambient:
            return False
        return meets_box(dnf, cell.point, variables)

    result = describe_cells(variables, dnf.polys(), X.ambient, truth, X.base.tower)
    result = _realized(result, variables, X.base.tower)
    return SemialgebraicSet(X.ambient, result, Base(X.base.tower))


def interior(X: SemialgebraicSet) -> SemialgebraicSet:
    dnf = X.resolved()
    if dnf.is_false or dnf.is_true:
        return X
    variables = X.variables()
    outside = dnf_not(dnf)

    def truth(cell: CadCell) -> bool:
        if not cell.holds(dnf):
            return False
        if cell.dimension == X.ambient:
            return True
        return not meets_box(outside, cell.point, variables)

    result = describe_cells(variables, dnf.polys(), X.ambient, truth, X.base.tower)
    result = _realized(result, variables, X.base.tower)
    return SemialgebraicSet(X.ambient, result, Base(X.base.tower))


def project(X: SemialgebraicSet, k: int) -> SemialgebraicSet:
    """The projection onto the first k coordinates."""
    if not 1 <= k <= X.ambient:
        raise PreconditionError(f"projection index {k} outside 1..{X.ambient}")
    if k == X.ambient:
        return X
    dnf = solve(X.variables(), [Quant.EXISTS] * (X.ambient - k), X.resolved(), X.base.tower)
    dnf = _realized(dnf, X.variables()[:k], X.base.tower)
    return SemialgebraicSet(k, dnf, Base(X.base.tower))


def project_family(X: SemialgebraicSet, k: int) -> SemialgebraicSet:
    """Like project, but parameters stay symbolic: they are eliminated over as leading free variables.

    The result holds for every value of the parameters, in particular the bound ones.
    """
    if not X.base.params:
        return project(X, k)
    if not 1 <= k <= X.ambient:
        raise PreconditionError(f"projection index {k} outside 1..{X.ambient}")
    if k == X.ambient:
        return X
    variables = X.param_symbols() + X.variables()
    dnf = solve(variables, [Quant.EXISTS] * (X.ambient - k), X.dnf, X.base.tower)
    return SemialgebraicSet(k, dnf, X.base)


def fiber(X: SemialgebraicSet, a: AlgebraicPoint) -> SemialgebraicSet:
    """{x : (a, x) in X} over the remaining coordinates, renumbered from v0."""
    n = len(a)
    m = X.ambient - n
    if m < 0:
        raise PreconditionError(f"point has {n} coordinates, set lives in {X.ambient}")
    tower = join(X.base.tower, a.tower)
    a = a.lift(tower)
    values = a.substitution([v_symbol(i) for i in range(n)])
    rename = {v_symbol(n + j): v_symbol(j) for j in range(m)}
    remaining = set(rename)
    conjuncts = []
    for conjunct in X.resolved().disjuncts:
        atoms: list[NormAtom] = []
        alive = True
        for atom in conjunct:
            numer, s = homogenize(tower, atom.poly, values)
            if not (numer.free_symbols & remaining):
                if not atom.rel.holds(s * sign_of(tower, numer)):
                    alive = False
                    break
                continue
            if atom.rel is Rel.LT and s < 0:
                numer = sympy.expand(-numer)
            atoms.append(NormAtom(sympy.expand(numer.xreplace(rename)), atom.rel))
        if alive:
            conjuncts.append(tuple(atoms))
    return SemialgebraicSet(m, dnf_from_conjuncts(conjuncts), Base(tower))


def fiber_split(X: SemialgebraicSet) -> tuple[SemialgebraicSet, SemialgebraicSet]:
    """(X(0), X(1)): base points whose fiber in the last coordinate is finite nonempty, resp. infinite."""
    if X.ambient < 1:
        raise PreconditionError("fiber_split needs ambient dimension >= 1")
    n = X.ambient - 1
    tower = X.base.tower
    dnf = X.resolved()
    if dnf.is_false:
        empty = SemialgebraicSet(n, DNF_FALSE, Base(tower))
        return empty, empty
    variables = X.variables()

    def has_interval(cell: CadCell) -> bool:
        return any(c.is_sector(n) and c.holds(dnf) for c in cell.children())

    def has_only_points(cell: CadCell) -> bool:
        kids = cell.children()
        return not has_interval(cell) and any(c.holds(dnf) for c in kids)

    polys = dnf.polys()
    x1 = describe_cells(variables, polys, n, has_interval, tower)
    x0 = describe_cells(variables, polys, n, has_only_points, tower)
    logger.debug("fiber_split: X(1)=%s X(0)=%s", x1.to_text(), x0.to_text())
    return SemialgebraicSet(n, x0, Base(tower)), SemialgebraicSet(n, x1, Base(tower))


def interval_formula(X: SemialgebraicSet) -> Formula:
    """First-order definition of X(1): some a < b with the whole interval (a, b) in the fiber."""
    if X.ambient < 1:
        raise PreconditionError("interval_formula needs ambient dimension >= 1")
    last = v_symbol(X.ambient - 1)
    a, b, y = sympy.symbols("a b y")
    body = map_atoms(
        X.resolved().to_formula(),
        lambda atom: Atom(sympy.sympify(atom.term).xreplace({last: y}), atom.rel),
    )
    inside = Or((Atom(a - y, Rel.GE), Atom(y - b, Rel.GE), body))
    return Quantified(
        Quant.EXISTS,
        (a, b),
        And((Atom(a - b, Rel.LT), Quantified(Quant.FORALL, (y,), inside))),
    )


@dataclass(frozen=True)
class LinePiece:
    """A cell of a one-variable decomposition: a point (section) or an open interval."""

    section: bool
    inside: bool
    sample: TowerElement
    root: RootRef | None = None
    lower: RootRef | None = None
    upper: RootRef | None = None


def line_pieces(X: SemialgebraicSet) -> list[LinePiece]:
    """The sign-invariant pieces of the line for X, left to right."""
    if X.ambient != 1:
        raise PreconditionError("line_pieces needs a subset of the line")
    dnf = X.resolved()
    cad = _cad(X)
    kids = cad.root.children()
    roots = cad.root.roots()
    out: list[LinePiece] = []
    for i, cell in enumerate(kids):
        sample = cell.point.coords[0]
        inside = cell.holds(dnf)
        if i % 2:
            out.append(LinePiece(True, inside, sample, root=roots[i // 2]))
        else:
            lower = roots[i // 2 - 1] if i > 0 else None
            upper = roots[i // 2] if i // 2 < len(roots) else None
            out.append(LinePiece(False, inside, sample, lower=lower, upper=upper))
    return out
