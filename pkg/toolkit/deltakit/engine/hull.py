"""Polynomial hulls of thin sets and root-branch functions of a polynomial in its last variable."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import sympy

from toolkit.deltakit.core.errors import HullRepairError, PreconditionError
from toolkit.deltakit.dimension.value import DimensionValue
from toolkit.deltakit.engine.cad import Cad, CadCell
from toolkit.deltakit.engine.geometry import dim, is_empty
from toolkit.deltakit.engine.qe import describe_cells, sign_condition
from toolkit.deltakit.engine.sets import Base, SemialgebraicSet
from toolkit.deltakit.formula.ast import Rel, conj, expr_to_text
from toolkit.deltakit.formula.jets import v_symbol
from toolkit.deltakit.formula.normalize import Dnf, normalize
from toolkit.deltakit.tower.tower import level_index

logger = logging.getLogger("deltakit.hull")


def _has_levels(expr: sympy.Expr) -> bool:
    return any(level_index(s) is not None for s in expr.free_symbols)


def polynomial_hull(Y: SemialgebraicSet) -> sympy.Expr:
    """A nonzero polynomial vanishing on Y: one equation per disjunct, multiplied.

    Parameters stay symbolic. Per disjunct the first equation in the last variable and
    free of tower symbols is preferred.
    """
    d = dim(Y)
    if not d < DimensionValue(Y.ambient):
        raise PreconditionError(f"set has full dimension {d} in ambient {Y.ambient}; no hull exists")
    last = v_symbol(Y.ambient - 1)
    product = sympy.Integer(1)
    for conjunct in Y.dnf.disjuncts:
        eqs = sorted(
            (a.poly for a in conjunct if a.rel is Rel.EQ),
            key=lambda p: (last not in p.free_symbols, _has_levels(p)),
        )
        chosen = next((p for p in eqs if Y.base.resolve(p)[0] != 0), None)
        if chosen is None:
            piece = SemialgebraicSet(Y.ambient, Dnf((conjunct,)), Y.base)
            if is_empty(piece):
                continue
            raise HullRepairError(f"disjunct {piece.to_text()} carries no usable equation")
        product = product * chosen
    product = sympy.expand(product)
    if not vanishes_on(product, Y):
        raise HullRepairError(f"{expr_to_text(product)} does not vanish on the set")
    logger.debug("hull: %s", expr_to_text(product))
    return product


def vanishes_on(poly: sympy.Expr, Y: SemialgebraicSet) -> bool:
    """Decides: every x in Y has poly(x) = 0."""
    dnf = Y.resolved()
    resolved, _ = Y.base.resolve(poly)
    cad = Cad(Y.variables(), dnf.polys() + [resolved], Y.base.tower)
    return all(cell.sign(resolved) == 0 for cell in cad.cells() if cell.holds(dnf))


@dataclass(frozen=True)
class RootBranch:
    """The index-th (1-based, ascending) real root of poly in its last variable over domain."""

    poly: sympy.Expr
    index: int
    domain: SemialgebraicSet

    def to_json(self) -> dict:
        return {"poly": expr_to_text(self.poly), "index": self.index, "domain": self.domain.to_text()}


@dataclass(frozen=True)
class BranchRegion:
    domain: SemialgebraicSet
    count: int
    branches: tuple[RootBranch, ...]

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "count": self.count,
            "branches": [b.to_json() for b in self.branches],
        }


def _root_count(cell: CadCell, poly: sympy.Expr) -> int:
    kids = cell.children()
    signs = [k.sign(poly) for k in kids]
    if all(s == 0 for s in signs):
        raise PreconditionError(f"{expr_to_text(poly)} vanishes identically over a region cell")
    return sum(1 for k, s in zip(kids, signs) if s == 0 and not k.is_sector(cell.depth))


def root_branches(poly: sympy.Expr, region: SemialgebraicSet) -> list[BranchRegion]:
    """Partition `region` into pieces with a constant number of real roots of poly in v_m.

    Each piece is one sign condition on the projection factors, so the roots are
    delineable there and the i-th root is continuous.
    """
    m = region.ambient
    w = v_symbol(m)
    poly = sympy.expand(poly)
    if poly == 0:
        raise PreconditionError("root_branches needs a nonzero polynomial")
    variables = region.variables() + [w]
    dnf = region.resolved()
    tower = region.base.tower
    cad = Cad(variables, dnf.polys() + [poly], tower)
    factors = cad.factors(m)
    groups: dict[tuple[int, tuple[int, ...]], None] = {}
    for cell in cad.cells(m):
        if not cell.holds(dnf):
            continue
        groups[(_root_count(cell, poly), cell.sign_vector(factors))] = None
    out: list[BranchRegion] = []
    for count, vec in sorted(groups, key=lambda g: (g[0], g[1])):
        formula = conj(*(sign_condition(f, frozenset({s})) for f, s in zip(factors, vec)))
        domain = SemialgebraicSet(m, normalize(formula), Base(tower))
        branches = tuple(RootBranch(poly, i, domain) for i in range(1, count + 1))
        out.append(BranchRegion(domain, count, branches))
    logger.debug("root_branches: %s -> %d regions", expr_to_text(poly), len(out))
    return out


def branch_graph(branch: RootBranch) -> SemialgebraicSet:
    """{(z, w) : z in the branch domain, w the index-th real root of poly(z, .)} inside K^(m+1)."""
    domain = branch.domain
    m = domain.ambient
    variables = domain.variables() + [v_symbol(m)]
    dnf = domain.resolved()
    poly = branch.poly
    tower = domain.base.tower

    def truth(cell: CadCell) -> bool:
        j = cell.index[-1]
        if j % 2 == 0 or cell.sign(poly) != 0:
            return False
        parent = cell.cad.cell_at(cell.index[:-1])
        if not parent.holds(dnf):
            return False
        below = sum(1 for k in parent.children()[1:j:2] if k.sign(poly) == 0)
        return below == branch.index - 1

    out = describe_cells(variables, dnf.polys() + [poly], m + 1, truth, tower)
    return SemialgebraicSet(m + 1, out, Base(tower))
