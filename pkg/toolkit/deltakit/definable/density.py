"""The hull of a one-variable differential set.

For a quantifier-free phi(x) with starred set X* in K^n the hull H satisfies
jets(phi) subset H subset X*, and H is a finite union of
  - open pieces of K^n, and
  - graph pieces: over an open base U in K^m the jet v_m is a fixed real root of a
    polynomial P(v_0..v_m) and each higher jet v_{m+l} solves S*v_{m+l} + R_l = 0,
    where S = dP/dv_m and delta^l P(x, dx, ..) = S*d^{m+l}x + R_l.

The construction recurses on e(Y) = min{k : dim(pi_k Y) < k}.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Protocol

import sympy

from toolkit.deltakit.core.budget import checkpoint
from toolkit.deltakit.core.errors import HullRepairError, PreconditionError
from toolkit.deltakit.engine.geometry import interior, is_empty, is_subset, prefix_dims, project, project_family
from toolkit.deltakit.engine.hull import branch_graph, polynomial_hull, root_branches
from toolkit.deltakit.engine.sets import Base, SemialgebraicSet, poly_text
from toolkit.deltakit.formula.ast import Atom, Formula, Rel
from toolkit.deltakit.formula.jets import (
    DiffPolynomial,
    JetVar,
    differentiate_n,
    from_sympy,
    jet_of_symbol,
    partial,
    v_symbol,
)
from toolkit.deltakit.formula.normalize import normalize
from toolkit.deltakit.formula.star import StarForm, formula_windows, star
from toolkit.deltakit.tower.tower import TowerElement, level_index

logger = logging.getLogger("deltakit.hull")

_V_NAME = re.compile(r"^v(\d+)$")


class JetSource(Protocol):
    """Values of the jets of earlier coordinates, to any order."""

    def jet_value(self, jet: JetVar) -> TowerElement: ...


def jet_polynomial(expr: sympy.Expr, indeterminate: int) -> DiffPolynomial:
    """Read v0, v1, ... as the jets of the indeterminate; other jet symbols keep their names."""
    binding: dict[sympy.Symbol, JetVar] = {}
    for sym in expr.free_symbols:
        m = _V_NAME.match(sym.name)
        if m:
            binding[sym] = JetVar(indeterminate, int(m.group(1)))
    return from_sympy(expr, binding)


def _from_diff(p: DiffPolynomial, indeterminate: int) -> sympy.Expr:
    expr = p.to_sympy()
    back = {}
    for sym in expr.free_symbols:
        jv = jet_of_symbol(sym)
        if jv is not None and jv.base == indeterminate:
            back[sym] = v_symbol(jv.order)
    return sympy.expand(expr.xreplace(back))


def derived_relation(poly: sympy.Expr, order: int, ell: int, indeterminate: int) -> sympy.Expr:
    """R_ell with delta^ell Q = S * v_{order+ell} + R_ell, Q being poly read as jets of the indeterminate.

    Parameter jets x{b}_{k} of other indeterminates are differentiated as jets too.
    """
    if ell < 1:
        raise PreconditionError("derived relations start at ell = 1")
    q = jet_polynomial(poly, indeterminate)
    d = differentiate_n(q, ell)
    top = JetVar(indeterminate, order + ell)
    s = partial(d, top)
    rest = d - s * DiffPolynomial.jet(indeterminate, order + ell)
    if top in rest.jets():
        raise HullRepairError(f"differentiated relation is not linear in {top.to_text()}")
    return _from_diff(rest, indeterminate)


@dataclass(frozen=True)
class GraphPiece:
    """Jets over an open base in K^order: v_order is the branch-th root of poly, higher jets follow."""

    order: int
    poly: sympy.Expr
    branch: int
    indeterminate: int
    base: SemialgebraicSet
    piece: SemialgebraicSet

    @property
    def separant(self) -> sympy.Expr:
        return sympy.expand(sympy.diff(self.poly, v_symbol(self.order)))

    def relation(self, ell: int) -> sympy.Expr:
        return derived_relation(self.poly, self.order, ell, self.indeterminate)

    def to_json(self) -> dict:
        extra = self.piece.ambient - self.order - 1
        return {
            "order": self.order,
            "poly": poly_text(self.poly),
            "branch": self.branch,
            "separant": poly_text(self.separant),
            "relations": [poly_text(self.relation(ell)) for ell in range(1, extra + 1)],
            "base": self.base.to_text(),
            "piece": self.piece.to_text(),
        }


@dataclass(frozen=True)
class HullTrace:
    case: str
    ambient: int
    e: int | None = None
    detail: dict = field(default_factory=dict)
    children: tuple["HullTrace", ...] = ()

    def to_json(self) -> dict:
        out: dict = {"case": self.case, "ambient": self.ambient}
        if self.e is not None:
            out["e"] = self.e
        out.update(self.detail)
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out


@dataclass(frozen=True)
class HullResult:
    hull: SemialgebraicSet
    starred: SemialgebraicSet
    indeterminate: int
    open_pieces: tuple[SemialgebraicSet, ...]
    graph_pieces: tuple[GraphPiece, ...]
    trace: HullTrace
    star_form: StarForm | None = None

    @property
    def window(self) -> int:
        return self.starred.ambient

    def to_json(self) -> dict:
        out: dict = {
            "indeterminate": self.indeterminate,
            "window": self.window,
            "hull": self.hull.to_json(),
            "open_pieces": [p.to_text() for p in self.open_pieces],
            "graph_pieces": [p.to_json() for p in self.graph_pieces],
            "trace": self.trace.to_json(),
        }
        if self.star_form is not None:
            out["star"] = self.star_form.to_json()
        return out


def _atom_set(ambient: int, expr: sympy.Expr, rel: Rel, base: Base) -> SemialgebraicSet:
    return SemialgebraicSet(ambient, normalize(Atom(sympy.expand(expr), rel)), base)


class _HullBuilder:
    def __init__(self, ambient: int, indeterminate: int, source: JetSource | None) -> None:
        self.n = ambient
        self.indeterminate = indeterminate
        self.source = source
        self.open_pieces: list[SemialgebraicSet] = []
        self.graph_pieces: list[GraphPiece] = []

    def bind(self, base: Base, exprs: list[sympy.Expr]) -> Base:
        """Base extended by the parameter jets that the expressions mention."""
        known = {s for s, _ in base.params}
        missing: dict[sympy.Symbol, TowerElement] = {}
        for expr in exprs:
            for sym in expr.free_symbols:
                jv = jet_of_symbol(sym)
                if jv is None or sym in known or sym in missing:
                    continue
                if self.source is None:
                    raise PreconditionError(f"no value for parameter jet {jv.to_text()}")
                missing[sym] = self.source.jet_value(jv)
        return base.with_params(missing) if missing else base

    def run(self, Y: SemialgebraicSet, forced: sympy.Expr | None = None) -> HullTrace:
        checkpoint()
        if is_empty(Y):
            return HullTrace("empty", self.n)
        dims = prefix_dims(Y)
        e = next((k for k in range(1, self.n + 1) if dims[k - 1].value < k), self.n + 1)
        logger.debug("hull: e=%d on %s", e, Y.to_text())
        if e == self.n + 1:
            inner = interior(Y)
            self.open_pieces.append(inner)
            child = self.run(Y.difference(inner))
            return HullTrace("interior", self.n, e, {"interior": inner.to_text()}, (child,))
        return self.graph_case(Y, e - 1, forced)

    def graph_case(self, Y: SemialgebraicSet, m: int, forced: sympy.Expr | None) -> HullTrace:
        n = self.n
        w = v_symbol(m)
        children: list[HullTrace] = []
        detail: dict = {"m": m}
        if m >= 1:
            inside = interior(project(Y, m)).cylinder(n)
            outside = Y.difference(inside)
            if not is_empty(outside):
                children.append(self.run(outside))
            Y = Y.intersection(inside)
            detail["open_base"] = inside.to_text()
            if is_empty(Y):
                return HullTrace("graph", n, m + 1, detail, tuple(children))

        if forced is not None and w in forced.free_symbols:
            poly = forced
            detail["forced"] = True
        else:
            poly = polynomial_hull(project_family(Y, m + 1))
        poly, cofactor = self._split_last(poly, w)
        if cofactor != 1:
            degenerate = Y.intersection(_atom_set(n, cofactor, Rel.EQ, Y.base))
            if not is_empty(degenerate):
                children.append(self.run(degenerate))
            Y = Y.intersection(_atom_set(n, cofactor, Rel.NE, Y.base))
        if poly == 1 or is_empty(Y):
            return HullTrace("graph", n, m + 1, detail, tuple(children))
        if any(level_index(s) is not None for s in poly.free_symbols):
            raise HullRepairError(f"hull polynomial {poly_text(poly)} depends on tower generators")
        sep = sympy.expand(sympy.diff(poly, w))
        detail["P"] = poly_text(poly)
        detail["S"] = poly_text(sep)

        critical = Y.intersection(_atom_set(n, sep, Rel.EQ, Y.base))
        if not is_empty(critical):
            children.append(self.run(critical, forced=sep))
        Y = Y.intersection(_atom_set(n, sep, Rel.NE, Y.base))
        if is_empty(Y):
            return HullTrace("graph", n, m + 1, detail, tuple(children))

        relations = [derived_relation(poly, m, ell, self.indeterminate) for ell in range(1, n - m)]
        base = self.bind(Y.base, [poly] + relations)
        Y = SemialgebraicSet(n, Y.dnf, base)
        region = project(Y, m) if m >= 1 else SemialgebraicSet.full(0, Base(base.tower))
        resolved, _ = base.resolve(poly)
        branches_json: list[dict] = []
        for reg in root_branches(resolved, region):
            for branch in reg.branches:
                graph = branch_graph(branch).cylinder(n)
                on_graph = Y.intersection(graph)
                for ell, r in enumerate(relations, start=1):
                    on_graph = on_graph.intersection(
                        _atom_set(n, sep * v_symbol(m + ell) + r, Rel.EQ, base)
                    )
                if is_empty(on_graph):
                    continue
                if m >= 1:
                    open_base = interior(project(on_graph, m))
                else:
                    open_base = SemialgebraicSet.full(0, Base(base.tower))
                piece = on_graph.intersection(open_base.cylinder(n))
                if not is_empty(piece):
                    self.graph_pieces.append(GraphPiece(m, poly, branch.index, self.indeterminate, open_base, piece))
                    branches_json.append(
                        {"count": reg.count, "branch": branch.index, "domain": reg.domain.to_text(), "base": open_base.to_text()}
                    )
                rest = on_graph.difference(piece)
                if not is_empty(rest):
                    children.append(self.run(rest))
        detail["branches"] = branches_json
        detail["relations"] = [poly_text(r) for r in relations]
        return HullTrace("graph", n, m + 1, detail, tuple(children))

    @staticmethod
    def _split_last(poly: sympy.Expr, w: sympy.Symbol) -> tuple[sympy.Expr, sympy.Expr]:
        """(squarefree part involving w, product of the factors free of w)."""
        gens = sorted(poly.free_symbols, key=lambda s: s.name)
        _, factors = sympy.factor_list(sympy.Poly(poly, *gens))
        main, rest = sympy.Integer(1), sympy.Integer(1)
        for f, _ in factors:
            f = f.as_expr()
            if w in f.free_symbols:
                main = main * f
            else:
                rest = rest * f
        return sympy.expand(main), sympy.expand(rest)


def hull_of(X: SemialgebraicSet, indeterminate: int = 1, source: JetSource | None = None) -> HullResult:
    """The hull of a starred set X in K^n whose coordinates are the jets 0..n-1 of one indeterminate.

    X may carry parameter jets of other indeterminates; `source` supplies their higher jets.
    """
    builder = _HullBuilder(X.ambient, indeterminate, source)
    trace = builder.run(X)
    hull = SemialgebraicSet.empty(X.ambient, X.base)
    for piece in builder.open_pieces:
        hull = hull.union(piece)
    for graph in builder.graph_pieces:
        hull = hull.union(graph.piece)
    if not is_subset(hull, X):
        raise HullRepairError("hull escaped the starred set")
    logger.debug(
        "hull: %d open and %d graph pieces over window %d",
        len(builder.open_pieces),
        len(builder.graph_pieces),
        X.ambient,
    )
    return HullResult(hull, X, indeterminate, tuple(builder.open_pieces), tuple(builder.graph_pieces), trace)


def single_indeterminate(phi: Formula) -> int:
    bases = sorted(formula_windows(phi))
    if len(bases) > 1:
        raise PreconditionError(f"expected one free variable, found {len(bases)}")
    return bases[0] if bases else 1


def starred_set(phi: Formula, indeterminate: int | None = None) -> tuple[StarForm, SemialgebraicSet]:
    """star(phi) over a window of at least one jet, as a set."""
    base = indeterminate if indeterminate is not None else single_indeterminate(phi)
    sf = star(phi, {base: 1})
    return sf, SemialgebraicSet.from_formula(sf.ambient, sf.formula)


def build_hull(phi: Formula) -> HullResult:
    base = single_indeterminate(phi)
    sf, X = starred_set(phi, base)
    result = hull_of(X, base)
    return HullResult(
        result.hull, X, base, result.open_pieces, result.graph_pieces, result.trace, star_form=sf
    )
