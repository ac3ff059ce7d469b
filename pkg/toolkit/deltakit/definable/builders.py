"""Constructors of definable CODF types.

codf_type_1 concentrates a type on a one-variable formula: the jets up to the hull's
dimension follow a generic o-minimal type of the projected hull, the rest is forced by
the hull (zero tail past an open piece, algebraic tail on a graph piece).
codf_type_dimdense keeps the full jet window generic and pushes every higher jet to
-inf, so the type has the formula's delta-dimension.
"""

from __future__ import annotations

import logging
from typing import Sequence

import sympy

from toolkit.deltakit.core.errors import HullRepairError, InconsistentInputError, PreconditionError
from toolkit.deltakit.definable.density import hull_of, single_indeterminate, starred_set
from toolkit.deltakit.definable.membership import decide
from toolkit.deltakit.definable.ominimal import ominimal_type_n
from toolkit.deltakit.definable.schemes import AlgebraicTail, DeltaTypeScheme, JetRealizer, TailKind
from toolkit.deltakit.dimension.delta import delta_dim_1
from toolkit.deltakit.engine.geometry import closure, dim, interior, is_empty, project, same_set
from toolkit.deltakit.engine.sets import Base, SemialgebraicSet
from toolkit.deltakit.formula.ast import Atom, Formula, Rel, conj, map_atoms
from toolkit.deltakit.formula.jets import DiffPolynomial, base_name, v_symbol
from toolkit.deltakit.formula.star import formula_windows, star
from toolkit.deltakit.tower.point import AlgebraicPoint

logger = logging.getLogger("deltakit.types")


def _type_over(
    X: SemialgebraicSet,
    indeterminate: int,
    context: tuple[DeltaTypeScheme, ...],
    realizer: JetRealizer,
) -> DeltaTypeScheme:
    """A scheme for one indeterminate whose starred set X may carry jets of earlier ones as parameters."""
    result = hull_of(X, indeterminate, realizer if context else None)
    hull = result.hull
    if is_empty(hull):
        raise InconsistentInputError(f"no jets of {base_name(indeterminate)} satisfy {X.to_text()}")
    n = X.ambient
    ell = dim(hull).value
    kwargs = {
        "indeterminate": indeterminate,
        "window": n,
        "context": context,
        "trace": result.trace,
    }

    if ell == 0 and not context:
        # Finitely many points, all algebraic over Q: constants.
        jet = ominimal_type_n(project(hull, 1))
        scheme = DeltaTypeScheme(TailKind.ZERO, jet=jet, **kwargs)
        logger.debug("type: finite hull, %s", scheme.to_text())
        return scheme

    if ell == 0:
        Y = SemialgebraicSet.full(0, Base(realizer.tower))
    else:
        Y = interior(project(closure(hull), ell))
        Y = SemialgebraicSet(ell, Y.dnf, Y.base.lift(realizer.tower))
    if is_empty(Y):
        raise HullRepairError(f"the first {ell} jets of the hull project onto a set without interior")
    jet = ominimal_type_n(Y)
    context_jets = realizer.known_jets(c.indeterminate for c in context)
    if ell == n:
        return DeltaTypeScheme(TailKind.ZERO, jet=jet, context_jets=context_jets, **kwargs)

    piece = next(
        (g for g in result.graph_pieces if g.order == ell and g.base.contains(jet.realization)),
        None,
    )
    if piece is None:
        raise HullRepairError(f"no graph piece of order {ell} over the generic point of the projected hull")
    tail = AlgebraicTail(ell, piece.poly, piece.branch, indeterminate)
    scheme = DeltaTypeScheme(TailKind.ALGEBRAIC, jet=jet, tail=tail, context_jets=context_jets, **kwargs)
    logger.debug("type: %s", scheme.to_text())
    return scheme


def codf_type_1(phi: Formula) -> DeltaTypeScheme:
    """A definable type of the one-variable formula phi (jets concentrated on its hull)."""
    base = single_indeterminate(phi)
    _, X = starred_set(phi, base)
    if is_empty(X):
        raise InconsistentInputError("the starred set is empty")
    scheme = _type_over(X, base, (), JetRealizer())
    if not decide(scheme, phi):
        raise HullRepairError(f"constructed type does not contain the formula: {scheme.to_text()}")
    return scheme


def codf_type_n(phi: Formula, bases: Sequence[int] | None = None) -> list[DeltaTypeScheme]:
    """One scheme per indeterminate, each built over the realization of the earlier ones."""
    mentioned = set(formula_windows(phi))
    bases = sorted(set(bases) if bases is not None else mentioned) or [1]
    if not mentioned <= set(bases):
        raise PreconditionError(f"formula mentions indeterminates {sorted(mentioned - set(bases))} outside {bases}")
    sf = star(phi, {b: 1 for b in bases})
    X = SemialgebraicSet.from_formula(sf.ambient, sf.formula)
    if is_empty(X):
        raise InconsistentInputError("the starred set is empty")
    windows = sf.windows()
    layout = [jv for _, jv in sf.binding]
    realizer = JetRealizer()
    schemes: list[DeltaTypeScheme] = []
    offset = 0
    for b in bases:
        w = windows[b]
        head = project(X, offset + w)
        params = {jv.symbol(): realizer.jet_value(jv) for jv in layout[:offset]}
        rename = {v_symbol(i): layout[i].symbol() for i in range(offset)}
        rename.update({v_symbol(offset + k): v_symbol(k) for k in range(w)})
        f = map_atoms(head.to_formula(), lambda a: Atom(sympy.expand(a.term.xreplace(rename)), a.rel))
        Xb = SemialgebraicSet.from_formula(w, f, Base(realizer.tower).with_params(params))
        logger.debug("type_n: %s over %d earlier jets: %s", base_name(b), offset, Xb.to_text())
        scheme = _type_over(Xb, b, tuple(schemes), realizer)
        schemes.append(scheme)
        realizer.add(scheme)
        offset += w
    if not decide(schemes, phi):
        raise HullRepairError("constructed types do not jointly contain the formula")
    return schemes


def codf_type_dimdense(phi: Formula) -> DeltaTypeScheme:
    """A definable type of phi with the same delta-dimension as phi."""
    d = delta_dim_1(phi)
    if d.is_minus_infinity:
        raise InconsistentInputError("formula has no solution")
    if d.value == 0:
        return codf_type_1(phi)
    base = single_indeterminate(phi)
    _, X = starred_set(phi, base)
    jet = ominimal_type_n(interior(X))
    scheme = DeltaTypeScheme(TailKind.MINUS_INFINITY, base, X.ambient, jet)
    if not decide(scheme, phi):
        raise HullRepairError(f"constructed type does not contain the formula: {scheme.to_text()}")
    logger.debug("type_dimdense: %s", scheme.to_text())
    return scheme


def sigma_fragment_consistent(
    phi: Formula, q: DiffPolynomial, bounds: Sequence[tuple[int, DiffPolynomial]] = ()
) -> bool:
    """Whether phi & q != 0 & d^k(x) < c_k (for each (k, c_k) in bounds) stars to a nonempty open set."""
    base = single_indeterminate(phi)
    parts: list[Formula] = [phi, Atom(q, Rel.NE)]
    for order, c in bounds:
        parts.append(Atom(DiffPolynomial.jet(base, order) - c, Rel.LT))
    theta = conj(*parts)
    _, X = starred_set(theta, base)
    return not is_empty(X) and same_set(interior(X), X)


def perturb_realization(scheme: DeltaTypeScheme, window: int | None = None) -> AlgebraicPoint:
    """The first `window` jets of the realization with a fresh infinitesimal added to the last one."""
    cuts = len(scheme.jet.cuts)
    if scheme.jet.dimension != cuts:
        raise PreconditionError("perturbation needs a full-dimensional jet descriptor")
    window = cuts if window is None else window
    if not 1 <= window <= cuts:
        raise PreconditionError(f"window {window} outside 1..{cuts}")
    realizer = JetRealizer([scheme])
    values = realizer.jets(scheme.indeterminate, window)
    tower, eps = realizer.tower.with_infinitesimal()
    coords = [v.lift(tower) for v in values]
    coords[-1] = coords[-1] + eps
    return AlgebraicPoint(tower, tuple(coords))
