"""Defining schemes d_p x phi(x; y) of presented types, and codes built from them."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import sympy

from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.definable.schemes import DeltaTypeScheme, JetRealizer
from toolkit.deltakit.engine.qe import eliminate
from toolkit.deltakit.formula.ast import (
    And,
    Atom,
    Formula,
    Or,
    Quant,
    Quantified,
    Rel,
    conj,
    map_atoms,
    natural_key,
)
from toolkit.deltakit.formula.normalize import Dnf, normalize
from toolkit.deltakit.formula.star import lift_binding, star
from toolkit.deltakit.tower.point import homogenize
from toolkit.deltakit.tower.tower import Level, LevelKind, level_index

logger = logging.getLogger("deltakit.types")


def _generator(k: int) -> sympy.Symbol:
    return sympy.Symbol(f"g{k}")


def _rename_levels(expr: sympy.Expr) -> sympy.Expr:
    swap = {s: _generator(level_index(s)) for s in expr.free_symbols if level_index(s) is not None}
    return sympy.expand(expr.xreplace(swap)) if swap else expr


def _bind_level(k: int, level: Level, body: Formula) -> Formula:
    """body(g_k) read at the k-th generator, through its first-order definition."""
    g = _generator(k)
    if level.kind is LevelKind.INFINITESIMAL:
        e = sympy.Symbol(f"e{k}")
        small = Quantified(Quant.FORALL, (g,), Or((Atom(g, Rel.LE), Atom(g - e, Rel.GE), body)))
        return Quantified(Quant.EXISTS, (e,), And((Atom(-e, Rel.LT), small)))
    if level.kind is LevelKind.MINUS_INFINITE:
        bound = sympy.Symbol(f"n{k}")
        return Quantified(Quant.EXISTS, (bound,), Quantified(Quant.FORALL, (g,), Or((Atom(g - bound, Rel.GE), body))))
    p = _rename_levels(level.poly)
    below = [sympy.Symbol(f"u{k}_{j}") for j in range(level.index)]
    u = sympy.Symbol(f"u{k}")
    parts: list[Formula] = [Atom(p, Rel.EQ)]
    for j, r in enumerate(below):
        parts.append(Atom(sympy.expand(p.xreplace({g: r})), Rel.EQ))
        upper = below[j + 1] if j + 1 < len(below) else g
        parts.append(Atom(r - upper, Rel.LT))
    others = [Atom(sympy.expand(p.xreplace({g: u})), Rel.NE), Atom(u - g, Rel.GE)]
    others.extend(Atom(u - r, Rel.EQ) for r in below)
    parts.append(Quantified(Quant.FORALL, (u,), Or(tuple(others))))
    parts.append(body)
    return Quantified(Quant.EXISTS, (g, *below), conj(*parts))


def defining_scheme(s: DeltaTypeScheme, template: Formula) -> Formula:
    """theta(y) with decide(s, template(x; b)) = theta(b) for every rational instance b of y.

    The realization is substituted for the jets of x and the tower generators are then
    eliminated from the top down.
    """
    if s.context:
        raise PreconditionError("defining schemes are emitted for schemes without earlier coordinates")
    x = s.indeterminate
    sf = star(template, {x: 1})
    realizer = JetRealizer([s])
    x_jets = {sym: realizer.jet_value(jv) for sym, jv in sf.binding if jv.base == x}
    tower = realizer.tower
    values = {sym: v.lift(tower) for sym, v in x_jets.items()}
    y_binding = {sym: jv for sym, jv in sf.binding if jv.base != x}

    def substitute(atom: Atom) -> Formula:
        numer, sign = homogenize(tower, atom.term, values)
        return Atom(_rename_levels(sympy.expand(sign * numer)), atom.rel)

    body = map_atoms(sf.formula, substitute)
    free = sorted(y_binding, key=natural_key)
    for k in range(len(tower) - 1, -1, -1):
        sentence = _bind_level(k, tower.levels[k], body)
        variables = free + [_generator(j) for j in range(k)]
        body = eliminate(sentence, variables).to_formula()
        logger.debug("defining_scheme: level %d (%s) eliminated", k, tower.levels[k].kind.value)
    return lift_binding(body, y_binding)


@dataclass(frozen=True)
class CodeDescriptor:
    formulas: tuple[Dnf, ...]

    def to_text(self) -> list[str]:
        return [d.to_text() for d in self.formulas]

    def to_json(self) -> list[str]:
        return self.to_text()


def code_of_type(s: DeltaTypeScheme, templates: Sequence[Formula]) -> CodeDescriptor:
    return CodeDescriptor(tuple(normalize(defining_scheme(s, t)) for t in templates))
