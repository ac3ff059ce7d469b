"""Membership of quantifier-free differential formulas in a presented type."""

from __future__ import annotations

import logging
from typing import Sequence

from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.definable.schemes import DeltaTypeScheme, JetRealizer
from toolkit.deltakit.formula.ast import Atom, Formula, evaluate
from toolkit.deltakit.formula.star import formula_windows, star
from toolkit.deltakit.tower.point import sign_at

logger = logging.getLogger("deltakit.types")


def _realizer(schemes: DeltaTypeScheme | Sequence[DeltaTypeScheme]) -> JetRealizer:
    if isinstance(schemes, DeltaTypeScheme):
        schemes = [schemes]
    return JetRealizer(schemes)


def holds_at(realizer: JetRealizer, psi: Formula) -> bool:
    """Truth of psi at the realized jets: star psi, extend the jets it needs, sign every atom."""
    known = set(realizer.indeterminates)
    extra = set(formula_windows(psi)) - known
    if extra:
        raise PreconditionError(f"formula mentions indeterminates {sorted(extra)} without a scheme")
    sf = star(psi)
    variables = [sym for sym, _ in sf.binding]
    point = realizer.point(jv for _, jv in sf.binding)

    def atom_value(atom: Atom) -> bool:
        return atom.rel.holds(sign_at(atom.term, point, variables))

    return evaluate(sf.formula, atom_value)


def decide(schemes: DeltaTypeScheme | Sequence[DeltaTypeScheme], psi: Formula) -> bool:
    """Whether psi belongs to the type presented by the scheme (or the chain of schemes)."""
    out = holds_at(_realizer(schemes), psi)
    logger.debug("decide: %s", out)
    return out


def decide_joint(schemes: Sequence[DeltaTypeScheme], formulas: Sequence[Formula]) -> list[bool]:
    """decide for several formulas over one realization, so tail generators are shared."""
    realizer = _realizer(schemes)
    return [holds_at(realizer, psi) for psi in formulas]
