"""The star functor and its inverse on jet blocks."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

import sympy

from toolkit.deltakit.core.budget import current_budget
from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.formula.ast import (
    Atom,
    Formula,
    free_symbols,
    is_quantifier_free,
    iter_atoms,
    map_atoms,
    to_text,
)
from toolkit.deltakit.formula.jets import (
    DiffPolynomial,
    JetVar,
    from_sympy,
    jet_layout,
    v_symbol,
    windows_of,
)

_V_NAME = re.compile(r"^v(\d+)$")


@dataclass(frozen=True)
class StarForm:
    formula: Formula
    binding: tuple[tuple[sympy.Symbol, JetVar], ...]

    @property
    def ambient(self) -> int:
        return len(self.binding)

    def binding_map(self) -> dict[sympy.Symbol, JetVar]:
        return dict(self.binding)

    def windows(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for _, jv in self.binding:
            out[jv.base] = max(out.get(jv.base, 0), jv.order + 1)
        return out

    def to_json(self) -> dict:
        return {
            "formula": to_text(self.formula),
            "binding": {sym.name: jv.to_text() for sym, jv in self.binding},
        }


def formula_windows(f: Formula) -> dict[int, int]:
    windows: dict[int, int] = {}
    for atom in iter_atoms(f):
        if not isinstance(atom.term, DiffPolynomial):
            raise PreconditionError("star expects an L_delta formula")
        for base, w in windows_of(atom.term).items():
            windows[base] = max(windows.get(base, 0), w)
    return windows


def star(f: Formula, windows: Mapping[int, int] | None = None) -> StarForm:
    """Atom-wise algebraization over one shared binding.

    `windows` can widen the per-indeterminate jet windows (for indeterminates that must be
    present even when the formula does not mention them).
    """
    if not is_quantifier_free(f):
        raise PreconditionError("star expects a quantifier-free formula")
    merged = formula_windows(f)
    for base, w in (windows or {}).items():
        merged[base] = max(merged.get(base, 0), w)
    layout = jet_layout(merged)
    substitution = {jv.symbol(): v_symbol(i) for i, jv in enumerate(layout)}

    def convert(atom: Atom) -> Formula:
        expr = atom.term.to_sympy() if isinstance(atom.term, DiffPolynomial) else atom.term
        return Atom(sympy.expand(expr.xreplace(substitution)), atom.rel)

    binding = tuple((v_symbol(i), jv) for i, jv in enumerate(layout))
    return StarForm(map_atoms(f, convert), binding)


def lift_binding(psi: Formula, binding: Mapping[sympy.Symbol, JetVar]) -> Formula:
    """Replace each bound variable of a quantifier-free L_or formula by its jet."""
    if not is_quantifier_free(psi):
        raise PreconditionError("lift expects a quantifier-free formula")
    missing = [s.name for s in free_symbols(psi) if s not in binding]
    if missing:
        raise PreconditionError(f"no jet bound to {', '.join(sorted(missing))}")

    def convert(atom: Atom) -> Formula:
        return Atom(from_sympy(atom.term, binding), atom.rel)

    return map_atoms(psi, convert)


def block_binding(count: int, ell: int) -> dict[sympy.Symbol, JetVar]:
    width = ell + 1
    return {v_symbol(i): JetVar(i // width + 1, i % width) for i in range(count)}


def lift_scheme(psi: Formula, ell: int) -> Formula:
    """Read v0, v1, ... as m consecutive blocks of jets of length ell + 1."""
    if ell < 0:
        raise PreconditionError("ell must be >= 0")
    indices = []
    for sym in free_symbols(psi):
        m = _V_NAME.match(sym.name)
        if not m:
            raise PreconditionError(f"variable {sym.name} is not of the form v<i>")
        indices.append(int(m.group(1)))
    count = max(indices) + 1 if indices else 0
    if count % (ell + 1):
        raise PreconditionError(f"block-size mismatch: {count} variables do not split into blocks of {ell + 1}")
    return lift_binding(psi, block_binding(count, ell))


def admit(f: Formula) -> None:
    """Check an input formula against the active budget: jet orders and atom degrees."""
    budget = current_budget()
    polys: list[sympy.Expr] = []
    for atom in iter_atoms(f):
        if isinstance(atom.term, DiffPolynomial):
            for w in windows_of(atom.term).values():
                budget.check_jet_order(w - 1)
            polys.append(atom.term.to_sympy())
        else:
            polys.append(atom.term)
    budget.check_polys(polys)
