from __future__ import annotations

from typing import Any

import sympy

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
    term_to_text,
)
from toolkit.deltakit.formula.jets import DiffPolynomial
from toolkit.deltakit.formula.parse import parse_term


def formula_to_json(f: Formula) -> dict[str, Any]:
    if isinstance(f, Atom):
        language = "delta" if isinstance(f.term, DiffPolynomial) else "or"
        return {"kind": "atom", "rel": f.rel.value, "term": term_to_text(f.term), "language": language}
    if isinstance(f, Const):
        return {"kind": "const", "value": f.value}
    if isinstance(f, Not):
        return {"kind": "not", "children": [formula_to_json(f.arg)]}
    if isinstance(f, And):
        return {"kind": "and", "children": [formula_to_json(a) for a in f.args]}
    if isinstance(f, Or):
        return {"kind": "or", "children": [formula_to_json(a) for a in f.args]}
    if isinstance(f, Quantified):
        return {
            "kind": f.quant.name.lower(),
            "variables": [v.name for v in f.variables],
            "children": [formula_to_json(f.body)],
        }
    raise TypeError(f"not a formula: {f!r}")


def formula_from_json(data: dict[str, Any]) -> Formula:
    kind = data.get("kind")
    if kind == "atom":
        rel = Rel(data["rel"])
        if data.get("language", "delta") == "delta":
            return Atom(parse_term(data["term"]), rel)
        return Atom(sympy.expand(sympy.sympify(data["term"].replace("^", "**"))), rel)
    if kind == "const":
        return Const(bool(data["value"]))
    children = [formula_from_json(c) for c in data.get("children", [])]
    if kind == "not":
        return Not(children[0])
    if kind == "and":
        return And(tuple(children))
    if kind == "or":
        return Or(tuple(children))
    if kind in {"exists", "forall"}:
        quant = Quant.EXISTS if kind == "exists" else Quant.FORALL
        return Quantified(quant, tuple(sympy.Symbol(n) for n in data["variables"]), children[0])
    raise ValueError(f"unknown formula node kind: {kind!r}")
