"""Deterministic batteries of differential formulas and polynomials for the type checks."""

from __future__ import annotations

import itertools
import random
from pathlib import Path

from toolkit.deltakit.formula.ast import And, Atom, Formula, Not, Or, Rel
from toolkit.deltakit.formula.jets import DiffPolynomial
from toolkit.deltakit.formula.parse import parse


def _monomials(order: int, degree: int, base: int) -> list[DiffPolynomial]:
    jets = [DiffPolynomial.jet(base, k) for k in range(order + 1)]
    out: list[DiffPolynomial] = []
    for d in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(jets, d):
            term = DiffPolynomial.constant(1)
            for j in combo:
                term = term * j
            out.append(term)
    return out


def _random_poly(rng: random.Random, monomials: list[DiffPolynomial]) -> DiffPolynomial:
    p = DiffPolynomial.constant(rng.randint(-2, 2))
    for m in rng.sample(monomials, k=min(len(monomials), rng.randint(1, 3))):
        p = p + m * rng.choice([-2, -1, 1, 1, 2])
    if p.is_constant():
        p = p + monomials[rng.randrange(len(monomials))]
    return p


def formula_battery(order: int, degree: int, count: int, seed: int = 0, base: int = 1) -> list[Formula]:
    """`count` formulas in the jets of one indeterminate up to `order`, atoms of degree <= `degree`."""
    rng = random.Random(f"battery:{order}:{degree}:{seed}:{base}")
    monomials = _monomials(order, degree, base)
    rels = list(Rel)
    out: list[Formula] = []
    while len(out) < count:
        atom = Atom(_random_poly(rng, monomials), rng.choice(rels))
        roll = rng.random()
        if roll < 0.6:
            out.append(atom)
        elif roll < 0.75:
            out.append(Not(atom))
        else:
            other = Atom(_random_poly(rng, monomials), rng.choice(rels))
            out.append(And((atom, other)) if roll < 0.875 else Or((atom, other)))
    return out


def polynomial_battery(order: int, degree: int, base: int = 1) -> list[DiffPolynomial]:
    """Every monomial of the jets up to `order` with degree <= `degree`, then each jet minus its predecessor."""
    out = _monomials(order, degree, base)
    out.extend(DiffPolynomial.jet(base, k + 1) - DiffPolynomial.jet(base, k) for k in range(order))
    return out


def load_battery(path: str | Path) -> list[Formula]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [parse(text) for text in (raw.split("#", 1)[0].strip() for raw in lines) if text]
