"""Brute-force oracles the suites compare the engine against."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy

from toolkit.deltakit.definable.density import GraphPiece, starred_set
from toolkit.deltakit.dimension.delta import ball_sentence, delta_dim_1
from toolkit.deltakit.engine.geometry import fiber_split, interval_formula
from toolkit.deltakit.engine.qe import decide, eliminate
from toolkit.deltakit.engine.sets import SemialgebraicSet
from toolkit.deltakit.formula.ast import Formula
from toolkit.deltakit.formula.jets import v_symbol
from toolkit.deltakit.tower.point import (
    AlgebraicPoint,
    evaluate,
    isolate_roots,
    sample_above,
    sample_below,
    sample_between,
    sign_at,
)
from toolkit.deltakit.tower.tower import Tower, TowerElement

logger = logging.getLogger("deltakit.suite")


def random_rational(rng: random.Random, bound: int = 3) -> Fraction:
    return Fraction(rng.randint(-4 * bound, 4 * bound), rng.choice([1, 2, 4]))


@dataclass
class OracleResult:
    status: str = "agree"
    checked: int = 0
    mismatches: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        out: dict = {"status": self.status, "checked": self.checked}
        if self.mismatches:
            out["mismatches"] = self.mismatches[:5]
        return out


def fiber_has_interval(X: SemialgebraicSet, base: Sequence[Fraction]) -> bool:
    """Whether the fiber of X over a rational base point contains an open interval.

    Every polynomial of X is specialized at the base point and the roots of their product
    in the last coordinate are isolated; one sample in each open gap is tested for membership.
    """
    n = X.ambient
    w = v_symbol(n - 1)
    swap = {v_symbol(i): sympy.Rational(c.numerator, c.denominator) for i, c in enumerate(base)}
    product = sympy.Integer(1)
    for p in X.resolved().polys():
        q = sympy.expand(sympy.sympify(p).xreplace(swap))
        if w in q.free_symbols:
            product = product * q
    roots = isolate_roots(Tower(), sympy.expand(product), w) if product != 1 else []
    if not roots:
        samples = [(Tower(), TowerElement.rational(Tower(), 0))]
    else:
        samples = [sample_below(roots[0]), sample_above(roots[-1])]
        samples.extend(sample_between(a, b) for a, b in zip(roots, roots[1:]))
    for _, value in samples:
        point = AlgebraicPoint.build([*base, value])
        if X.contains(point):
            return True
    return False


def fiber_split_oracle(X: SemialgebraicSet, samples: int = 25, seed: int = 0) -> OracleResult:
    """Compare the cell-based X(1), and for ambient <= 2 the eliminated interval formula, with sampled fibers."""
    result = OracleResult()
    n = X.ambient
    defined = SemialgebraicSet(n - 1, eliminate(interval_formula(X), X.variables()[:-1])) if n <= 2 else None
    _, x1 = fiber_split(X)
    rng = random.Random(f"fibers:{seed}:{X.to_text()}")
    points = [[random_rational(rng) for _ in range(n - 1)] for _ in range(samples if n > 1 else 1)]
    for base in points:
        truth = fiber_has_interval(X, base)
        point = AlgebraicPoint.build(base)
        by_cells = x1.contains(point)
        by_formula = defined.contains(point) if defined is not None else by_cells
        result.checked += 1
        if truth != by_formula or truth != by_cells:
            result.status = "disagree"
            result.mismatches.append(
                {"base": [str(c) for c in base], "sampled": truth, "formula": by_formula, "cells": by_cells}
            )
    return result


def interior_oracle(phi: Formula, samples: int = 25, seed: int = 0) -> OracleResult:
    """Grid-plus-ball check of the one-variable delta-dimension criterion.

    A rational center whose box lies in the starred set witnesses dimension 1; finding none
    is only conclusive when delta_dim_1 disagrees in the other direction.
    """
    _, X = starred_set(phi)
    claimed = delta_dim_1(phi)
    rng = random.Random(f"interior:{seed}:{X.to_text()}")
    result = OracleResult()
    found = False
    for _ in range(samples):
        center = [random_rational(rng) for _ in range(X.ambient)]
        if not X.contains(AlgebraicPoint.build(center)):
            continue
        result.checked += 1
        if decide(ball_sentence(X, center)):
            found = True
            break
    if found and claimed.value != 1:
        result.status = "disagree"
        result.mismatches.append({"ball": True, "claimed": claimed.to_json()})
    elif not found and claimed.value == 1:
        result.status = "inconclusive"
    return result


def branch_identities(piece: GraphPiece, samples: int = 5, seed: int = 0, attempts: int = 1000) -> OracleResult:
    """At sampled base points: the branch root zeroes P, the separant does not vanish, and the
    jets continued through the derived relations stay inside the piece."""
    result = OracleResult()
    m = piece.order
    w = v_symbol(m)
    extra = piece.piece.ambient - m - 1
    rng = random.Random(f"branch:{seed}:{piece.piece.to_text()}")
    bases: list[list[Fraction]] = []
    for _ in range(attempts if m else 1):
        if len(bases) >= samples:
            break
        base = [random_rational(rng) for _ in range(m)]
        if piece.base.contains(AlgebraicPoint.build(base)):
            bases.append(base)
    for base in bases:
        point = AlgebraicPoint.build(base)
        swap = {v_symbol(i): sympy.Rational(c.numerator, c.denominator) for i, c in enumerate(base)}
        numer = sympy.expand(piece.poly.xreplace(swap))
        roots = isolate_roots(Tower(), numer, w)
        result.checked += 1
        if len(roots) < piece.branch:
            result.status = "disagree"
            result.mismatches.append({"base": [str(c) for c in base], "roots": len(roots)})
            continue
        tower, root = roots[piece.branch - 1].adjoin()
        jets = point.lift(tower).extend(root)
        ok = sign_at(piece.poly, jets) == 0 and sign_at(piece.separant, jets) != 0
        for ell in range(1, extra + 1):
            subst = jets.substitution()
            value = -evaluate(jets.tower, piece.relation(ell), subst) / evaluate(jets.tower, piece.separant, subst)
            jets = jets.extend(value)
        ok = ok and piece.piece.contains(jets)
        if not ok:
            result.status = "disagree"
            result.mismatches.append({"base": [str(c) for c in base]})
    if not bases:
        result.status = "inconclusive"
    return result
