"""Cylindrical algebraic decomposition with lazy lifting over an ordered-field tower.

Projection follows Hong's operator: reducta, their leading coefficients, the principal
subresultant coefficients of each reductum with its derivative, and of reducta with
every other polynomial of the same level. Coefficients are read in the base tower, so a
coefficient that vanishes there is dropped before projecting.
"""

from __future__ import annotations

import logging
from typing import Iterable, Iterator, Sequence

import sympy

from toolkit.deltakit.core.budget import checkpoint, current_budget
from toolkit.deltakit.formula.normalize import Conjunct, Dnf, canonical_poly
from toolkit.deltakit.tower.point import (
    AlgebraicPoint,
    RootRef,
    homogenize,
    isolate_roots,
    sample_above,
    sample_below,
    sample_between,
    sign_at,
)
from toolkit.deltakit.tower.signs import sign_of, trim
from toolkit.deltakit.tower.tower import Tower, TowerElement

logger = logging.getLogger("deltakit.cad")


def trim_coefficients(tower: Tower, expr: sympy.Expr, variables: Sequence[sympy.Symbol]) -> sympy.Expr:
    """Drop the monomials (in `variables`) whose coefficient is zero in the tower."""
    expr = sympy.expand(expr)
    if not tower.levels or expr == 0:
        return expr
    used = [v for v in variables if v in expr.free_symbols]
    if not used:
        return expr if sign_of(tower, expr) != 0 else sympy.Integer(0)
    poly = sympy.Poly(expr, *used)
    kept = sympy.Integer(0)
    for monom, coeff in poly.terms():
        if sign_of(tower, coeff) == 0:
            continue
        term = coeff
        for v, e in zip(used, monom):
            term = term * v**e
        kept = kept + term
    return sympy.expand(kept)


def main_level(expr: sympy.Expr, variables: Sequence[sympy.Symbol]) -> int:
    """Index of the highest variable in expr, -1 if it uses none."""
    free = expr.free_symbols
    for k in range(len(variables) - 1, -1, -1):
        if variables[k] in free:
            return k
    return -1


def factor_set(
    polys: Iterable[sympy.Expr], variables: Sequence[sympy.Symbol], tower: Tower
) -> list[sympy.Expr]:
    """Irreducible factors (over Q) that involve at least one variable, canonical and deduplicated."""
    seen: dict[str, sympy.Expr] = {}
    for p in polys:
        p = trim_coefficients(tower, p, variables)
        if p == 0 or main_level(p, variables) < 0:
            continue
        _, factors = sympy.factor_list(p)
        for f, _ in factors:
            f = f.as_expr() if isinstance(f, sympy.Poly) else f
            if main_level(f, variables) < 0:
                continue
            _, g = canonical_poly(f, positive_lc=True)
            seen.setdefault(str(g), g)
    return [seen[k] for k in sorted(seen, key=lambda k: (len(k), k))]


def psc(f: sympy.Expr, g: sympy.Expr, x: sympy.Symbol, j: int) -> sympy.Expr:
    """j-th principal subresultant coefficient of f and g in x."""
    fp, gp = sympy.Poly(f, x), sympy.Poly(g, x)
    m, n = fp.degree(), gp.degree()
    a, b = fp.all_coeffs(), gp.all_coeffs()
    width = m + n - j
    rows: list[list[sympy.Expr]] = []
    for i in range(n - j):
        row = [sympy.Integer(0)] * width
        for c, coeff in enumerate(a):
            row[i + c] = coeff
        rows.append(row)
    for i in range(m - j):
        row = [sympy.Integer(0)] * width
        for c, coeff in enumerate(b):
            row[i + c] = coeff
        rows.append(row)
    size = m + n - 2 * j
    if size == 0:
        return sympy.Integer(1)
    matrix = sympy.Matrix([r[:size] for r in rows])
    return sympy.expand(matrix.det(method="berkowitz"))


def reducta(f: sympy.Expr, x: sympy.Symbol, variables: Sequence[sympy.Symbol], tower: Tower) -> list[sympy.Expr]:
    """f, red(f), red²(f), ... until the leading coefficient is a nonzero constant."""
    out: list[sympy.Expr] = []
    r = sympy.expand(f)
    while r != 0 and x in r.free_symbols:
        out.append(r)
        poly = sympy.Poly(r, x)
        lc = poly.LC()
        if main_level(lc, variables) < 0 and (not tower.levels or sign_of(tower, lc) != 0):
            break
        r = sympy.expand(r - lc * x ** poly.degree())
        r = trim_coefficients(tower, r, variables)
    return out


def projection(
    polys: Sequence[sympy.Expr], x: sympy.Symbol, variables: Sequence[sympy.Symbol], tower: Tower
) -> list[sympy.Expr]:
    out: list[sympy.Expr] = []
    reds = [reducta(f, x, variables, tower) for f in polys]
    for rs in reds:
        for r in rs:
            out.append(sympy.Poly(r, x).LC())
            d = sympy.degree(r, x)
            dr = sympy.diff(r, x)
            for j in range(d - 1):
                out.append(psc(r, dr, x, j))
    for i, rs in enumerate(reds):
        for g in polys[i + 1 :]:
            dg = sympy.degree(g, x)
            for r in rs:
                for j in range(min(sympy.degree(r, x), dg)):
                    checkpoint()
                    out.append(psc(r, g, x, j))
    return out


class CadCell:
    """A cell over the first `depth` variables with its sample point.

    `index[k]` is even for a sector and odd for a section at level k.
    """

    __slots__ = ("cad", "index", "point", "_children", "_roots", "_signs")

    def __init__(self, cad: "Cad", index: tuple[int, ...], point: AlgebraicPoint) -> None:
        self.cad = cad
        self.index = index
        self.point = point
        self._children: list[CadCell] | None = None
        self._roots: list[RootRef] = []
        self._signs: dict[str, int] = {}

    @property
    def depth(self) -> int:
        return len(self.index)

    @property
    def dimension(self) -> int:
        return sum(1 for i in self.index if i % 2 == 0)

    def is_sector(self, level: int) -> bool:
        return self.index[level] % 2 == 0

    def sign(self, poly: sympy.Expr) -> int:
        key = str(poly)
        s = self._signs.get(key)
        if s is None:
            s = sign_at(poly, self.point, self.cad.variables[: self.depth])
            self._signs[key] = s
        return s

    def sign_vector(self, polys: Sequence[sympy.Expr]) -> tuple[int, ...]:
        return tuple(self.sign(p) for p in polys)

    def satisfies(self, conjunct: Conjunct) -> bool:
        return all(a.rel.holds(self.sign(a.poly)) for a in conjunct)

    def holds(self, dnf: Dnf) -> bool:
        return any(self.satisfies(c) for c in dnf.disjuncts)

    def children(self) -> list["CadCell"]:
        if self._children is None:
            self._children = self._lift()
        return self._children

    def roots(self) -> list[RootRef]:
        """Ascending roots bounding the children; section child 2j+1 lies on roots()[j]."""
        self.children()
        return self._roots

    def _lift(self) -> list["CadCell"]:
        checkpoint()
        k = self.depth
        cad = self.cad
        x = cad.variables[k]
        tower = self.point.tower
        values = self.point.substitution(cad.variables[:k])
        product = sympy.Integer(1)
        for f in cad.levels[k]:
            g, _ = homogenize(tower, f, values)
            g = trim(tower, g, x)
            if g == 0 or x not in g.free_symbols:
                continue
            product = product * g
        roots: list[RootRef] = []
        if product != 1:
            roots = isolate_roots(tower, sympy.expand(product), x)
        self._roots = roots
        samples: list[tuple[Tower, TowerElement]] = []
        if not roots:
            samples.append((tower, TowerElement.rational(tower, 0)))
        else:
            samples.append(sample_below(roots[0]))
            for i, r in enumerate(roots):
                samples.append(r.adjoin())
                if i + 1 < len(roots):
                    samples.append(sample_between(r, roots[i + 1]))
                else:
                    samples.append(sample_above(r))
        return [CadCell(cad, self.index + (i,), self.point.extend(value)) for i, (_, value) in enumerate(samples)]

    def __repr__(self) -> str:
        return f"CadCell{self.index}"


class Cad:
    """A sign-invariant decomposition of R^r for a family of polynomials.

    The polynomials may use the base tower's level symbols as coefficients.
    """

    def __init__(
        self,
        variables: Sequence[sympy.Symbol],
        polys: Iterable[sympy.Expr],
        tower: Tower | None = None,
    ) -> None:
        budget = current_budget()
        self.variables = tuple(variables)
        self.tower = tower or Tower()
        budget.check_vars(len(self.variables))
        polys = [sympy.expand(p) for p in polys]
        budget.check_polys([p.subs({s: 1 for s in p.free_symbols - set(self.variables)}) for p in polys])
        self.levels = self._project(polys)
        self.root = CadCell(self, (), AlgebraicPoint(self.tower, ()))
        logger.debug(
            "cad: vars=%d factors_per_level=%s tower=%d",
            len(self.variables),
            [len(level) for level in self.levels],
            len(self.tower),
        )

    def _project(self, polys: list[sympy.Expr]) -> list[list[sympy.Expr]]:
        r = len(self.variables)
        levels: list[list[sympy.Expr]] = [[] for _ in range(r)]
        current = factor_set(polys, self.variables, self.tower)
        for k in range(r - 1, -1, -1):
            checkpoint()
            mine = [f for f in current if main_level(f, self.variables) == k]
            rest = [f for f in current if main_level(f, self.variables) < k]
            levels[k] = mine
            if k == 0:
                break
            projected = projection(mine, self.variables[k], self.variables, self.tower)
            current = factor_set(rest + projected, self.variables, self.tower)
        return levels

    def factors(self, upto: int | None = None) -> list[sympy.Expr]:
        upto = len(self.variables) if upto is None else upto
        return [f for level in self.levels[:upto] for f in level]

    def cells(self, depth: int | None = None) -> Iterator[CadCell]:
        """Cells at the given depth (all variables by default), left to right."""
        depth = len(self.variables) if depth is None else depth
        stack = [self.root]
        while stack:
            cell = stack.pop()
            if cell.depth == depth:
                yield cell
                continue
            stack.extend(reversed(cell.children()))

    def cell_at(self, index: Sequence[int]) -> CadCell:
        cell = self.root
        for i in index:
            cell = cell.children()[i]
        return cell

    def __repr__(self) -> str:
        return f"Cad(vars={[v.name for v in self.variables]}, levels={[len(level) for level in self.levels]})"

