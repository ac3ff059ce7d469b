"""Exact sign oracle for polynomials over a tower, plus the univariate machinery behind it.

Infinitesimal levels are decided by the lowest nonvanishing coefficient, negative-infinite
levels by the highest one (sign flipped by the degree parity). Root levels use Tarski
queries on signed pseudo-remainder sequences and Thom encodings to tell the roots apart.
"""

from __future__ import annotations

import logging
from functools import cmp_to_key

import sympy

from toolkit.deltakit.core.budget import checkpoint
from toolkit.deltakit.core.cache import get_cache
from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.tower.realalg import RealAlgNumber
from toolkit.deltakit.tower.tower import Level, LevelKind, Tower, level_index, level_symbol

logger = logging.getLogger("deltakit.tower")


def _sgn(value: sympy.Expr) -> int:
    return int(sympy.sign(value))


def sign_of(tower: Tower, expr: sympy.Expr) -> int:
    """Sign of a polynomial in the level symbols of `tower` at the tower's realization."""
    expr = sympy.expand(expr)
    if expr.is_Number:
        return _sgn(expr)
    return get_cache().get_or_compute("sign", (tower, expr), lambda: _sign(tower, expr))


def _top_level(expr: sympy.Expr) -> int:
    top = -1
    for sym in expr.free_symbols:
        idx = level_index(sym)
        if idx is None:
            raise ValueError(f"symbol {sym} is not a tower level")
        top = max(top, idx)
    return top


def _sign(tower: Tower, expr: sympy.Expr) -> int:
    checkpoint()
    k = _top_level(expr)
    if k >= len(tower):
        raise PreconditionError(f"expression uses level t{k} but the tower has {len(tower)} levels")
    level = tower.levels[k]
    sub = tower.prefix(k)
    t = level_symbol(k)
    coeffs = sympy.Poly(expr, t).all_coeffs()
    if level.kind is LevelKind.INFINITESIMAL:
        for c in reversed(coeffs):
            s = sign_of(sub, c)
            if s:
                return s
        return 0
    if level.kind is LevelKind.MINUS_INFINITE:
        degree = len(coeffs) - 1
        for i, c in enumerate(coeffs):
            s = sign_of(sub, c)
            if s:
                return s if (degree - i) % 2 == 0 else -s
        return 0
    return root_sign(sub, level, t, expr)


# univariate polynomials over a tower, as expressions in one variable


def trim(tower: Tower, expr: sympy.Expr, x: sympy.Symbol) -> sympy.Expr:
    """Drop leading coefficients (in x) that vanish in the tower."""
    expr = sympy.expand(expr)
    while expr != 0:
        poly = sympy.Poly(expr, x)
        lc = poly.LC()
        if sign_of(tower, lc) != 0:
            return expr
        expr = sympy.expand(expr - lc * x ** poly.degree())
    return expr


def degree(expr: sympy.Expr, x: sympy.Symbol) -> int:
    if expr == 0:
        return -1
    return sympy.Poly(expr, x).degree()


def leading_coeff(expr: sympy.Expr, x: sympy.Symbol) -> sympy.Expr:
    return sympy.Poly(expr, x).LC()


def _primitive(tower: Tower, expr: sympy.Expr, x: sympy.Symbol) -> sympy.Expr:
    """Divide out the x-content, keeping the sign of every value."""
    if expr.free_symbols <= {x}:
        return sympy.expand(expr / abs(leading_coeff(expr, x)))
    content: sympy.Expr | None = None
    for c in sympy.Poly(expr, x).all_coeffs():
        if c != 0:
            content = c if content is None else sympy.gcd(content, c)
    if content is None:
        return expr
    if content.is_Number:
        return sympy.expand(expr / abs(content))
    s = sign_of(tower, content)
    if s == 0:
        return expr
    return sympy.expand(sympy.cancel(expr / content) * s)


def prem_even(tower: Tower, a: sympy.Expr, b: sympy.Expr, x: sympy.Symbol) -> sympy.Expr:
    """lc(b)^e * a mod b with e even, so the remainder has the sign of a at roots of b."""
    da, db = degree(a, x), degree(b, x)
    if da < db:
        return a
    r = sympy.prem(a, b, x)
    if (da - db + 1) % 2:
        r = r * leading_coeff(b, x)
    r = trim(tower, r, x)
    if r == 0:
        return r
    return _primitive(tower, r, x)


def _var(signs: list[int]) -> int:
    nonzero = [s for s in signs if s]
    return sum(1 for u, v in zip(nonzero, nonzero[1:]) if u != v)


def taq(tower: Tower, p: sympy.Expr, q: sympy.Expr, x: sympy.Symbol) -> int:
    """Tarski query: the sum of sign(q) over the distinct real roots of p."""
    key = (tower, sympy.expand(p), sympy.expand(q), x)
    return get_cache().get_or_compute("taq", key, lambda: _taq(tower, key[1], key[2], x))


def _taq(tower: Tower, p: sympy.Expr, q: sympy.Expr, x: sympy.Symbol) -> int:
    p = trim(tower, p, x)
    if degree(p, x) <= 0:
        if p == 0:
            raise PreconditionError("Tarski query on the zero polynomial")
        return 0
    seq = [p]
    nxt = prem_even(tower, trim(tower, sympy.diff(p, x) * q, x), p, x)
    while nxt != 0:
        checkpoint()
        seq.append(nxt)
        nxt = prem_even(tower, seq[-2], seq[-1], x)
        nxt = sympy.expand(-nxt)
    plus = [sign_of(tower, leading_coeff(s, x)) for s in seq]
    minus = [s if degree(p_, x) % 2 == 0 else -s for s, p_ in zip(plus, seq)]
    return _var(minus) - _var(plus)


def root_count(tower: Tower, p: sympy.Expr, x: sympy.Symbol) -> int:
    return taq(tower, p, sympy.Integer(1), x)


def sign_conditions(
    tower: Tower, p: sympy.Expr, qs: list[sympy.Expr], x: sympy.Symbol
) -> list[tuple[tuple[int, ...], int]]:
    """Realizable sign vectors of qs at the real roots of p, with multiplicities.

    Incremental sign determination: one Tarski query per adapted exponent vector and a
    linear solve against the sign matrix.
    """
    n = root_count(tower, p, x)
    if n == 0:
        return []
    reduced = [prem_even(tower, trim(tower, q, x), p, x) for q in qs]
    signs: list[tuple[int, ...]] = [()]
    counts: list[int] = [n]
    adapted: list[tuple[int, ...]] = [()]
    for j, q in enumerate(reduced):
        checkpoint()
        t1 = taq(tower, p, q, x)
        t2 = taq(tower, p, prem_even(tower, q * q, p, x), x)
        single = [
            (s, c)
            for s, c in ((0, n - t2), (1, (t2 + t1) // 2), (-1, (t2 - t1) // 2))
            if c > 0
        ]
        new_signs = [sig + (s,) for sig in signs for s, _ in single]
        new_adapted = [alpha + (e,) for alpha in adapted for e in range(len(single))]
        matrix = sympy.Matrix(
            [[_monomial_sign(sig, alpha) for sig in new_signs] for alpha in new_adapted]
        )
        rhs = sympy.Matrix([taq(tower, p, _power_product(tower, reduced[: j + 1], alpha, p, x), x) for alpha in new_adapted])
        solution = matrix.LUsolve(rhs)
        keep = [i for i in range(len(new_signs)) if solution[i] != 0]
        signs = [new_signs[i] for i in keep]
        counts = [int(solution[i]) for i in keep]
        adapted = _independent_rows(matrix[:, keep], new_adapted)
    return list(zip(signs, counts))


def _monomial_sign(sig: tuple[int, ...], alpha: tuple[int, ...]) -> int:
    out = 1
    for s, e in zip(sig, alpha):
        out *= s**e
    return out


def _power_product(
    tower: Tower, qs: list[sympy.Expr], alpha: tuple[int, ...], p: sympy.Expr, x: sympy.Symbol
) -> sympy.Expr:
    out: sympy.Expr = sympy.Integer(1)
    for q, e in zip(qs, alpha):
        for _ in range(e):
            out = prem_even(tower, sympy.expand(out * q), p, x)
    return out


def _independent_rows(matrix: sympy.Matrix, labels: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    chosen: list[int] = []
    rank = 0
    for i in range(matrix.rows):
        trial = matrix.extract(chosen + [i], list(range(matrix.cols)))
        r = trial.rank()
        if r > rank:
            chosen.append(i)
            rank = r
        if rank == matrix.cols:
            break
    return [labels[i] for i in chosen]


# Thom encodings


def thom_encodings(tower: Tower, p: sympy.Expr, x: sympy.Symbol) -> list[tuple[int, ...]]:
    """Signs of p', p'', ..., p^(d-1) at each distinct real root of p, roots ascending."""
    p = trim(tower, p, x)
    key = (tower, p, x)
    return get_cache().get_or_compute("thom", key, lambda: _thom_encodings(tower, p, x))


def _thom_encodings(tower: Tower, p: sympy.Expr, x: sympy.Symbol) -> list[tuple[int, ...]]:
    d = degree(p, x)
    derivs = [sympy.diff(p, x, k) for k in range(1, d)]
    conds = sign_conditions(tower, p, derivs, x)
    logger.debug("thom encodings: degree=%d roots=%d", d, len(conds))
    lc_sign = sign_of(tower, leading_coeff(p, x))
    encodings = [sig for sig, _ in conds]
    return sorted(encodings, key=cmp_to_key(lambda a, b: compare_thom(a, b, lc_sign)))


def compare_thom(a: tuple[int, ...], b: tuple[int, ...], lc_sign: int) -> int:
    """Order of two roots from their Thom encodings (entry k-1 is the sign of p^(k))."""
    if a == b:
        return 0
    full_a = a + (lc_sign,)
    full_b = b + (lc_sign,)
    for k in range(len(a) - 1, -1, -1):
        if full_a[k] != full_b[k]:
            above = full_a[k + 1]
            if above > 0:
                return 1 if full_a[k] > full_b[k] else -1
            return 1 if full_a[k] < full_b[k] else -1
    return 0


def root_sign(tower: Tower, level: Level, t: sympy.Symbol, q: sympy.Expr) -> int:
    """Sign of q(t) at the handle `level` over `tower` (t is the handle's symbol)."""
    assert level.poly is not None
    d_poly = trim(tower, level.poly, t)
    d = degree(d_poly, t)
    if d <= 0:
        raise PreconditionError(f"root level polynomial {level.poly} has no roots in the tower")
    q = prem_even(tower, trim(tower, q, t), d_poly, t)
    if q == 0:
        return 0
    if degree(q, t) == 0:
        return sign_of(tower, q)
    if d == 1:
        c1, c0 = sympy.Poly(d_poly, t).all_coeffs()
        e = degree(q, t)
        coeffs = sympy.Poly(q, t).all_coeffs()
        hom = sum(c * (-c0) ** (e - i) * c1**i for i, c in enumerate(coeffs))
        s = sign_of(tower, hom)
        return s * sign_of(tower, c1) ** e
    if not (d_poly.free_symbols | q.free_symbols) - {t}:
        root = _rational_root(d_poly, t, level.index)
        return root.sign_of(q.subs(t, sympy.Symbol("w_alg")))
    encodings = thom_encodings(tower, d_poly, t)
    if level.index >= len(encodings):
        raise PreconditionError(f"root index {level.index} out of range for {level.poly}")
    target = encodings[level.index]
    derivs = [sympy.diff(d_poly, t, k) for k in range(1, d)]
    for sig, _ in sign_conditions(tower, d_poly, derivs + [q], t):
        if sig[:-1] == target:
            return sig[-1]
    raise PreconditionError("sign determination lost the root's Thom encoding")


def _rational_root(p: sympy.Expr, t: sympy.Symbol, index: int) -> RealAlgNumber:
    def compute() -> RealAlgNumber:
        roots = RealAlgNumber.roots_of(sympy.Poly(p, t))
        if index >= len(roots):
            raise PreconditionError(f"root index {index} out of range for {p}")
        return roots[index]

    return get_cache().get_or_compute("realroot", (sympy.expand(p), index), compute)

