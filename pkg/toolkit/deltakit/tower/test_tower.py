from __future__ import annotations

import random
import unittest
from fractions import Fraction

import sympy

from toolkit.deltakit.core.errors import PreconditionError, TowerDivisionError
from toolkit.deltakit.formula.jets import v_symbol
from toolkit.deltakit.tower.point import (
    AlgebraicPoint,
    W,
    isolate_roots,
    sample_between,
    sign_at,
)
from toolkit.deltakit.tower.signs import root_count, sign_of
from toolkit.deltakit.tower.tower import Tower, TowerElement, level_symbol

V0, V1 = v_symbol(0), v_symbol(1)


def _eps_tower() -> tuple[Tower, TowerElement]:
    return Tower().with_infinitesimal()


class TestFieldOps(unittest.TestCase):
    def test_identity_inverse_and_difference(self) -> None:
        tower, eps = _eps_tower()
        self.assertEqual(eps + 0, eps)
        one = eps * (1 / eps)
        self.assertTrue(one.is_rational())
        self.assertEqual(one.rational_value(), 1)
        self.assertEqual((1 + eps) - 1, eps)

    def test_canonical_form_is_unique(self) -> None:
        tower, eps = _eps_tower()
        a = (eps**2 - 1) / (eps - 1)
        b = eps + 1
        self.assertEqual(a, b)
        c = (2 * eps) / (-4 * eps**2)
        self.assertEqual(c, TowerElement.make(tower, -1, 2 * level_symbol(0)))

    def test_division_by_zero_element(self) -> None:
        tower, eps = _eps_tower()
        with self.assertRaises(TowerDivisionError):
            _ = eps / (eps - eps)
        with self.assertRaises(ZeroDivisionError):
            _ = eps / 0

    def test_field_axioms_on_random_triples(self) -> None:
        tower, eps = _eps_tower()
        tower, om = tower.with_minus_infinite()
        eps = eps.lift(tower)
        rng = random.Random(11)
        atoms = [eps, om, TowerElement.rational(tower, 1)]

        def rand() -> TowerElement:
            out = TowerElement.rational(tower, rng.randint(-3, 3))
            for a in atoms:
                out = out + a * rng.randint(-2, 2) * (a if rng.random() < 0.3 else 1)
            return out

        for _ in range(15):
            a, b, c = rand(), rand(), rand()
            self.assertEqual((a + b) + c, a + (b + c))
            self.assertEqual((a * b) * c, a * (b * c))
            self.assertEqual(a * (b + c), a * b + a * c)
            self.assertEqual(a.sign(), -(-a).sign())
            if a.sign() > 0 and b.sign() > 0:
                self.assertEqual((a * b).sign(), 1)
                self.assertEqual((a + b).sign(), 1)
            if a.compare(b) < 0:
                self.assertLess((a + c).compare(b + c), 0)


class TestSignOracle(unittest.TestCase):
    def test_sympy_numbers(self) -> None:
        for value, expected in [
            (sympy.Integer(-3), -1),
            (sympy.Integer(0), 0),
            (sympy.Rational(2, 5), 1),
            (sympy.Rational(-7, 3), -1),
        ]:
            self.assertEqual(sign_of(Tower(), value), expected)
        tower, _ = _eps_tower()
        self.assertEqual(sign_of(tower, sympy.Rational(1, 3) - level_symbol(0)), 1)
        self.assertEqual(sign_of(tower, level_symbol(0) ** 2 - sympy.Integer(2) * level_symbol(0)), -1)

    def test_infinitesimal_dominance(self) -> None:
        tower, eps = _eps_tower()
        self.assertEqual((eps**2 - eps).sign(), -1)
        for q in (Fraction(1, 10**9), Fraction(3, 7), 5):
            self.assertEqual((TowerElement.rational(tower, q) - eps).sign(), 1)

    def test_minus_infinite_dominance(self) -> None:
        tower, om = Tower().with_minus_infinite()
        self.assertEqual((om + 10**9).sign(), -1)
        self.assertEqual((om**2).sign(), 1)
        self.assertEqual((om**3 + om**2).sign(), -1)

    def test_later_generator_dominates_earlier(self) -> None:
        tower, eps = _eps_tower()
        tower, om = tower.with_minus_infinite()
        self.assertEqual((eps.lift(tower) * om**2 - 1).sign(), 1)
        self.assertEqual((1 / eps.lift(tower) - om).sign(), 1)

    def test_earlier_elements_exceed_minus_infinite(self) -> None:
        tower, eps = _eps_tower()
        tower, om = tower.with_minus_infinite()
        e = -1 / eps.lift(tower) ** 3 - 1000
        self.assertEqual((e - om).sign(), 1)

    def test_trichotomy(self) -> None:
        tower, eps = _eps_tower()
        for e in (eps, -eps, eps - eps, eps**2 - 2 * eps + 1):
            s = e.sign()
            self.assertIn(s, (-1, 0, 1))
            self.assertEqual((-e).sign(), -s)

    def test_root_level_signs(self) -> None:
        roots = isolate_roots(Tower(), W**2 - 2)
        tower, sqrt2 = roots[1].adjoin()
        self.assertEqual((sqrt2**2 - 2).sign(), 0)
        self.assertEqual((sqrt2 - Fraction(141, 100)).sign(), 1)
        self.assertEqual((sqrt2 - Fraction(142, 100)).sign(), -1)
        tower, eps = tower.with_infinitesimal()
        self.assertEqual((sqrt2.lift(tower) - 1 - eps).sign(), 1)

    def test_handle_over_infinitesimal(self) -> None:
        tower, eps = _eps_tower()
        roots = isolate_roots(tower, W**2 - (1 + level_symbol(0)))
        self.assertEqual(len(roots), 2)
        ext, r = roots[1].adjoin()
        self.assertEqual((r - 1).sign(), 1)
        self.assertEqual((r - 1 - eps.lift(ext)).sign(), -1)
        self.assertEqual(sign_of(ext, level_symbol(1) ** 2 - 1 - level_symbol(0)), 0)


class TestIsolateRoots(unittest.TestCase):
    def test_examples(self) -> None:
        tower, _ = _eps_tower()
        self.assertEqual(len(isolate_roots(tower, W**2 - (1 + level_symbol(0)))), 2)
        self.assertEqual(isolate_roots(Tower(), W**2 + 1), [])
        zero = isolate_roots(Tower(), W**3)
        self.assertEqual(len(zero), 1)
        self.assertEqual(zero[0].value.rational_value(), 0)

    def test_count_agrees_with_sturm(self) -> None:
        rng = random.Random(5)
        for _ in range(20):
            coeffs = [rng.randint(-4, 4) for _ in range(4)]
            p = sum(c * W**i for i, c in enumerate(coeffs)) + W**4
            expected = sympy.Poly(p, W).count_roots()
            distinct = sympy.Poly(sympy.sqf_part(p), W).count_roots()
            self.assertLessEqual(distinct, expected)
            self.assertEqual(len(isolate_roots(Tower(), p)), distinct)

    def test_count_over_tower_matches_sturm_count(self) -> None:
        tower, _ = _eps_tower()
        eps = level_symbol(0)
        for p, n in (
            ((W**2 - eps) * (W - 1), 3),
            (W**2 + eps, 0),
            ((W - eps) * (W - 2 * eps), 2),
            (W**4 - eps**2, 2),
        ):
            self.assertEqual(len(isolate_roots(tower, p)), n)
            self.assertEqual(root_count(tower, sympy.sqf_part(sympy.expand(p)), W), n)

    def test_roots_ascend_and_vanish(self) -> None:
        tower, _ = _eps_tower()
        p = sympy.expand((W**2 - 2) * (W - level_symbol(0)) * (W + 3))
        roots = isolate_roots(tower, p)
        self.assertEqual(len(roots), 4)
        points = [AlgebraicPoint.build([r], tower) for r in roots]
        for point in points:
            self.assertEqual(sign_at(p.subs(W, V0), point), 0)
        for a, b in zip(roots, roots[1:]):
            mid_tower, mid = sample_between(a, b)
            s = sign_at(p.subs(W, V0), AlgebraicPoint(mid_tower, (mid,)))
            self.assertNotEqual(s, 0)

    def test_zero_polynomial_rejected(self) -> None:
        with self.assertRaises(PreconditionError):
            isolate_roots(Tower(), sympy.Integer(0))


class TestSignAt(unittest.TestCase):
    def test_examples(self) -> None:
        minus_one = isolate_roots(Tower(), W**2 - 1)[0]
        point = AlgebraicPoint.build([minus_one, 0])
        self.assertEqual(sign_at(V0**2 + V1**2 - 1, point), 0)

        tower, eps = _eps_tower()
        self.assertEqual(sign_at(V0, AlgebraicPoint(tower, (eps,))), 1)

        tower, om = tower.with_minus_infinite()
        point = AlgebraicPoint(tower, (eps.lift(tower), om))
        self.assertEqual(sign_at(V0 * V1 - 1, point), -1)

    def test_fraction_coordinates(self) -> None:
        tower, eps = _eps_tower()
        point = AlgebraicPoint(tower, (1 / (eps - 1),))
        self.assertEqual(sign_at(V0, point), -1)
        self.assertEqual(sign_at(V0 + 1, point), -1)
        self.assertEqual(sign_at(V0**2 - 1, point), 1)

    def test_missing_coordinate(self) -> None:
        with self.assertRaises(PreconditionError):
            sign_at(V0 + V1, AlgebraicPoint.build([1]))


if __name__ == "__main__":
    unittest.main()
