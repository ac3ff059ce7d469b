import random
import unittest
from fractions import Fraction

import sympy

from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.formula.jets import (
    DiffPolynomial,
    JetVar,
    algebraize,
    differentiate,
    order_of,
    separant,
)
from toolkit.deltakit.formula.parse import parse_term


def _random_poly(rng: random.Random, *, bases: int = 2, max_order: int = 2, terms: int = 3) -> DiffPolynomial:
    p = DiffPolynomial.constant(rng.randint(-3, 3))
    for _ in range(terms):
        mono = DiffPolynomial.constant(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        for _ in range(rng.randint(1, 2)):
            mono = mono * DiffPolynomial.jet(rng.randint(1, bases), rng.randint(0, max_order))
        p = p + mono
    return p


class TestOrder(unittest.TestCase):
    def test_examples(self) -> None:
        self.assertEqual(order_of(parse_term("d(d(d(x))) - x*d(x)")), 3)
        self.assertEqual(order_of(parse_term("x^2 + 1")), 0)
        self.assertEqual(order_of(parse_term("d(x)*d(x)")), 1)

    def test_zero_rejected(self) -> None:
        with self.assertRaises(PreconditionError):
            order_of(DiffPolynomial())


class TestAlgebraize(unittest.TestCase):
    def test_renaming(self) -> None:
        v0, v1, v2 = sympy.symbols("v0 v1 v2")
        expr, binding = algebraize(parse_term("d(d(x)) + x^2"))
        self.assertEqual(expr, v2 + v0**2)
        self.assertEqual(binding, {v0: JetVar(1, 0), v2: JetVar(1, 2)})

        expr, _ = algebraize(parse_term("x"))
        self.assertEqual(expr, v0)

        expr, _ = algebraize(parse_term("d(x)^2 - x*d(d(x))"))
        self.assertEqual(expr, v1**2 - v0 * v2)


class TestSeparant(unittest.TestCase):
    def test_examples(self) -> None:
        self.assertEqual(separant(parse_term("d(d(x)) + x^2")), DiffPolynomial.constant(1))
        self.assertEqual(separant(parse_term("d(x)^3 - x")), parse_term("3*d(x)^2"))
        self.assertEqual(separant(parse_term("x^2")), parse_term("2*x"))

    def test_constant_rejected(self) -> None:
        with self.assertRaises(PreconditionError):
            separant(DiffPolynomial.constant(5))


class TestDifferentiate(unittest.TestCase):
    def test_examples(self) -> None:
        self.assertEqual(differentiate(parse_term("x*d(x)")), parse_term("d(x)^2 + x*d(d(x))"))
        self.assertTrue(differentiate(DiffPolynomial.constant(7)).is_zero())
        self.assertEqual(differentiate(parse_term("x^2")), parse_term("2*x*d(x)"))

    def test_derivation_laws(self) -> None:
        rng = random.Random(7)
        for _ in range(40):
            p = _random_poly(rng)
            q = _random_poly(rng)
            self.assertEqual(differentiate(p + q), differentiate(p) + differentiate(q))
            self.assertEqual(differentiate(p * q), differentiate(p) * q + p * differentiate(q))

    def test_order_growth(self) -> None:
        rng = random.Random(11)
        for _ in range(40):
            p = _random_poly(rng, bases=1)
            if p.is_constant():
                continue
            self.assertEqual(order_of(differentiate(p)), order_of(p) + 1)

    def test_sympy_round_trip(self) -> None:
        p = parse_term("1/2*d(x)^2*y - 3*z + 4")
        from toolkit.deltakit.formula.jets import from_sympy

        self.assertEqual(from_sympy(p.to_sympy()), p)


class TestPolyBacking(unittest.TestCase):
    def test_generators_are_used_jets(self) -> None:
        x0, x1, y0 = sympy.symbols("x1_0 x1_1 x2_0")
        p = parse_term("d(x)^2*y - x")
        self.assertIsInstance(p.poly, sympy.Poly)
        self.assertEqual(p.poly.gens, (x0, x1, y0))
        self.assertEqual(p.jets(), {JetVar(1, 0), JetVar(1, 1), JetVar(2, 0)})
        self.assertEqual((p - parse_term("d(x)^2*y")).poly.gens, (x0,))

    def test_cancellation_is_canonical(self) -> None:
        x, dx = DiffPolynomial.jet(1), DiffPolynomial.jet(1, 1)
        self.assertEqual(x * dx - dx * x, DiffPolynomial())
        self.assertEqual(dx**0, DiffPolynomial.constant(1))
        self.assertEqual(hash(x + dx - dx), hash(x))
        self.assertEqual(DiffPolynomial.constant(Fraction(3, 4)).to_text(), "3/4")

    def test_agrees_with_poly_diff(self) -> None:
        x0, x1, x2, x3 = sympy.symbols("x1_0 x1_1 x1_2 x1_3")
        p = parse_term("d(d(x))^3*x - d(x)")
        self.assertEqual(separant(p).to_sympy(), p.to_sympy().diff(x2))
        self.assertEqual(p.poly.degree(x2), 3)
        self.assertEqual(
            sympy.expand(differentiate(p).to_sympy()),
            sympy.expand(p.to_sympy().diff(x0) * x1 + p.to_sympy().diff(x1) * x2 + p.to_sympy().diff(x2) * x3),
        )
        self.assertEqual(differentiate(parse_term("d(x)")).to_text(), "d(d(x))")

    def test_text_order(self) -> None:
        self.assertEqual(parse_term("x - d(x)^2 + 2").to_text(), "-d(x)^2 + x + 2")


if __name__ == "__main__":
    unittest.main()
