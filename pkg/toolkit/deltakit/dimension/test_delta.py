from __future__ import annotations

import unittest
from fractions import Fraction

from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.definable.builders import codf_type_1, codf_type_dimdense
from toolkit.deltakit.dimension.delta import ball_sentence, delta_dim_1, delta_dim_n, scheme_dim
from toolkit.deltakit.dimension.value import DimensionValue
from toolkit.deltakit.engine.qe import decide
from toolkit.deltakit.engine.sets import SemialgebraicSet
from toolkit.deltakit.formula.jets import DiffPolynomial
from toolkit.deltakit.formula.parse import parse

MINUS_INF = DimensionValue.minus_infinity()


class TestDeltaDim1(unittest.TestCase):
    def test_criterion(self) -> None:
        cases = [
            ("d(x) = 0", DimensionValue(0)),
            ("d(x) > x^2", DimensionValue(1)),
            ("x^2 = -1", MINUS_INF),
            ("x > 0", DimensionValue(1)),
            ("x = 3", DimensionValue(0)),
            ("d(d(x)) = d(x) & x > 0", DimensionValue(0)),
        ]
        for text, expected in cases:
            with self.subTest(text=text):
                self.assertEqual(delta_dim_1(parse(text)), expected)

    def test_thin_star_with_empty_hull(self) -> None:
        # the star {v0 = 3, v1 = 1} is a point, but a constant has derivative 0
        self.assertEqual(delta_dim_1(parse("x = 3 & d(x) = 1")), MINUS_INF)


class TestDeltaDimN(unittest.TestCase):
    def test_extra_free_coordinate(self) -> None:
        self.assertEqual(delta_dim_n(parse("d(x) > 0"), [1, 2]), DimensionValue(2))

    def test_two_constants(self) -> None:
        self.assertEqual(delta_dim_n(parse("d(x) = 0 & d(y) = 0")), DimensionValue(0))

    def test_fixed_first_coordinate(self) -> None:
        self.assertEqual(delta_dim_n(parse("x = 1 & d(y) > 0")), DimensionValue(1))

    def test_empty(self) -> None:
        self.assertEqual(delta_dim_n(parse("x > y & y > x")), MINUS_INF)

    def test_single_base_delegates(self) -> None:
        self.assertEqual(delta_dim_n(parse("d(x) = 0")), delta_dim_1(parse("d(x) = 0")))

    def test_bases_must_cover_formula(self) -> None:
        with self.assertRaises(PreconditionError):
            delta_dim_n(parse("x = y"), [1])


class TestBallSentence(unittest.TestCase):
    def test_centered(self) -> None:
        X = SemialgebraicSet.parse(1, "0 < v0 & v0 < 1")
        self.assertTrue(decide(ball_sentence(X, [Fraction(1, 2)])))
        self.assertFalse(decide(ball_sentence(X, [1])))

    def test_somewhere(self) -> None:
        self.assertTrue(decide(ball_sentence(SemialgebraicSet.parse(1, "0 < v0 & v0 < 1"))))
        self.assertFalse(decide(ball_sentence(SemialgebraicSet.parse(1, "v0 = 0"))))


class TestSchemeDim(unittest.TestCase):
    def test_zero_and_minus_infinity_tails(self) -> None:
        battery = [DiffPolynomial.jet(1, 1), DiffPolynomial.jet(1, 2), DiffPolynomial.jet(1, 2) - DiffPolynomial.jet(1, 1)]
        self.assertEqual(scheme_dim(codf_type_1(parse("d(x) > 0")), battery), DimensionValue(0))
        self.assertEqual(scheme_dim(codf_type_dimdense(parse("d(x) > 0")), battery), DimensionValue(1))

    def test_dimension_of_type_matches_set(self) -> None:
        for text in ["d(x) > 0", "x > 0", "d(x) = 0", "d(x) = x^2 & 0 < x & x < 1"]:
            with self.subTest(text=text):
                phi = parse(text)
                self.assertEqual(scheme_dim(codf_type_dimdense(phi)), delta_dim_1(phi))


if __name__ == "__main__":
    unittest.main()
