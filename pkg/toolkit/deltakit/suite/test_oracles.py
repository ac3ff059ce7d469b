from __future__ import annotations

import unittest
from fractions import Fraction

from toolkit.deltakit.definable.density import build_hull
from toolkit.deltakit.engine.sets import SemialgebraicSet
from toolkit.deltakit.formula.parse import parse
from toolkit.deltakit.suite.oracles import branch_identities, fiber_has_interval, fiber_split_oracle, interior_oracle


def S(ambient: int, text: str) -> SemialgebraicSet:
    return SemialgebraicSet.parse(ambient, text)


class TestFiberOracle(unittest.TestCase):
    def test_sampled_fibers(self) -> None:
        X = S(2, "v1 = 0 | (v0 > 0 & 0 < v1 & v1 < v0)")
        self.assertTrue(fiber_has_interval(X, [Fraction(1)]))
        self.assertFalse(fiber_has_interval(X, [Fraction(-1)]))
        self.assertFalse(fiber_has_interval(S(2, "v0^2 + v1^2 = 1"), [Fraction(0)]))
        self.assertTrue(fiber_has_interval(S(2, "v0^2 + v1^2 < 1"), [Fraction(1, 2)]))

    def test_unconstrained_fiber(self) -> None:
        self.assertTrue(fiber_has_interval(S(2, "v0 > 0"), [Fraction(1)]))
        self.assertFalse(fiber_has_interval(S(2, "v0 > 0"), [Fraction(-1)]))

    def test_engine_agrees(self) -> None:
        for ambient, text in [(2, "v1 = 0 | (v0 > 0 & 0 < v1 & v1 < v0)"), (2, "v1^2 < v0"), (1, "v0^2 = 2")]:
            with self.subTest(text=text):
                result = fiber_split_oracle(S(ambient, text), samples=10)
                self.assertEqual(result.status, "agree", result.to_json())
                self.assertEqual(result.checked, 10 if ambient > 1 else 1)


class TestInteriorOracle(unittest.TestCase):
    def test_open_and_thin(self) -> None:
        self.assertEqual(interior_oracle(parse("d(x) > 0")).status, "agree")
        self.assertEqual(interior_oracle(parse("d(x) = 0")).status, "agree")


class TestBranchIdentities(unittest.TestCase):
    def test_square_law(self) -> None:
        piece = build_hull(parse("d(x) = x^2 & 0 < x & x < 1")).graph_pieces[0]
        result = branch_identities(piece)
        self.assertEqual(result.status, "agree")
        self.assertEqual(result.checked, 5)

    def test_constant_root(self) -> None:
        for piece in build_hull(parse("x = 3 & d(x) = 0")).graph_pieces:
            self.assertEqual(branch_identities(piece).status, "agree")


if __name__ == "__main__":
    unittest.main()
