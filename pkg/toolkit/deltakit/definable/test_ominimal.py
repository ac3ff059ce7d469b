from __future__ import annotations

import unittest
from fractions import Fraction

from toolkit.deltakit.core.errors import InconsistentInputError, PreconditionError
from toolkit.deltakit.definable.ominimal import CutKind, OMinimalCut, ominimal_type_1, ominimal_type_n
from toolkit.deltakit.engine.sets import SemialgebraicSet
from toolkit.deltakit.tower.tower import LevelKind, Tower


def S(ambient: int, text: str) -> SemialgebraicSet:
    return SemialgebraicSet.parse(ambient, text)


class TestLineTypes(unittest.TestCase):
    def test_finite_set_takes_its_minimum(self) -> None:
        cut = ominimal_type_1(S(1, "(v0 + 1)*(v0 - 3)*(v0 - 7) = 0"))
        self.assertIs(cut.kind, CutKind.POINT)
        self.assertEqual(cut.endpoint.rational_value(), Fraction(-1))
        self.assertEqual(cut.contribution, 0)

    def test_leftmost_interval_wins_over_later_points(self) -> None:
        cut = ominimal_type_1(S(1, "(0 < v0 & v0 < 1) | v0 = 2"))
        self.assertIs(cut.kind, CutKind.RIGHT_OF)
        self.assertEqual(cut.endpoint.rational_value(), Fraction(0))

    def test_unbounded_below(self) -> None:
        cut = ominimal_type_1(S(1, "v0 < 5"))
        self.assertIs(cut.kind, CutKind.MINUS_INFINITY)
        self.assertIsNone(cut.endpoint)
        self.assertEqual(cut.contribution, 1)

    def test_empty_set_has_no_type(self) -> None:
        with self.assertRaises(InconsistentInputError):
            ominimal_type_1(S(1, "v0^2 < 0"))

    def test_wrong_ambient(self) -> None:
        with self.assertRaises(PreconditionError):
            ominimal_type_1(S(2, "v0 > 0"))

    def test_realizations(self) -> None:
        tower, value = OMinimalCut(CutKind.MINUS_INFINITY).realize(Tower())
        self.assertIs(tower.levels[-1].kind, LevelKind.MINUS_INFINITE)
        self.assertLess(value.compare(-1000), 0)
        right = ominimal_type_1(S(1, "v0 > 2"))
        tower, value = right.realize(Tower())
        self.assertIs(tower.levels[-1].kind, LevelKind.INFINITESIMAL)
        self.assertGreater(value.compare(2), 0)
        self.assertLess(value.compare(Fraction(201, 100)), 0)

    def test_malformed_cut(self) -> None:
        with self.assertRaises(PreconditionError):
            OMinimalCut(CutKind.RIGHT_OF)


class TestFiberwiseTypes(unittest.TestCase):
    def test_open_disk(self) -> None:
        X = S(2, "v0^2 + v1^2 < 1")
        t = ominimal_type_n(X)
        self.assertEqual([c.kind for c in t.cuts], [CutKind.RIGHT_OF, CutKind.RIGHT_OF])
        self.assertEqual(t.cuts[0].endpoint.rational_value(), Fraction(-1))
        self.assertEqual(t.dimension, 2)
        self.assertTrue(X.contains(t.realization))

    def test_diagonal_uses_finite_fibers(self) -> None:
        t = ominimal_type_n(S(2, "v1 = v0"))
        self.assertEqual([c.kind for c in t.cuts], [CutKind.MINUS_INFINITY, CutKind.POINT])
        self.assertEqual(t.contributions, (1, 0))
        a, b = t.realization.coords
        self.assertTrue((a - b).is_zero())

    def test_single_point(self) -> None:
        t = ominimal_type_n(S(2, "v0 = 5 & v1 = 7"))
        self.assertEqual([c.kind for c in t.cuts], [CutKind.POINT, CutKind.POINT])
        self.assertEqual([c.rational_value() for c in t.realization.coords], [5, 7])
        self.assertEqual(t.dimension, 0)

    def test_dimension_matches_set(self) -> None:
        for text, expected in [("v1 = v0^2", 1), ("v0 > 0 & v1 > v0", 2), ("v0 = 1 & v1 > 0", 1)]:
            with self.subTest(text=text):
                self.assertEqual(ominimal_type_n(S(2, text)).dimension, expected)

    def test_empty(self) -> None:
        with self.assertRaises(InconsistentInputError):
            ominimal_type_n(S(2, "v0^2 + v1^2 < 0"))

    def test_json_shape(self) -> None:
        out = ominimal_type_n(S(1, "v0 > 0")).to_json()
        self.assertEqual(out["contributions"], [1])
        self.assertEqual(out["cuts"][0]["kind"], "right-of")


if __name__ == "__main__":
    unittest.main()
