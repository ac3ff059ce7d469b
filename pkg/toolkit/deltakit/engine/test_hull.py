from __future__ import annotations

import unittest

import sympy

from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.engine.geometry import is_subset, same_set
from toolkit.deltakit.engine.hull import polynomial_hull, root_branches, vanishes_on
from toolkit.deltakit.engine.sets import SemialgebraicSet
from toolkit.deltakit.formula.ast import Atom, Rel
from toolkit.deltakit.formula.jets import v_symbol

V0, V1 = v_symbol(0), v_symbol(1)


def S(ambient: int, text: str) -> SemialgebraicSet:
    return SemialgebraicSet.parse(ambient, text)


class TestPolynomialHull(unittest.TestCase):
    def test_half_circle(self) -> None:
        P = polynomial_hull(S(2, "v0^2 + v1^2 = 1 & v0 > 0"))
        self.assertEqual(sympy.expand(P - (V0**2 + V1**2 - 1)), 0)

    def test_union_of_axes(self) -> None:
        P = polynomial_hull(S(2, "v1 = 0 | v0 = 0"))
        self.assertEqual(sympy.expand(P - V0 * V1), 0)

    def test_point_on_the_line(self) -> None:
        self.assertEqual(sympy.expand(polynomial_hull(S(1, "v0 = 1")) - (V0 - 1)), 0)

    def test_empty_inequality_disjunct_is_skipped(self) -> None:
        P = polynomial_hull(S(2, "v1 = v0 | (v0^2 < -1 & v1 > 0)"))
        self.assertTrue(vanishes_on(P, S(2, "v1 = v0")))

    def test_full_dimensional_set_has_no_hull(self) -> None:
        with self.assertRaises(PreconditionError):
            polynomial_hull(S(2, "v0 > 0"))

    def test_vanishing_check(self) -> None:
        Y = S(2, "v1 = v0^2 & v0 > 0")
        self.assertTrue(vanishes_on(V1 - V0**2, Y))
        self.assertFalse(vanishes_on(V1 - V0, Y))

class TestHullContainsSet(unittest.TestCase):
    def vanishing_set(self, X: SemialgebraicSet) -> SemialgebraicSet:
        return SemialgebraicSet.from_formula(X.ambient, Atom(polynomial_hull(X), Rel.EQ))

    def test_set_lies_in_zero_set_of_hull(self) -> None:
        for ambient, text in [
            (2, "v0^2 + v1^2 = 1"),
            (2, "v1 = v0^2 & v0 < 1"),
            (1, "v0 = 1 | v0 = -2"),
            (2, "(v0 = 0 & v1 > 0) | (v1 = 1 & v0 < 0)"),
        ]:
            with self.subTest(text=text):
                X = S(ambient, text)
                self.assertTrue(is_subset(X, self.vanishing_set(X)))

    def test_zero_set_is_strictly_larger_for_an_arc(self) -> None:
        X = S(2, "v1 = v0^2 & v0 > 0")
        self.assertFalse(is_subset(self.vanishing_set(X), X))



class TestRootBranches(unittest.TestCase):
    def test_square_root_pair(self) -> None:
        regions = root_branches(V1**2 - V0, S(1, "v0 > 0"))
        self.assertEqual(len(regions), 1)
        (region,) = regions
        self.assertEqual(region.count, 2)
        self.assertEqual([b.index for b in region.branches], [1, 2])
        self.assertTrue(same_set(region.domain, S(1, "v0 > 0")))

    def test_linear_in_last_variable(self) -> None:
        regions = root_branches(V1 - V0**2, SemialgebraicSet.full(1))
        self.assertEqual({r.count for r in regions}, {1})

    def test_no_real_roots(self) -> None:
        regions = root_branches(V1**2 + 1, SemialgebraicSet.full(1))
        self.assertEqual({r.count for r in regions}, {0})
        self.assertTrue(all(r.branches == () for r in regions))

    def test_count_changes_across_regions(self) -> None:
        regions = root_branches(V1**2 - V0, SemialgebraicSet.full(1))
        counts = sorted(r.count for r in regions)
        self.assertEqual(counts, [0, 1, 2])


if __name__ == "__main__":
    unittest.main()
