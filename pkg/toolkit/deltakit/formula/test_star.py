import unittest

import sympy

from toolkit.deltakit.core.budget import ResourceBudget
from toolkit.deltakit.core.errors import PreconditionError, ResourceLimitError
from toolkit.deltakit.formula.ast import And, Atom, Or, Rel
from toolkit.deltakit.formula.jets import JetVar
from toolkit.deltakit.formula.normalize import normalize
from toolkit.deltakit.formula.parse import parse, parse_or
from toolkit.deltakit.formula.star import admit, lift_scheme, star

v0, v1, v2, v3 = sympy.symbols("v0 v1 v2 v3")


class TestStar(unittest.TestCase):
    def test_renaming(self) -> None:
        form = star(parse("d(x)*x - 1 > 0"))
        self.assertEqual(form.formula, Atom(v0 * v1 - 1, Rel.GT))
        self.assertEqual([s for s, _ in form.binding], [v0, v1])

    def test_full_window_keeps_intermediate_jets(self) -> None:
        form = star(parse("d(d(x)) = 0"))
        self.assertEqual(form.formula, Atom(v2, Rel.EQ))
        self.assertEqual(form.binding, ((v0, JetVar(1, 0)), (v1, JetVar(1, 1)), (v2, JetVar(1, 2))))

    def test_distributes_over_connectives(self) -> None:
        form = star(parse("x > 0 & d(x) < x"))
        self.assertEqual(form.formula, And((Atom(v0, Rel.GT), Atom(v1 - v0, Rel.LT))))
        form = star(parse("x > 0 | !(d(x) = 1)"))
        self.assertIsInstance(form.formula, Or)

    def test_json_matches_cli_shape(self) -> None:
        self.assertEqual(
            star(parse("d(x) > 0")).to_json(),
            {"formula": "v1 > 0", "binding": {"v0": "x", "v1": "d(x)"}},
        )

    def test_two_indeterminates_are_laid_out_in_blocks(self) -> None:
        form = star(parse("d(x) > y"))
        self.assertEqual(form.binding, ((v0, JetVar(1, 0)), (v1, JetVar(1, 1)), (v2, JetVar(2, 0))))

    def test_window_override(self) -> None:
        form = star(parse("d(x) > 0"), windows={2: 1})
        self.assertEqual(form.ambient, 3)


class TestLiftScheme(unittest.TestCase):
    def test_examples(self) -> None:
        self.assertEqual(lift_scheme(parse_or("v1 > v0"), 1), parse("d(x) > x"))
        self.assertEqual(lift_scheme(parse_or("v0 = 0"), 0), parse("x = 0"))
        self.assertEqual(lift_scheme(parse_or("v2 = v0*v1"), 2), parse("d(d(x)) = x*d(x)"))

    def test_block_size_mismatch(self) -> None:
        with self.assertRaises(PreconditionError):
            lift_scheme(parse_or("v2 > 0"), 1)

    def test_star_lift_adjunction(self) -> None:
        cases = [
            ("v1 > v0 & v0^2 < 2", 1),
            ("v2 = v0*v1 | v1 != 0", 2),
            ("v0*v3 - v1 <= v2", 1),
            ("v0 >= 1/2", 0),
        ]
        for text, ell in cases:
            psi = parse_or(text)
            lifted = star(lift_scheme(psi, ell))
            self.assertEqual(normalize(lifted.formula), normalize(psi), text)


class TestAdmit(unittest.TestCase):
    def test_limits(self) -> None:
        with ResourceBudget(max_degree=2, max_jet_order=1).activate():
            admit(parse("d(x)*x - 1 > 0 & y^2 < 3"))
            with self.assertRaises(ResourceLimitError) as ctx:
                admit(parse("x^3 > 0"))
            self.assertEqual(ctx.exception.kind, "degree")
            with self.assertRaises(ResourceLimitError) as ctx:
                admit(parse("d(d(x)) > 0"))
            self.assertEqual(ctx.exception.kind, "jet-order")

    def test_unlimited_outside_a_budget(self) -> None:
        admit(parse("d(d(d(x)))^7 > x"))


if __name__ == "__main__":
    unittest.main()
