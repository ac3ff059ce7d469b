from __future__ import annotations

import unittest

from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.definable.builders import codf_type_1, codf_type_n
from toolkit.deltakit.definable.membership import decide, decide_joint, holds_at
from toolkit.deltakit.definable.schemes import JetRealizer
from toolkit.deltakit.formula.ast import And, Not, Or
from toolkit.deltakit.formula.parse import parse

FORMULAS = ["x > 2", "x = 3", "d(x) != 0", "d(d(x)) < x", "x^2 - 9 = d(x)", "x < 0 | d(x) > 0"]


class TestDecide(unittest.TestCase):
    def setUp(self) -> None:
        self.point = codf_type_1(parse("x = 3 & d(x) = 0"))
        self.rising = codf_type_1(parse("d(x) > 0"))

    def test_total_on_a_constant(self) -> None:
        for text in FORMULAS:
            with self.subTest(text=text):
                psi = parse(text)
                self.assertNotEqual(decide(self.point, psi), decide(self.point, Not(psi)))

    def test_total_with_an_infinitesimal_derivative(self) -> None:
        for text in FORMULAS:
            with self.subTest(text=text):
                psi = parse(text)
                self.assertNotEqual(decide(self.rising, psi), decide(self.rising, Not(psi)))

    def test_boolean_connectives(self) -> None:
        a, b = parse("x = 3"), parse("d(x) > 0")
        self.assertTrue(decide(self.point, a))
        self.assertFalse(decide(self.point, b))
        self.assertFalse(decide(self.point, And((a, b))))
        self.assertTrue(decide(self.point, Or((a, b))))

    def test_joint_agrees_with_single_calls(self) -> None:
        formulas = [parse(text) for text in FORMULAS]
        for s in (self.point, self.rising):
            with self.subTest(scheme=s.name):
                self.assertEqual(decide_joint([s], formulas), [decide(s, f) for f in formulas])

    def test_chain_of_schemes(self) -> None:
        schemes = codf_type_n(parse("x = 1 & y = 2"))
        self.assertTrue(decide(schemes, parse("y = 2*x & d(y) = 0")))
        self.assertFalse(decide(schemes, parse("x > y")))

    def test_unknown_indeterminate(self) -> None:
        with self.assertRaises(PreconditionError):
            holds_at(JetRealizer([self.point]), parse("z = 0"))

    def test_result_is_logged(self) -> None:
        with self.assertLogs("deltakit.types", level="DEBUG") as logs:
            decide(self.point, parse("x = 3"))
        self.assertIn("decide: True", logs.output[-1])


if __name__ == "__main__":
    unittest.main()
