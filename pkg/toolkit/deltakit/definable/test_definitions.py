from __future__ import annotations

import unittest

from toolkit.deltakit.core.errors import PreconditionError
from toolkit.deltakit.definable.builders import codf_type_1, codf_type_n
from toolkit.deltakit.definable.definitions import code_of_type, defining_scheme
from toolkit.deltakit.definable.membership import decide
from toolkit.deltakit.engine.geometry import same_set
from toolkit.deltakit.engine.sets import SemialgebraicSet
from toolkit.deltakit.formula.normalize import normalize
from toolkit.deltakit.formula.parse import parse
from toolkit.deltakit.formula.star import star
from toolkit.deltakit.tower.point import AlgebraicPoint


def over_y(theta) -> SemialgebraicSet:
    sf = star(theta, {2: 1})
    return SemialgebraicSet.from_formula(sf.ambient, sf.formula)


class TestDefiningScheme(unittest.TestCase):
    def test_right_of_zero(self) -> None:
        s = codf_type_1(parse("x > 0"))
        theta = defining_scheme(s, parse("x < y"))
        self.assertTrue(same_set(over_y(theta), SemialgebraicSet.parse(1, "v0 > 0")))

    def test_agrees_with_decide_on_instances(self) -> None:
        s = codf_type_1(parse("x > 0"))
        theta = over_y(defining_scheme(s, parse("x < y")))
        for b in [-2, 0, 3]:
            with self.subTest(b=b):
                self.assertEqual(decide(s, parse(f"x < {b}")), theta.contains(AlgebraicPoint.build([b])))

    def test_cut_avoids_field_points(self) -> None:
        s = codf_type_1(parse("x > 0"))
        self.assertTrue(normalize(defining_scheme(s, parse("x = y"))).is_false)

    def test_minus_infinity_is_below_everything(self) -> None:
        s = codf_type_1(parse("x < 5"))
        self.assertTrue(normalize(defining_scheme(s, parse("x < y"))).is_true)

    def test_context_rejected(self) -> None:
        schemes = codf_type_n(parse("x > 0 & y > x"))
        with self.assertRaises(PreconditionError):
            defining_scheme(schemes[1], parse("y < z"))


class TestCodeOfType(unittest.TestCase):
    def test_one_template(self) -> None:
        s = codf_type_1(parse("x > 0"))
        code = code_of_type(s, [parse("x < y")])
        self.assertEqual(len(code.formulas), 1)
        self.assertEqual(code.to_json(), [normalize(parse("y > 0")).to_text()])

    def test_empty_template_list(self) -> None:
        self.assertEqual(code_of_type(codf_type_1(parse("x > 0")), []).to_json(), [])

    def test_equivalent_templates_keep_separate_entries(self) -> None:
        s = codf_type_1(parse("x > 0"))
        code = code_of_type(s, [parse("x < y"), parse("!(x >= y)")])
        self.assertEqual(len(code.formulas), 2)
        self.assertEqual(code.to_json()[0], code.to_json()[1])


if __name__ == "__main__":
    unittest.main()
