from __future__ import annotations

import unittest

from toolkit.deltakit.core.errors import FormulaSyntaxError
from toolkit.deltakit.formula.jets import DiffPolynomial
from toolkit.deltakit.formula.star import formula_windows
from toolkit.deltakit.suite.battery import formula_battery, load_battery, polynomial_battery
from toolkit.deltakit.suite.corpus import BUNDLED_BATTERY, BUNDLED_CORPUS, load_corpus, parse_corpus


class TestCorpus(unittest.TestCase):
    def test_line_kinds(self) -> None:
        entries = parse_corpus(["# comment", "", "set 2: v1 = v0^2  # parabola", "d(x) > 0", "x > 0 & y > x"])
        self.assertEqual([e.index for e in entries], [0, 1, 2])
        self.assertTrue(entries[0].is_set)
        self.assertEqual(entries[0].ambient, 2)
        self.assertEqual(entries[0].text, "v1 = v0^2")
        self.assertEqual(entries[0].as_set().ambient, 2)
        self.assertEqual(entries[1].indeterminates, [1])
        self.assertEqual(entries[2].indeterminates, [1, 2])

    def test_syntax_error_reports_line(self) -> None:
        with self.assertRaises(FormulaSyntaxError) as ctx:
            parse_corpus(["d(x) > 0", "# fine", "d(x >"])
        self.assertEqual(ctx.exception.line, 3)

    def test_delta_entry_is_not_a_set(self) -> None:
        with self.assertRaises(ValueError):
            parse_corpus(["d(x) > 0"])[0].as_set()

    def test_bundled_corpus_sizes(self) -> None:
        entries = load_corpus(BUNDLED_CORPUS)
        sets = [e for e in entries if e.is_set]
        one = [e for e in entries if not e.is_set and len(e.indeterminates) == 1]
        two = [e for e in entries if not e.is_set and len(e.indeterminates) == 2]
        self.assertGreaterEqual(len(sets), 100)
        self.assertTrue(all(e.ambient <= 3 for e in sets))
        self.assertGreaterEqual(len(one), 50)
        self.assertGreaterEqual(len(two), 10)
        self.assertTrue(all(max(formula_windows(e.formula).values()) <= 3 for e in one))


class TestBattery(unittest.TestCase):
    def test_deterministic_in_seed(self) -> None:
        a = formula_battery(3, 2, 50, seed=7)
        self.assertEqual(len(a), 50)
        self.assertEqual(a, formula_battery(3, 2, 50, seed=7))
        self.assertNotEqual(a, formula_battery(3, 2, 50, seed=8))

    def test_respects_order(self) -> None:
        for f in formula_battery(1, 2, 30, seed=1):
            self.assertLessEqual(max(formula_windows(f).values(), default=0), 2)

    def test_polynomial_battery(self) -> None:
        polys = polynomial_battery(1, 2)
        x0, x1 = DiffPolynomial.jet(1, 0), DiffPolynomial.jet(1, 1)
        self.assertEqual(polys[:2], [x0, x1])
        self.assertIn(x0 * x1, polys)
        self.assertIn(x1 - x0, polys)

    def test_bundled_battery_parses(self) -> None:
        self.assertGreaterEqual(len(load_battery(BUNDLED_BATTERY)), 20)


if __name__ == "__main__":
    unittest.main()
