from __future__ import annotations

import os
import unittest
from unittest import mock

from toolkit.deltakit.core.config import Settings
from toolkit.deltakit.suite.corpus import parse_corpus
from toolkit.deltakit.suite.suites import SUITES, SuiteContext, run_instance
from toolkit.run_suite import run_suite

CORPUS = parse_corpus(
    [
        "set 1: v0^2 = 2",
        "set 2: v1 = 0 | (v0 > 0 & 0 < v1 & v1 < v0)",
        "set 2: v0^2 + v1^2 < 1",
        "d(x) > 0",
        "d(x) = x^2 & 0 < x & x < 1",
        "x^2 = -1",
        "d(x) = 0",
        "x > 0 & y > x",
    ]
)


def _context() -> SuiteContext:
    with mock.patch.dict(os.environ, {"DELTAKIT_BATTERY_SIZE": "8", "DELTAKIT_BATTERY_ORDER": "2"}, clear=False):
        settings = Settings.from_env()
    return SuiteContext(settings, seed=3)


class TestSuites(unittest.TestCase):
    def setUp(self) -> None:
        self.ctx = _context()

    def status(self, suite: str, index: int) -> str:
        return run_instance(suite, CORPUS[index], self.ctx, CORPUS).status

    def test_dim_axioms(self) -> None:
        for i in range(3):
            with self.subTest(index=i):
                self.assertEqual(self.status("dim-axioms", i), "pass")
        self.assertEqual(self.status("dim-axioms", 3), "skipped")

    def test_type_concentration(self) -> None:
        self.assertEqual(self.status("type-concentration", 3), "pass")
        self.assertEqual(self.status("type-concentration", 4), "pass")
        self.assertEqual(self.status("type-concentration", 7), "pass")
        result = run_instance("type-concentration", CORPUS[5], self.ctx, CORPUS)
        self.assertEqual(result.status, "skipped")
        self.assertEqual(result.detail["reason"], "inconsistent")

    def test_theorem_b(self) -> None:
        result = run_instance("theorem-b", CORPUS[3], self.ctx, CORPUS)
        self.assertEqual(result.status, "pass", result.detail)
        self.assertEqual(result.detail["scheme_dim"], 1)
        result = run_instance("theorem-b", CORPUS[6], self.ctx, CORPUS)
        self.assertEqual(result.status, "pass", result.detail)
        self.assertEqual(result.detail["scheme_dim"], 0)
        self.assertEqual(self.status("theorem-b", 7), "skipped")

    def test_hull_soundness(self) -> None:
        result = run_instance("hull-soundness", CORPUS[4], self.ctx, CORPUS)
        self.assertEqual(result.status, "pass", result.detail)
        self.assertEqual(result.detail["trace"], "graph")

    def test_decide_consistency(self) -> None:
        result = run_instance("decide-consistency", CORPUS[3], self.ctx, CORPUS)
        self.assertEqual(result.status, "pass", result.detail)
        self.assertEqual(result.detail["battery"], 8)

    def test_resource_limit_is_isolated(self) -> None:
        with mock.patch.dict(os.environ, {"DELTAKIT_MAX_JET_ORDER": "0"}, clear=False):
            ctx = SuiteContext(Settings.from_env(), seed=0)
        corpus = parse_corpus(["d(d(x)) > 0 & d(x) > 0", "x > 0"])
        report = run_suite("type-concentration", corpus, ctx)
        self.assertEqual([r.status for r in report.results], ["resource-limit", "pass"])


class TestRunSuite(unittest.TestCase):
    def test_crashing_instance_is_isolated(self) -> None:
        def check(entry, ctx, corpus) -> dict:
            if entry.index == 1:
                raise TypeError("unsupported operand")
            return {"ok": True}

        corpus = parse_corpus(["x > 0", "d(x) > 0", "x < 0"])
        with mock.patch.dict(SUITES, {"crashy": check}), self.assertLogs("deltakit.suite", level="ERROR"):
            report = run_suite("crashy", corpus, _context(), workers=2)
        self.assertEqual([r.status for r in report.results], ["pass", "error", "pass"])
        self.assertEqual(report.results[1].detail["type"], "TypeError")
        self.assertTrue(report.failed)

    def test_empty_corpus(self) -> None:
        report = run_suite("dim-axioms", [], _context())
        self.assertEqual(report.to_json()["instances"], 0)
        self.assertFalse(report.failed)

    def test_order_is_fixed_by_index(self) -> None:
        report = run_suite("type-concentration", CORPUS, _context(), workers=3)
        self.assertEqual([r.index for r in report.results], list(range(len(CORPUS))))
        self.assertEqual(report.counts()["skipped"], 4)


if __name__ == "__main__":
    unittest.main()
