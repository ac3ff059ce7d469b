import threading
import time
import unittest

import sympy

from toolkit.deltakit.core.budget import ResourceBudget, current_budget
from toolkit.deltakit.core.errors import ResourceLimitError


class TestResourceBudget(unittest.TestCase):
    def test_degree_limit(self) -> None:
        v = sympy.Symbol("v0")
        budget = ResourceBudget(max_degree=2)
        budget.check_polys([v**2 - 1])
        with self.assertRaises(ResourceLimitError) as ctx:
            budget.check_polys([v**3])
        self.assertEqual(ctx.exception.kind, "degree")

    def test_exhaustion_is_logged(self) -> None:
        budget = ResourceBudget(max_jet_order=1)
        budget.check_jet_order(1)
        with self.assertLogs("deltakit.budget", level="WARNING") as logs:
            with self.assertRaises(ResourceLimitError) as ctx:
                budget.check_jet_order(2)
        self.assertEqual(ctx.exception.kind, "jet-order")
        self.assertIn("jet-order", logs.output[0])

    def test_deadline(self) -> None:
        budget = ResourceBudget(timeout_seconds=0.01)
        with budget.activate():
            time.sleep(0.05)
            with self.assertRaises(ResourceLimitError):
                current_budget().check_deadline()

    def test_budgets_are_isolated_per_thread(self) -> None:
        seen: dict[str, int] = {}

        def worker(name: str, limit: int) -> None:
            with ResourceBudget(max_vars=limit).activate():
                time.sleep(0.01)
                seen[name] = current_budget().max_vars

        threads = [threading.Thread(target=worker, args=(f"t{i}", i + 1)) for i in range(3)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        self.assertEqual(seen, {"t0": 1, "t1": 2, "t2": 3})


if __name__ == "__main__":
    unittest.main()
