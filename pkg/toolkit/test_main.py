from __future__ import annotations

import contextlib
import io
import json
import os
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from toolkit.main import run

ROOT = Path(__file__).resolve().parents[1]


def _run(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with mock.patch.dict(os.environ, {}, clear=False), contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            code = run(list(argv))
        except SystemExit as e:
            code = int(e.code or 0)
    return code, out.getvalue(), err.getvalue()


class TestCommands(unittest.TestCase):
    def test_star_json(self) -> None:
        code, out, _ = _run("star", "d(x) > 0", "--json")
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(payload["formula"], "v1 > 0")
        self.assertEqual(payload["binding"], {"v0": "x", "v1": "d(x)"})

    def test_delta_dim(self) -> None:
        code, out, _ = _run("delta-dim", "d(x) = 0", "--json")
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out), {"dim": 0})
        code, out, _ = _run("delta-dim", "d(x) > 0", "--bases", "1", "2")
        self.assertEqual((code, out.strip()), (0, "2"))

    def test_type_json(self) -> None:
        code, out, _ = _run("type", "d(x) = 0", "--json")
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["kind"], "algebraic-tail")
        code, out, _ = _run("type", "d(x) > 0", "--json")
        self.assertEqual(json.loads(out)["kind"], "zero-tail")

    def test_decide_text(self) -> None:
        code, out, _ = _run("decide", "d(x) > 0", "d(d(x)) = 0", "d(x)^2 > d(x)")
        self.assertEqual(code, 0)
        self.assertEqual([line.split()[0] for line in out.strip().splitlines()], ["true", "false"])

    def test_check_axioms_on_a_small_corpus(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "corpus.txt"
            path.write_text("set 1: v0 > 0\nset 2: v1 = v0^2\nd(x) > 0\n", encoding="utf-8")
            code, out, _ = _run("check-axioms", "--corpus", str(path), "--json")
        self.assertEqual(code, 0)
        self.assertTrue(json.loads(out)["ok"])


class TestExitCodes(unittest.TestCase):
    def test_syntax_error(self) -> None:
        code, out, _ = _run("star", "d(x >", "--json")
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(out)["error"]["type"], "GrammarError")

    def test_inconsistent_input(self) -> None:
        code, _, err = _run("type", "x^2 = -1")
        self.assertEqual(code, 4)
        self.assertIn("deltakit type", err)

    def test_resource_limit(self) -> None:
        code, _, _ = _run("hull", "d(x) = x^3", "--limit-degree", "2")
        self.assertEqual(code, 3)

    def test_precondition_and_usage(self) -> None:
        self.assertEqual(_run("type", "x > 0 & y > x")[0], 1)
        self.assertEqual(_run("no-such-command")[0], 1)
        self.assertEqual(_run("dim", "v0 > 0", "--ambient", "two")[0], 1)

    def test_missing_file(self) -> None:
        self.assertEqual(_run("star", "@/nonexistent/formula.txt")[0], 1)


class TestDeterminism(unittest.TestCase):
    def test_output_independent_of_hash_seed(self) -> None:
        outputs = []
        for seed in ("0", "1", "12345"):
            env = {**os.environ, "PYTHONHASHSEED": seed}
            proc = subprocess.run(
                [sys.executable, "-m", "toolkit.main", "type-n", "x > 0 & y > x", "--json"],
                cwd=ROOT,
                env=env,
                capture_output=True,
                text=True,
                timeout=600,
                check=True,
            )
            outputs.append(proc.stdout)
        self.assertEqual(len(set(outputs)), 1)


if __name__ == "__main__":
    unittest.main()
