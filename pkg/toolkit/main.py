from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, NoReturn

from dotenv import load_dotenv

from toolkit.deltakit.core.budget import ResourceBudget
from toolkit.deltakit.core.cache import configure_cache
from toolkit.deltakit.core.cli import add_runtime_args, apply_runtime_overrides
from toolkit.deltakit.core.config import Settings
from toolkit.deltakit.core.errors import DeltakitError, PreconditionError
from toolkit.deltakit.definable.builders import codf_type_1, codf_type_dimdense, codf_type_n
from toolkit.deltakit.definable.definitions import code_of_type, defining_scheme
from toolkit.deltakit.definable.density import build_hull
from toolkit.deltakit.definable.membership import decide_joint
from toolkit.deltakit.definable.schemes import DeltaTypeScheme
from toolkit.deltakit.dimension.delta import delta_dim_n
from toolkit.deltakit.dimension.fibered import verify_dim_axioms
from toolkit.deltakit.engine.geometry import dim, fiber_split
from toolkit.deltakit.engine.qe import eliminate
from toolkit.deltakit.engine.sets import SemialgebraicSet
from toolkit.deltakit.formula.ast import Formula, free_symbols, to_text
from toolkit.deltakit.formula.parse import parse, parse_or
from toolkit.deltakit.formula.serialize import formula_to_json
from toolkit.deltakit.formula.star import admit, formula_windows, star
from toolkit.deltakit.suite.battery import load_battery
from toolkit.deltakit.suite.corpus import BUNDLED_CORPUS, load_corpus

logger = logging.getLogger("deltakit.cli")

Payload = dict[str, Any]


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(text: str) -> str:
    """A formula argument, or the contents of a file when written as @path."""
    if text.startswith("@"):
        return Path(text[1:]).read_text(encoding="utf-8").strip()
    return text


def _delta(text: str) -> Formula:
    f = parse(_read(text))
    admit(f)
    return f


def _set(text: str, ambient: int | None) -> SemialgebraicSet:
    f = parse_or(_read(text))
    admit(f)
    if ambient is None:
        indices = [int(s.name[1:]) for s in free_symbols(f) if s.name[1:].isdigit()]
        ambient = max(indices) + 1 if indices else 0
    return SemialgebraicSet.from_formula(ambient, f)


def _schemes(phi: Formula, dimdense: bool = False) -> list[DeltaTypeScheme]:
    if len(formula_windows(phi)) > 1:
        return codf_type_n(phi)
    return [codf_type_dimdense(phi) if dimdense else codf_type_1(phi)]


def cmd_parse(args: argparse.Namespace) -> tuple[Payload, str]:
    f = parse_or(_read(args.formula)) if args.language == "or" else _delta(args.formula)
    return {"formula": to_text(f), "ast": formula_to_json(f)}, to_text(f)


def cmd_star(args: argparse.Namespace) -> tuple[Payload, str]:
    sf = star(_delta(args.formula))
    payload = sf.to_json()
    binding = ", ".join(f"{k} = {v}" for k, v in payload["binding"].items())
    return payload, f"{payload['formula']}\n  where {binding}"


def cmd_dim(args: argparse.Namespace) -> tuple[Payload, str]:
    d = dim(_set(args.formula, args.ambient))
    return {"dim": d.to_json()}, str(d)


def cmd_delta_dim(args: argparse.Namespace) -> tuple[Payload, str]:
    d = delta_dim_n(_delta(args.formula), args.bases)
    return {"dim": d.to_json()}, str(d)


def cmd_fibers(args: argparse.Namespace) -> tuple[Payload, str]:
    X = _set(args.formula, args.ambient)
    x0, x1 = fiber_split(X)
    payload = {"X0": x0.to_text(), "X1": x1.to_text()}
    return payload, f"X(0): {payload['X0']}\nX(1): {payload['X1']}"


def cmd_hull(args: argparse.Namespace) -> tuple[Payload, str]:
    result = build_hull(_delta(args.formula))
    return result.to_json(), f"{result.hull.to_text()}\n  trace: {result.trace.case}, e = {result.trace.e}"


def _scheme_output(schemes: list[DeltaTypeScheme]) -> tuple[Payload, str]:
    if len(schemes) == 1:
        return schemes[0].to_json(), schemes[0].to_text()
    return {"schemes": [s.to_json() for s in schemes]}, "\n".join(s.to_text() for s in schemes)


def cmd_type(args: argparse.Namespace) -> tuple[Payload, str]:
    phi = _delta(args.formula)
    if len(formula_windows(phi)) > 1:
        raise PreconditionError("type expects a formula in one indeterminate; use type-n")
    return _scheme_output([codf_type_1(phi)])


def cmd_type_dimdense(args: argparse.Namespace) -> tuple[Payload, str]:
    return _scheme_output([codf_type_dimdense(_delta(args.formula))])


def cmd_type_n(args: argparse.Namespace) -> tuple[Payload, str]:
    return _scheme_output(codf_type_n(_delta(args.formula)))


def cmd_decide(args: argparse.Namespace) -> tuple[Payload, str]:
    schemes = _schemes(_delta(args.formula), args.dimdense)
    formulas = [_delta(text) for text in args.psi]
    if args.battery:
        formulas.extend(load_battery(args.battery))
    answers = decide_joint(schemes, formulas)
    rows = [{"formula": to_text(f), "decide": a} for f, a in zip(formulas, answers)]
    if len(rows) == 1:
        return rows[0], str(rows[0]["decide"]).lower()
    return {"results": rows}, "\n".join(f"{str(r['decide']).lower():5}  {r['formula']}" for r in rows)


def cmd_define(args: argparse.Namespace) -> tuple[Payload, str]:
    s = codf_type_1(_delta(args.formula))
    theta = defining_scheme(s, _delta(args.template))
    return {"formula": to_text(theta)}, to_text(theta)


def cmd_code(args: argparse.Namespace) -> tuple[Payload, str]:
    s = codf_type_1(_delta(args.formula))
    code = code_of_type(s, [_delta(t) for t in args.templates])
    return {"code": code.to_json()}, "\n".join(code.to_text())


def cmd_check_axioms(args: argparse.Namespace) -> tuple[Payload, str]:
    corpus = [e.as_set() for e in load_corpus(args.corpus) if e.is_set]
    report = verify_dim_axioms(corpus)
    counts = ", ".join(f"{k}: {v}" for k, v in report.counts().items())
    payload = {"ok": report.all_passed, **report.to_json()}
    return payload, f"{len(corpus)} sets; {counts}"


def cmd_qe(args: argparse.Namespace) -> tuple[Payload, str]:
    f = parse_or(_read(args.formula))
    admit(f)
    dnf = eliminate(f)
    return {"formula": dnf.to_text()}, dnf.to_text()


Handler = Callable[[argparse.Namespace], tuple[Payload, str]]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="deltakit", description="Exact toolkit for definable sets and types in closed ordered differential fields.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Emit one JSON object instead of text.")
    add_runtime_args(common)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(handler=handler)
        return p

    p = command("parse", cmd_parse, "Parse and print a formula.")
    p.add_argument("formula")
    p.add_argument("--language", choices=["delta", "or"], default="delta")

    command("star", cmd_star, "Algebraize a differential formula over its jet variables.").add_argument("formula")

    for name, handler, help_text in [
        ("dim", cmd_dim, "Dimension of a semialgebraic set over v0, v1, ..."),
        ("fibers", cmd_fibers, "Split a semialgebraic set by the dimension of its last-coordinate fibers."),
    ]:
        p = command(name, handler, help_text)
        p.add_argument("formula")
        p.add_argument("--ambient", type=int, metavar="N", help="Ambient dimension (default: one past the largest v-index).")

    p = command("delta-dim", cmd_delta_dim, "delta-dimension of a differential formula.")
    p.add_argument("formula")
    p.add_argument("--bases", type=int, nargs="+", metavar="B", help="Indeterminates to measure over (1 = x, 2 = y, ...).")

    command("hull", cmd_hull, "Hull of the jets of a one-variable differential formula.").add_argument("formula")
    command("type", cmd_type, "Definable type concentrating on a one-variable formula.").add_argument("formula")
    command("type-dimdense", cmd_type_dimdense, "Definable type of the same delta-dimension.").add_argument("formula")
    command("type-n", cmd_type_n, "Coordinate-wise definable type of a formula in several variables.").add_argument("formula")

    p = command("decide", cmd_decide, "Decide formulas in the type built from a formula.")
    p.add_argument("formula")
    p.add_argument("psi", nargs="*")
    p.add_argument("--dimdense", action="store_true", help="Use the type of full delta-dimension.")
    p.add_argument("--battery", metavar="PATH", help="File of formulas to decide, one per line.")

    p = command("define", cmd_define, "Defining scheme of a type for a template in x and y.")
    p.add_argument("formula")
    p.add_argument("template")

    p = command("code", cmd_code, "Normalized defining schemes for several templates.")
    p.add_argument("formula")
    p.add_argument("templates", nargs="*")

    p = command("check-axioms", cmd_check_axioms, "Check the dimension axioms on the sets of a corpus.")
    p.add_argument("--corpus", default=str(BUNDLED_CORPUS), metavar="PATH")

    command("qe", cmd_qe, "Eliminate quantifiers from an ordered-field formula.").add_argument("formula")
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    load_dotenv()
    apply_runtime_overrides(args)
    try:
        settings = Settings.from_env()
    except ValueError as e:
        print(f"deltakit: {e}", file=sys.stderr)
        return 1
    logging.basicConfig(level=getattr(logging, settings.log_level.upper(), logging.INFO))
    configure_cache(settings)

    try:
        with ResourceBudget.from_settings(settings).activate():
            payload, text = args.handler(args)
    except DeltakitError as e:
        logger.debug("%s failed: %s", args.command, e)
        if args.json:
            print(json.dumps({"error": {"type": type(e).__name__, "message": str(e), "exit_code": e.exit_code}}, indent=2))
        else:
            print(f"deltakit {args.command}: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"deltakit {args.command}: {e}", file=sys.stderr)
        return 1

    print(json.dumps(payload, indent=2, ensure_ascii=False) if args.json else text)
    return 0 if payload.get("ok", True) else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
