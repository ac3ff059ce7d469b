"""Property suites over a corpus: each suite maps one corpus entry to one instance result."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from toolkit.deltakit.core.budget import ResourceBudget
from toolkit.deltakit.core.config import Settings
from toolkit.deltakit.core.errors import DeltakitError, InconsistentInputError, ResourceLimitError
from toolkit.deltakit.definable.builders import codf_type_1, codf_type_dimdense, codf_type_n, perturb_realization
from toolkit.deltakit.definable.density import build_hull, starred_set
from toolkit.deltakit.definable.membership import decide, decide_joint
from toolkit.deltakit.definable.schemes import DeltaTypeScheme, JetRealizer
from toolkit.deltakit.dimension.delta import delta_dim_1, scheme_dim
from toolkit.deltakit.dimension.fibered import instance_checks
from toolkit.deltakit.engine.geometry import is_subset, same_set
from toolkit.deltakit.formula.ast import And, Atom, Formula, Not, Or, iter_atoms, map_atoms
from toolkit.deltakit.formula.star import admit, formula_windows, star
from toolkit.deltakit.suite.battery import formula_battery, polynomial_battery
from toolkit.deltakit.suite.corpus import CorpusEntry
from toolkit.deltakit.suite.oracles import branch_identities, fiber_split_oracle, interior_oracle
from toolkit.deltakit.tower.point import sign_at
from toolkit.deltakit.tower.tower import level_index

logger = logging.getLogger("deltakit.suite")


@dataclass(frozen=True)
class SuiteContext:
    settings: Settings
    seed: int = 0
    battery: tuple[Formula, ...] = ()

    def formulas(self, base: int = 1) -> list[Formula]:
        if self.battery:
            return list(self.battery)
        s = self.settings
        return formula_battery(s.battery_order, s.battery_degree, s.battery_size, self.seed, base)


@dataclass
class InstanceResult:
    index: int
    text: str
    status: str
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        out: dict = {"index": self.index, "text": self.text, "status": self.status}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class SuiteReport:
    suite: str
    seed: int
    results: list[InstanceResult]
    timed_out: bool = False

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.results:
            out[r.status] = out.get(r.status, 0) + 1
        return dict(sorted(out.items()))

    @property
    def failed(self) -> bool:
        return any(r.status in ("fail", "error") for r in self.results)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "instances": len(self.results),
            "counts": self.counts(),
            "timed_out": self.timed_out,
            "results": [r.to_json() for r in sorted(self.results, key=lambda r: r.index)],
        }


class Skip(Exception):
    """The entry is outside the suite's scope."""


def _one_variable(entry: CorpusEntry) -> None:
    if entry.is_set:
        raise Skip("semialgebraic set")
    if len(entry.indeterminates) != 1:
        raise Skip("needs one indeterminate")


def _dim_axioms(entry: CorpusEntry, ctx: SuiteContext, corpus: Sequence[CorpusEntry]) -> dict:
    if not entry.is_set:
        raise Skip("differential formula")
    X = entry.as_set()
    partner = next((e.as_set() for e in corpus[entry.index + 1 :] if e.is_set and e.ambient == entry.ambient), None)
    checks = instance_checks(entry.index, X, partner)
    out: dict = {"ok": all(c.status != "fail" for c in checks), "checks": [c.to_json() for c in checks]}
    if any(c.status == "resource-limit" for c in checks):
        out["resource_limit"] = True
    if X.ambient >= 1:
        oracle = fiber_split_oracle(X, seed=ctx.seed)
        out["fiber_oracle"] = oracle.to_json()
        out["ok"] = out["ok"] and oracle.status == "agree"
    return out


def _type_concentration(entry: CorpusEntry, ctx: SuiteContext, corpus: Sequence[CorpusEntry]) -> dict:
    if entry.is_set:
        raise Skip("semialgebraic set")
    phi = entry.formula
    if len(entry.indeterminates) == 1:
        s = codf_type_1(phi)
        return {"ok": decide(s, phi), "scheme": s.to_json()}
    schemes = codf_type_n(phi)
    return {"ok": decide(schemes, phi), "schemes": [s.to_json() for s in schemes]}


def _theorem_b(entry: CorpusEntry, ctx: SuiteContext, corpus: Sequence[CorpusEntry]) -> dict:
    _one_variable(entry)
    phi = entry.formula
    d = delta_dim_1(phi)
    if d.is_minus_infinity:
        raise Skip("inconsistent")
    s = codf_type_dimdense(phi)
    polys = polynomial_battery(ctx.settings.battery_order, ctx.settings.battery_degree)
    got = scheme_dim(s, polys)
    oracle = interior_oracle(phi, seed=ctx.seed)
    ok = got == d and decide(s, phi) and oracle.status != "disagree"
    return {"ok": ok, "delta_dim": d.to_json(), "scheme_dim": got.to_json(), "kind": s.kind.value, "interior_oracle": oracle.to_json()}


def _hull_soundness(entry: CorpusEntry, ctx: SuiteContext, corpus: Sequence[CorpusEntry]) -> dict:
    _one_variable(entry)
    result = build_hull(entry.formula)
    ok = is_subset(result.hull, result.starred)
    pieces = []
    for piece in result.graph_pieces:
        if any(level_index(s) is not None for s in piece.poly.free_symbols):
            continue
        check = branch_identities(piece, seed=ctx.seed)
        pieces.append(check.to_json())
        ok = ok and check.status != "disagree"
    return {"ok": ok, "trace": result.trace.case, "pieces": pieces}


def _variant(phi: Formula) -> Formula:
    """An equivalent formula: atoms doubled, argument order reversed, double negation on top."""
    doubled = map_atoms(phi, lambda a: Atom(a.term * 2, a.rel))

    def flip(f: Formula) -> Formula:
        if isinstance(f, (And, Or)):
            return type(f)(tuple(flip(g) for g in reversed(f.args)))
        if isinstance(f, Not):
            return Not(flip(f.arg))
        return f

    return Not(Not(flip(doubled)))


def _perturbation_stable(s: DeltaTypeScheme, formulas: Sequence[Formula]) -> bool:
    window = len(s.jet.cuts)
    if window == 0 or s.jet.dimension != window:
        return True
    moved = perturb_realization(s)
    realizer = JetRealizer([s])
    for psi in formulas:
        if formula_windows(psi).get(s.indeterminate, 0) > window:
            continue
        sf = star(psi, {s.indeterminate: window})
        variables = [sym for sym, _ in sf.binding]
        here = realizer.point(jv for _, jv in sf.binding)
        for atom in iter_atoms(sf.formula):
            if sign_at(atom.term, here, variables) != sign_at(atom.term, moved, variables):
                return False
    return True


def _decide_consistency(entry: CorpusEntry, ctx: SuiteContext, corpus: Sequence[CorpusEntry]) -> dict:
    _one_variable(entry)
    phi = entry.formula
    s = codf_type_1(phi)
    battery = ctx.formulas(s.indeterminate)
    answers = decide_joint([s], battery)
    negated = decide_joint([s], [Not(psi) for psi in battery])
    total = all(a != b for a, b in zip(answers, negated))
    pairs = list(zip(battery, battery[1:]))
    conj_answers = decide_joint([s], [And((a, b)) for a, b in pairs])
    disj_answers = decide_joint([s], [Or((a, b)) for a, b in pairs])
    homomorphic = all(
        c == (answers[i] and answers[i + 1]) and d == (answers[i] or answers[i + 1])
        for i, (c, d) in enumerate(zip(conj_answers, disj_answers))
    )
    variant = _variant(phi)
    canonical = same_set(starred_set(phi)[1], starred_set(variant)[1])
    if canonical:
        canonical = decide_joint([codf_type_1(variant)], battery) == answers
    stable = _perturbation_stable(s, battery)
    return {
        "ok": total and homomorphic and canonical and stable,
        "battery": len(battery),
        "total": total,
        "homomorphic": homomorphic,
        "canonical": canonical,
        "perturbation": stable,
    }


SuiteCheck = Callable[[CorpusEntry, SuiteContext, Sequence[CorpusEntry]], dict]

SUITES: dict[str, SuiteCheck] = {
    "dim-axioms": _dim_axioms,
    "type-concentration": _type_concentration,
    "theorem-b": _theorem_b,
    "hull-soundness": _hull_soundness,
    "decide-consistency": _decide_consistency,
}


def run_instance(suite: str, entry: CorpusEntry, ctx: SuiteContext, corpus: Sequence[CorpusEntry]) -> InstanceResult:
    """One instance under its own budget; limits and crashes are recorded, never raised."""
    check = SUITES[suite]
    started = time.monotonic()
    budget = ResourceBudget.from_settings(ctx.settings)
    try:
        with budget.activate():
            admit(entry.formula)
            detail = check(entry, ctx, corpus)
        ok = detail.pop("ok")
        status = "pass" if ok else "fail"
        if ok and detail.pop("resource_limit", False):
            status = "resource-limit"
    except Skip as exc:
        status, detail = "skipped", {"reason": str(exc)}
    except InconsistentInputError as exc:
        status, detail = "skipped", {"reason": "inconsistent", "message": str(exc)}
    except ResourceLimitError as exc:
        status, detail = "resource-limit", {"kind": exc.kind, "message": str(exc)}
    except DeltakitError as exc:
        status, detail = "error", {"type": type(exc).__name__, "message": str(exc)}
    except Exception as exc:
        logger.exception("suite %s crashed on instance %d", suite, entry.index)
        status, detail = "error", {"type": type(exc).__name__, "message": str(exc)}
    elapsed = time.monotonic() - started
    logger.debug("suite %s instance %d: %s in %.2fs", suite, entry.index, status, elapsed)
    return InstanceResult(entry.index, entry.text, status, detail, elapsed)
