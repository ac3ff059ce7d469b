"""The fibered dimension API: dimension of finite type fragments, full-dimensional points and
an executable check of the dimension axioms on a corpus of sets."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import sympy

from toolkit.deltakit.core.errors import InconsistentInputError, PreconditionError, ResourceLimitError
from toolkit.deltakit.dimension.delta import delta_dim_n
from toolkit.deltakit.dimension.value import DimensionValue, dim_max, dim_min
from toolkit.deltakit.engine.geometry import dim, fiber_split, interval_formula, is_empty, same_set
from toolkit.deltakit.engine.qe import decide, eliminate
from toolkit.deltakit.engine.sets import SemialgebraicSet
from toolkit.deltakit.formula.ast import Atom, Formula, Not, Quant, Quantified, conj, free_symbols, iter_atoms, map_atoms
from toolkit.deltakit.formula.jets import DiffPolynomial, v_symbol
from toolkit.deltakit.tower.point import AlgebraicPoint

logger = logging.getLogger("deltakit.dimension")


@dataclass(frozen=True)
class TypeFragment:
    """A finite part of a type: formulas in the same free variables, all in L_delta or all in L_or."""

    formulas: tuple[Formula, ...]
    ambient: int | None = None

    def __post_init__(self) -> None:
        if not self.formulas:
            raise PreconditionError("a type fragment needs at least one formula")
        kinds = {isinstance(a.term, DiffPolynomial) for f in self.formulas for a in iter_atoms(f)}
        if len(kinds) > 1:
            raise PreconditionError("a type fragment cannot mix differential and ordered-field formulas")

    @property
    def is_differential(self) -> bool:
        return any(isinstance(a.term, DiffPolynomial) for f in self.formulas for a in iter_atoms(f))

    def space(self) -> int:
        """Ambient dimension of an L_or fragment: the given one, else one past the largest v-index."""
        if self.ambient is not None:
            return self.ambient
        indices = [int(s.name[1:]) for f in self.formulas for s in free_symbols(f) if s.name[1:].isdigit()]
        return max(indices) + 1 if indices else 0


def dim_of_fragment(fragment: TypeFragment) -> DimensionValue:
    """min of the dimensions of the fragment's formulas; the fragment must be consistent."""
    whole = conj(*fragment.formulas)
    if fragment.is_differential:
        if delta_dim_n(whole).is_minus_infinity:
            raise InconsistentInputError("type fragment is inconsistent")
        return dim_min(delta_dim_n(f) for f in fragment.formulas)
    n = fragment.space()
    if is_empty(SemialgebraicSet.from_formula(n, whole)):
        raise InconsistentInputError("type fragment is inconsistent")
    return dim_min(dim(SemialgebraicSet.from_formula(n, f)) for f in fragment.formulas)


def realize_full_dim(X: SemialgebraicSet) -> AlgebraicPoint:
    """A point of X, in a fresh tower, lying in no definable subset of X of smaller dimension."""
    from toolkit.deltakit.definable.ominimal import ominimal_type_n

    return ominimal_type_n(X).realization


@dataclass(frozen=True)
class AxiomCheck:
    index: int
    axiom: str
    status: str
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        out: dict = {"index": self.index, "axiom": self.axiom, "status": self.status}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class AxiomReport:
    checks: tuple[AxiomCheck, ...]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.checks:
            out[c.status] = out.get(c.status, 0) + 1
        return dict(sorted(out.items()))

    @property
    def all_passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_json(self) -> dict:
        return {"counts": self.counts(), "checks": [c.to_json() for c in self.checks]}


def _reversed(X: SemialgebraicSet) -> SemialgebraicSet:
    n = X.ambient
    swap = {v_symbol(i): v_symbol(n - 1 - i) for i in range(n)}
    f = map_atoms(X.to_formula(), lambda a: Atom(sympy.expand(a.term.xreplace(swap)), a.rel))
    return SemialgebraicSet.from_formula(n, f, X.base)


def _variant(X: SemialgebraicSet) -> SemialgebraicSet:
    """The same set written differently: every atom scaled by 2 and doubly negated."""
    f = map_atoms(X.to_formula(), lambda a: Not(Not(Atom(sympy.expand(2 * a.term), a.rel))))
    return SemialgebraicSet.from_formula(X.ambient, f, X.base)


def _dim1(X: SemialgebraicSet) -> dict:
    nonempty = decide(Quantified(Quant.EXISTS, tuple(X.variables()), X.to_formula())) if X.ambient else not is_empty(X)
    d = dim(X)
    if d.is_minus_infinity == nonempty:
        return {"ok": False, "dim": d.to_json(), "nonempty": nonempty}
    return {"ok": True, "dim": d.to_json()}


def _dim2(X: SemialgebraicSet, Y: SemialgebraicSet) -> dict:
    left = dim(X.union(Y))
    right = dim_max([dim(X), dim(Y)])
    return {"ok": left == right, "union": left.to_json(), "max": right.to_json()}


def _dim3(X: SemialgebraicSet) -> dict:
    a, b = dim(X), dim(_reversed(X))
    return {"ok": a == b, "dim": a.to_json(), "permuted": b.to_json()}


def _dim4(X: SemialgebraicSet) -> dict:
    parts = fiber_split(X)
    out: dict = {"ok": True}
    for ell, part in enumerate(parts):
        over = X.intersection(part.cylinder(X.ambient))
        lhs, rhs = dim(over), dim(part) + ell
        out[f"X({ell})"] = {"restricted": lhs.to_json(), "expected": rhs.to_json()}
        out["ok"] = out["ok"] and lhs == rhs
    return out


def _dim5(X: SemialgebraicSet) -> dict:
    x0, x1 = fiber_split(X)
    v0, v1 = fiber_split(_variant(X))
    ok = same_set(x0, v0) and same_set(x1, v1)
    out: dict = {"variant": ok}
    if X.ambient <= 2:
        formula = interval_formula(X)
        defined = SemialgebraicSet(X.ambient - 1, eliminate(formula, X.variables()[:-1]))
        out["interval_formula"] = same_set(defined, x1)
        ok = ok and out["interval_formula"]
    out["ok"] = ok
    return out


def instance_checks(index: int, X: SemialgebraicSet, partner: SemialgebraicSet | None = None) -> list[AxiomCheck]:
    """The axiom checks of one set; `partner` is the set Dim2 unites it with."""
    tests = [("Dim1", lambda: _dim1(X)), ("Dim3", lambda: _dim3(X))]
    if partner is not None:
        tests.append(("Dim2", lambda: _dim2(X, partner)))
    if X.ambient >= 1:
        tests.append(("Dim4", lambda: _dim4(X)))
        tests.append(("Dim5", lambda: _dim5(X)))
    checks: list[AxiomCheck] = []
    for axiom, run in tests:
        try:
            detail = run()
        except ResourceLimitError as exc:
            logger.debug("axiom %s on instance %d hit %s", axiom, index, exc.kind)
            checks.append(AxiomCheck(index, axiom, "resource-limit", {"kind": exc.kind, "message": str(exc)}))
            continue
        ok = detail.pop("ok")
        checks.append(AxiomCheck(index, axiom, "pass" if ok else "fail", detail))
        if not ok:
            logger.warning("axiom %s failed on instance %d: %s", axiom, index, X.to_text())
    return checks


def dim_partner(corpus: Sequence[SemialgebraicSet], i: int) -> SemialgebraicSet | None:
    return next((Y for Y in corpus[i + 1 :] if Y.ambient == corpus[i].ambient), None)


def verify_dim_axioms(corpus: Sequence[SemialgebraicSet]) -> AxiomReport:
    """Run the dimension axioms on every corpus set; a resource limit marks one check, not the run."""
    checks: list[AxiomCheck] = []
    base_ok = dim(SemialgebraicSet.full(1)) == DimensionValue(1) and dim(SemialgebraicSet.parse(1, "v0 = 0")) == DimensionValue(0)
    checks.append(AxiomCheck(-1, "Dim1", "pass" if base_ok else "fail", {"line": 1, "point": 0}))
    for i, X in enumerate(corpus):
        checks.extend(instance_checks(i, X, dim_partner(corpus, i)))
    return AxiomReport(tuple(checks))
