from __future__ import annotations

import contextlib
import contextvars
import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import sympy

from toolkit.deltakit.core.config import Settings
from toolkit.deltakit.core.errors import ResourceLimitError

logger = logging.getLogger("deltakit.budget")

_ACTIVE: contextvars.ContextVar["ResourceBudget | None"] = contextvars.ContextVar("deltakit_budget", default=None)


@dataclass
class ResourceBudget:
    max_degree: int = 4
    max_vars: int = 8
    max_jet_order: int = 3
    timeout_seconds: float | None = None
    max_tower_degree: int = 64
    _deadline: float | None = field(default=None, init=False, repr=False)

    @classmethod
    def from_settings(cls, settings: Settings) -> "ResourceBudget":
        return cls(
            max_degree=settings.max_degree,
            max_vars=settings.max_vars,
            max_jet_order=settings.max_jet_order,
            timeout_seconds=settings.timeout_seconds,
        )

    @contextlib.contextmanager
    def activate(self) -> Iterator["ResourceBudget"]:
        if self.timeout_seconds is not None:
            self._deadline = time.monotonic() + self.timeout_seconds
        token = _ACTIVE.set(self)
        try:
            yield self
        finally:
            _ACTIVE.reset(token)
            self._deadline = None

    def _exhausted(self, message: str, kind: str) -> ResourceLimitError:
        logger.warning("budget exhausted (%s): %s", kind, message)
        return ResourceLimitError(message, kind=kind)

    def remaining(self) -> float | None:
        if self._deadline is None:
            return None
        return self._deadline - time.monotonic()

    def check_deadline(self) -> None:
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise self._exhausted(f"time budget of {self.timeout_seconds}s exceeded", "timeout")

    def check_vars(self, count: int) -> None:
        if count > self.max_vars:
            raise self._exhausted(
                f"{count} variables exceed the limit of {self.max_vars}",
                "variables",
            )

    def check_polys(self, polys: Iterable[sympy.Expr]) -> None:
        for p in polys:
            expr = sympy.sympify(p)
            symbols = sorted(expr.free_symbols, key=str)
            if not symbols:
                continue
            degree = sympy.Poly(expr, *symbols).total_degree()
            if degree > self.max_degree:
                raise self._exhausted(
                    f"degree {degree} of {expr} exceeds the limit of {self.max_degree}",
                    "degree",
                )

    def check_tower_degree(self, degree: int) -> None:
        if degree > self.max_tower_degree:
            raise self._exhausted(
                f"tower element degree {degree} exceeds the limit of {self.max_tower_degree}",
                "tower-degree",
            )

    def check_jet_order(self, order: int) -> None:
        if order > self.max_jet_order:
            raise self._exhausted(
                f"jet order {order} exceeds the limit of {self.max_jet_order}",
                "jet-order",
            )


_UNLIMITED = ResourceBudget(
    max_degree=10**6, max_vars=10**6, max_jet_order=10**6, timeout_seconds=None, max_tower_degree=10**6
)


def current_budget() -> ResourceBudget:
    budget = _ACTIVE.get()
    return budget if budget is not None else _UNLIMITED


def checkpoint() -> None:
    current_budget().check_deadline()
