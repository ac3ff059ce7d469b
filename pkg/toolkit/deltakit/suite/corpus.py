"""Corpus files: one formula per line, `#` comments.

A line `set N: <formula>` is a semialgebraic set in K^N written over v0..v(N-1); any other
line is a quantifier-free differential formula.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from toolkit.deltakit.core.errors import FormulaSyntaxError
from toolkit.deltakit.engine.sets import SemialgebraicSet
from toolkit.deltakit.formula.ast import Formula
from toolkit.deltakit.formula.parse import parse, parse_or
from toolkit.deltakit.formula.star import formula_windows

_SET_LINE = re.compile(r"^set\s+(\d+)\s*:\s*(.*)$")

BUNDLED_CORPUS = Path(__file__).resolve().parent / "data" / "corpus.txt"
BUNDLED_BATTERY = Path(__file__).resolve().parent / "data" / "battery.txt"


@dataclass(frozen=True)
class CorpusEntry:
    index: int
    line: int
    text: str
    formula: Formula
    ambient: int | None = None

    @property
    def is_set(self) -> bool:
        return self.ambient is not None

    @property
    def indeterminates(self) -> list[int]:
        return [] if self.is_set else sorted(formula_windows(self.formula))

    def as_set(self) -> SemialgebraicSet:
        if self.ambient is None:
            raise ValueError(f"corpus entry {self.index} is not a semialgebraic set")
        return SemialgebraicSet.from_formula(self.ambient, self.formula)

    def to_json(self) -> dict:
        out: dict = {"index": self.index, "text": self.text}
        if self.ambient is not None:
            out["ambient"] = self.ambient
        return out


def _entry(index: int, lineno: int, text: str) -> CorpusEntry:
    m = _SET_LINE.match(text)
    try:
        if m:
            return CorpusEntry(index, lineno, m.group(2).strip(), parse_or(m.group(2)), int(m.group(1)))
        return CorpusEntry(index, lineno, text, parse(text))
    except FormulaSyntaxError as exc:
        raise type(exc)(exc.message, line=lineno, column=exc.column) from exc


def parse_corpus(lines: Iterable[str]) -> list[CorpusEntry]:
    entries: list[CorpusEntry] = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if text:
            entries.append(_entry(len(entries), lineno, text))
    return entries


def load_corpus(path: str | Path = BUNDLED_CORPUS) -> list[CorpusEntry]:
    return parse_corpus(Path(path).read_text(encoding="utf-8").splitlines())
