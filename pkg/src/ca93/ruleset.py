"""The rule table: parsing, exact lookup, coherence and rotation analysis.

A rule reads ``id CURRENT NEIGHBOURS NEXT`` where NEIGHBOURS is a word of
nine letters over ``W``/``B`` giving the states of the neighbours on rule
sides 1..9 of the cell.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

STATES = ("W", "B")


class RuleParseError(ValueError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Rule:
    id: int
    current: str
    nbhd: str
    next: str

    def __post_init__(self) -> None:
        if self.current not in STATES or self.next not in STATES:
            raise ValueError(f"rule {self.id}: states must be W or B")
        if len(self.nbhd) != 9 or set(self.nbhd) - set(STATES):
            raise ValueError(f"rule {self.id}: neighbourhood must be 9 letters W/B")

    @property
    def key(self) -> str:
        return self.current + self.nbhd

    @property
    def changes(self) -> bool:
        return self.current != self.next

    def __str__(self) -> str:
        return f"{self.id} {self.current} {self.nbhd} {self.next}"


@dataclass(frozen=True)
class Conflict:
    first: Rule
    second: Rule
    redundant: bool  # same pattern and same outcome


@dataclass
class RotationReport:
    classes: list[list[int]]
    incompatible: list[list[int]]
    collapsed_count: int


class RuleTable:
    """Immutable ordered collection of rules indexed by pattern."""

    def __init__(self, rules: Iterable[Rule]) -> None:
        self.rules: tuple[Rule, ...] = tuple(rules)
        self._by_id: dict[int, Rule] = {}
        self._by_key: dict[str, Rule] = {}
        for r in self.rules:
            if r.id in self._by_id:
                raise ValueError(f"duplicate rule id {r.id}")
            self._by_id[r.id] = r
            self._by_key.setdefault(r.key, r)

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __contains__(self, rule_id: object) -> bool:
        return rule_id in self._by_id

    def __getitem__(self, rule_id: int) -> Rule:
        return self._by_id[rule_id]

    def match(self, current: str, nbhd: str | Sequence[str]) -> Rule | None:
        """The first rule whose pattern is (current, nbhd), or None."""
        return self._by_key.get(current + "".join(nbhd))

    def lookup(self, current: str, nbhd: str | Sequence[str]) -> str | None:
        """Next state for the pattern; None means no rule covers it."""
        r = self.match(current, nbhd)
        return None if r is None else r.next


def parse_rule_table(text: str) -> RuleTable:
    rules: list[Rule] = []
    seen: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise RuleParseError(lineno, f"expected 'id CURRENT NBHD NEXT', got {raw!r}")
        rid, cur, nbhd, nxt = parts
        if not rid.isdigit():
            raise RuleParseError(lineno, f"bad rule id {rid!r}")
        try:
            rule = Rule(int(rid), cur, nbhd, nxt)
        except ValueError as exc:
            raise RuleParseError(lineno, str(exc)) from None
        if rule.id in seen:
            raise RuleParseError(lineno, f"duplicate rule id {rule.id}")
        seen.add(rule.id)
        rules.append(rule)
    return RuleTable(rules)


def format_rule_table(table: RuleTable) -> str:
    return "".join(f"{r}\n" for r in table)


def load_rule_table(path: str | Path | None = None) -> RuleTable:
    """Read a rule file; with no path, the table shipped with the package."""
    if path is None:
        from ca93.data import data_path

        path = data_path("rules_93.txt")
    return parse_rule_table(Path(path).read_text(encoding="utf-8"))


def check_coherence(table: RuleTable) -> list[Conflict]:
    """Pairs of rules sharing a pattern; ``redundant`` marks equal outcomes.

    The table is coherent when no returned pair has ``redundant == False``.
    """
    groups: dict[str, list[Rule]] = defaultdict(list)
    for r in table:
        groups[r.key].append(r)
    out = []
    for members in groups.values():
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                out.append(Conflict(a, b, a.next == b.next))
    return out


def conflicts(table: RuleTable) -> list[Conflict]:
    return [c for c in check_coherence(table) if not c.redundant]


def rotations(nbhd: str) -> list[str]:
    return [nbhd[k:] + nbhd[:k] for k in range(9)]


def rotation_class_key(rule: Rule) -> tuple[str, str]:
    return rule.current, min(rotations(rule.nbhd))


def rotation_analysis(table: RuleTable) -> RotationReport:
    """Group rules whose patterns are circular rotations of one another.

    A class whose members disagree on the next state is a witness that the
    automaton is not rotation invariant.  ``collapsed_count`` is the number
    of rules left once every class keeps one rule per distinct outcome.
    """
    groups: dict[tuple[str, str], list[Rule]] = defaultdict(list)
    for r in table:
        groups[rotation_class_key(r)].append(r)
    classes = [[r.id for r in g] for g in groups.values()]
    incompatible = [[r.id for r in g] for g in groups.values() if len({r.next for r in g}) > 1]
    collapsed = sum(len({r.next for r in g}) for g in groups.values())
    return RotationReport(classes, incompatible, collapsed)
