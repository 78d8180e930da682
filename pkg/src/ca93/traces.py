"""Execution-trace tables and the replay verifier.

A trace file is CSV preceded by ``# key: value`` metadata lines.  The first
CSV row is ``step`` followed by cell addresses; every later row holds the
printed step label and one rule id per cell.  A ``*`` suffix marks an entry
printed in red, i.e. a rule that changes the state of the cell.

Row ``k`` (counting from 1 in file order) is the rule applied to the
configuration at time ``k - 1``; time 0 is the idle structure with the
locomotive placed on the ``start`` cells.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from ca93.engine import Configuration, StepLog, run
from ca93.ruleset import RuleTable
from ca93.tessellation import Cell, parse_cell


class TraceParseError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    structure: str
    kind: str  # simple | double | signal
    start: tuple[Cell, ...]
    color: str | None = None  # black | white
    direction: str | None = None  # cw | ccw, track test only


@dataclass
class TraceTable:
    name: str
    scenario: Scenario
    header: tuple[Cell, ...]
    rows: list[tuple[int, ...]]
    marks: set[tuple[int, int]] = field(default_factory=set)  # (row index, column)
    labels: list[str] = field(default_factory=list)
    caption: str = ""

    def column(self, c: Cell) -> list[int]:
        j = self.header.index(c)
        return [row[j] for row in self.rows]

    def marked(self, step: int, c: Cell) -> bool:
        """Red mark at 1-based ``step`` for cell ``c``."""
        return (step - 1, self.header.index(c)) in self.marks


@dataclass
class Mismatch:
    step: int
    cell: Cell
    expected: int | str
    actual: int | str

    def __str__(self) -> str:
        return f"step {self.step}, cell {self.cell}: expected {self.expected}, got {self.actual}"


@dataclass
class VerificationReport:
    name: str
    rows: int
    cells: int
    mismatches: list[Mismatch] = field(default_factory=list)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return not self.mismatches and self.error is None

    @property
    def status(self) -> str:
        return "Pass" if self.passed else "Fail"

    @property
    def first(self) -> Mismatch | None:
        return self.mismatches[0] if self.mismatches else None

    def __str__(self) -> str:
        head = f"{self.name}: {self.status} ({self.rows} rows x {self.cells} cells)"
        if self.error:
            return f"{head}: {self.error}"
        if self.mismatches:
            return f"{head}: first mismatch at {self.first}"
        return head


_META_KEYS = {"name", "caption", "structure", "direction", "color", "kind", "start"}


def parse_trace(text: str, rules: RuleTable | None = None) -> TraceTable:
    """Parse a trace file; with ``rules`` given, unknown rule ids are errors."""
    meta: dict[str, str] = {}
    body: list[str] = []
    for raw in text.splitlines():
        s = raw.strip()
        if s.startswith("#"):
            key, sep, value = s[1:].partition(":")
            if sep and key.strip() in _META_KEYS:
                meta[key.strip()] = value.strip()
        elif s:
            body.append(s)
    if not body:
        raise TraceParseError("no header row")
    records = list(csv.reader(body))
    head = records[0]
    if not head or head[0].strip() != "step":
        raise TraceParseError("header must start with 'step'")
    try:
        header = tuple(parse_cell(h) for h in head[1:])
    except ValueError as exc:
        raise TraceParseError(str(exc)) from None
    if len(set(header)) != len(header):
        raise TraceParseError("a cell appears twice in the header")
    rows: list[tuple[int, ...]] = []
    labels: list[str] = []
    marks: set[tuple[int, int]] = set()
    for i, rec in enumerate(records[1:]):
        if len(rec) != len(head):
            raise TraceParseError(f"row {i + 1}: expected {len(head)} fields, got {len(rec)}")
        labels.append(rec[0].strip())
        ids = []
        for j, v in enumerate(rec[1:]):
            v = v.strip()
            if v.endswith("*"):
                marks.add((i, j))
                v = v[:-1]
            if not v.isdigit():
                raise TraceParseError(f"row {i + 1}: bad rule id {v!r}")
            rid = int(v)
            if rules is not None and rid not in rules:
                raise TraceParseError(f"row {i + 1}: unknown rule id {rid}")
            ids.append(rid)
        rows.append(tuple(ids))
    try:
        start = tuple(parse_cell(s) for s in meta.get("start", "").split())
    except ValueError as exc:
        raise TraceParseError(str(exc)) from None
    scenario = Scenario(
        structure=meta.get("structure", ""),
        kind=meta.get("kind", "simple"),
        start=start,
        color=meta.get("color") or None,
        direction=meta.get("direction") or None,
    )
    return TraceTable(meta.get("name", ""), scenario, header, rows, marks, labels, meta.get("caption", ""))


def format_trace(tr: TraceTable) -> str:
    sc = tr.scenario
    out = [f"# name: {tr.name}"]
    if tr.caption:
        out.append(f"# caption: {tr.caption}")
    out.append(f"# structure: {sc.structure}")
    if sc.direction:
        out.append(f"# direction: {sc.direction}")
    if sc.color:
        out.append(f"# color: {sc.color}")
    out.append(f"# kind: {sc.kind}")
    out.append("# start: " + " ".join(map(str, sc.start)))
    out.append(",".join(["step"] + [str(c) for c in tr.header]))
    for i, row in enumerate(tr.rows):
        label = tr.labels[i] if i < len(tr.labels) else str(i + 1)
        cells = [f"{rid}*" if (i, j) in tr.marks else str(rid) for j, rid in enumerate(row)]
        out.append(",".join([label] + cells))
    return "\n".join(out) + "\n"


def load_trace(path: str | Path, rules: RuleTable | None = None) -> TraceTable:
    return parse_trace(Path(path).read_text(encoding="utf-8"), rules)


def catalog(rules: RuleTable | None = None) -> list[TraceTable]:
    """Every shipped trace, one per table half, sorted by name."""
    from ca93.data import data_path

    files = sorted(data_path("traces").glob("*.csv"))
    return [load_trace(p, rules) for p in files]


def get_trace(name: str, rules: RuleTable | None = None) -> TraceTable:
    for tr in catalog(rules):
        if tr.name == name:
            return tr
    raise KeyError(f"unknown trace {name!r}")


def initial_configuration(tr: TraceTable) -> tuple[Configuration, Configuration]:
    """(idle template, configuration at time 0) for the trace's scenario."""
    from ca93 import structures

    sc = tr.scenario
    tmpl = structures.build(sc.structure, color=sc.color, direction=sc.direction)
    cfg = tmpl.idle.with_states({c: "B" for c in sc.start})
    return tmpl.idle, cfg


def compare(tr: TraceTable, log: StepLog, rules: RuleTable) -> VerificationReport:
    """Check applied rule ids and red marks of ``log`` against ``tr``."""
    rep = VerificationReport(tr.name, len(tr.rows), len(tr.header))
    for i, row in enumerate(tr.rows):
        t = i + 1
        if i >= len(log.applied):
            rep.error = str(log.missing) if log.missing else f"run stopped before step {t}"
            break
        applied = log.applied[i]
        before, after = log.config_at(i), log.config_at(t)
        for j, c in enumerate(tr.header):
            got = applied.get(c)
            if got is None:
                rep.mismatches.append(Mismatch(t, c, row[j], "outside support"))
                continue
            if got != row[j]:
                rep.mismatches.append(Mismatch(t, c, row[j], got))
                continue
            changed = before.state(c) != after.state(c)
            if changed != ((i, j) in tr.marks):
                want = "red" if (i, j) in tr.marks else "unmarked"
                rep.mismatches.append(Mismatch(t, c, want, "state change" if changed else "no change"))
    return rep


def verify(tr: TraceTable, rules: RuleTable) -> VerificationReport:
    """Replay the trace's scenario and compare it row by row."""
    unknown = sorted({rid for row in tr.rows for rid in row if rid not in rules})
    if unknown:
        return VerificationReport(tr.name, len(tr.rows), len(tr.header),
                                  error="rule ids missing from the table: " + ", ".join(map(str, unknown)))
    try:
        _, cfg = initial_configuration(tr)
    except (KeyError, ValueError) as exc:
        return VerificationReport(tr.name, len(tr.rows), len(tr.header), error=str(exc))
    log = run(cfg, rules, len(tr.rows))
    return compare(tr, log, rules)


def check_marks(tr: TraceTable, rules: RuleTable) -> list[tuple[int, Cell]]:
    """Entries whose red mark disagrees with the rule's own current/next."""
    bad = []
    for i, row in enumerate(tr.rows):
        for j, rid in enumerate(row):
            if rules[rid].changes != ((i, j) in tr.marks):
                bad.append((i + 1, tr.header[j]))
    return bad


def report_text(reports: list[VerificationReport]) -> str:
    lines = [str(r) for r in reports]
    passed = sum(r.passed for r in reports)
    lines.append(f"{passed}/{len(reports)} traces pass")
    return "\n".join(lines) + "\n"


def report_csv(reports: list[VerificationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "status", "rows", "cells", "step", "cell", "expected", "actual", "error"])
    for r in reports:
        m = r.first
        w.writerow([
            r.name, r.status, r.rows, r.cells,
            m.step if m else "", str(m.cell) if m else "",
            m.expected if m else "", m.actual if m else "",
            r.error or "",
        ])
    return buf.getvalue()
