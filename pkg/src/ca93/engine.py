"""Synchronous evolution of a finite-support configuration.

Every cell of the support carries a state and an orientation.  The
orientation is the offset ``k`` (0..8) such that rule side ``i`` of the
cell is its canonical side ``(k + i - 1) mod 9 + 1``.  Cells outside the
support are white and never change.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from ca93.ruleset import RuleTable
from ca93.tessellation import Cell, neighbors, parse_cell

W, B = "W", "B"


class MissingRule(Exception):
    """No rule of the table matches the neighbourhood of a support cell."""

    def __init__(self, cell: Cell, current: str, nbhd: str, step: int | None = None) -> None:
        self.cell = cell
        self.current = current
        self.nbhd = nbhd
        self.step = step
        where = f"step {step}, " if step is not None else ""
        super().__init__(f"no rule for {where}cell {cell}: {current} {nbhd}")


class ConfigParseError(ValueError):
    pass


def oriented_neighbors(c: Cell, offset: int) -> tuple[Cell, ...]:
    """Neighbours of ``c`` listed by rule side 1..9 under ``offset``."""
    nb = neighbors(c)
    return nb[offset:] + nb[:offset]


@dataclass(frozen=True)
class Configuration:
    """States and orientations over a finite support; W outside it."""

    states: Mapping[Cell, str]
    orientation: Mapping[Cell, int]

    def __post_init__(self) -> None:
        if set(self.states) != set(self.orientation):
            raise ValueError("every support cell needs both a state and an orientation")
        for c, s in self.states.items():
            if s not in (W, B):
                raise ValueError(f"bad state {s!r} at {c}")
        for c, k in self.orientation.items():
            if not 0 <= k <= 8:
                raise ValueError(f"orientation of {c} must be in 0..8, got {k}")

    @classmethod
    def empty(cls) -> "Configuration":
        return cls({}, {})

    @property
    def support(self) -> frozenset[Cell]:
        return frozenset(self.states)

    def state(self, c: Cell) -> str:
        return self.states.get(c, W)

    def black_cells(self) -> frozenset[Cell]:
        return frozenset(c for c, s in self.states.items() if s == B)

    def with_states(self, changes: Mapping[Cell, str]) -> "Configuration":
        for c in changes:
            if c not in self.states:
                raise KeyError(f"{c} is outside the support")
        return Configuration({**self.states, **changes}, self.orientation)

    def same_states(self, other: "Configuration") -> bool:
        return self.black_cells() == other.black_cells()

    def diff(self, other: "Configuration") -> set[Cell]:
        return set(self.black_cells() ^ other.black_cells())


def neighborhood_of(cfg: Configuration, c: Cell) -> tuple[str, str]:
    """(current state, 9-letter neighbourhood in rule-side order)."""
    if c not in cfg.states:
        raise KeyError(f"{c} is outside the support")
    nb = oriented_neighbors(c, cfg.orientation[c])
    return cfg.states[c], "".join(cfg.state(n) for n in nb)


class _Kernel:
    """Index arrays for one support and orientation, reused across steps."""

    def __init__(self, cfg: Configuration) -> None:
        self.cells = sorted(cfg.states)
        index = {c: i for i, c in enumerate(self.cells)}
        outside = len(self.cells)
        self.nbr = [
            [index.get(n, outside) for n in oriented_neighbors(c, cfg.orientation[c])]
            for c in self.cells
        ]


_KERNELS: dict[int, tuple[Configuration, _Kernel]] = {}


def _kernel(cfg: Configuration) -> _Kernel:
    key = id(cfg.orientation)
    hit = _KERNELS.get(key)
    if hit is not None and hit[0].orientation is cfg.orientation:
        return hit[1]
    k = _Kernel(cfg)
    if len(_KERNELS) > 64:
        _KERNELS.clear()
    _KERNELS[key] = (cfg, k)
    return k


@dataclass
class StepLog:
    """Initial configuration, then per step the applied rules and result."""

    initial: Configuration
    applied: list[dict[Cell, int]] = field(default_factory=list)
    configs: list[Configuration] = field(default_factory=list)
    missing: MissingRule | None = None

    def __len__(self) -> int:
        return len(self.configs)

    @property
    def ok(self) -> bool:
        return self.missing is None

    @property
    def final(self) -> Configuration:
        return self.configs[-1] if self.configs else self.initial

    def config_at(self, t: int) -> Configuration:
        """Configuration at time ``t``; time 0 is the initial one."""
        return self.initial if t == 0 else self.configs[t - 1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "cell", "rule_id", "new_state"])
        for t, (rules, cfg) in enumerate(zip(self.applied, self.configs), 1):
            for c in sorted(rules):
                w.writerow([t, str(c), rules[c], cfg.states[c]])
        return buf.getvalue()


def step(cfg: Configuration, table: RuleTable) -> tuple[Configuration, dict[Cell, int]]:
    """One synchronous step; raises MissingRule naming the first bad cell."""
    k = _kernel(cfg)
    cur = [cfg.states[c] for c in k.cells]
    cur.append(W)
    new: dict[Cell, str] = {}
    applied: dict[Cell, int] = {}
    for i, c in enumerate(k.cells):
        nbhd = "".join([cur[j] for j in k.nbr[i]])
        rule = table.match(cur[i], nbhd)
        if rule is None:
            raise MissingRule(c, cur[i], nbhd)
        new[c] = rule.next
        applied[c] = rule.id
    return Configuration(new, cfg.orientation), applied


def run(cfg: Configuration, table: RuleTable, steps: int) -> StepLog:
    """Iterate ``step``; a MissingRule stops the run and is kept in the log."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    log = StepLog(cfg)
    for t in range(1, steps + 1):
        try:
            cfg, applied = step(cfg, table)
        except MissingRule as exc:
            exc.step = t
            exc.args = (f"no rule for step {t}, cell {exc.cell}: {exc.current} {exc.nbhd}",)
            log.missing = exc
            break
        log.applied.append(applied)
        log.configs.append(cfg)
    return log


def locomotive_positions(log: StepLog, idle: Configuration) -> list[frozenset[Cell]]:
    """Per time 0..n, the cells whose state differs from ``idle``."""
    ref = idle.black_cells()
    return [frozenset(log.config_at(t).black_cells() ^ ref) for t in range(len(log) + 1)]


def classify_cells(cells: Iterable[Cell]) -> str | None:
    """``"simple"`` for one cell, ``"double"`` for two adjacent ones, else None."""
    cs = list(cells)
    if len(cs) == 1:
        return "simple"
    if len(cs) == 2 and cs[1] in neighbors(cs[0]):
        return "double"
    return None


def parse_configuration(text: str) -> Configuration:
    """Lines ``address STATE offset``; ``#`` starts a comment."""
    states: dict[Cell, str] = {}
    orient: dict[Cell, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ConfigParseError(f"line {lineno}: expected 'address STATE offset'")
        try:
            c = parse_cell(parts[0])
            k = int(parts[2])
        except ValueError as exc:
            raise ConfigParseError(f"line {lineno}: {exc}") from None
        if parts[1] not in (W, B) or not 0 <= k <= 8:
            raise ConfigParseError(f"line {lineno}: bad state or offset")
        if c in states:
            raise ConfigParseError(f"line {lineno}: {c} listed twice")
        states[c], orient[c] = parts[1], k
    return Configuration(states, orient)


def format_configuration(cfg: Configuration) -> str:
    return "".join(f"{c} {cfg.states[c]} {cfg.orientation[c]}\n" for c in sorted(cfg.states))


def load_configuration(path: str | Path) -> Configuration:
    return parse_configuration(Path(path).read_text(encoding="utf-8"))
