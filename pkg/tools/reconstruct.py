"""Offline solver that recovers structure templates from the trace tables.

Not part of the installed package: it needs python-sat, and its output is
frozen under ``src/ca93/data/structures``.

Unknowns are the idle state of every cell near the structure, the
orientation of every cell that appears in a trace header, and the states
over time of dynamic cells where no table row pins them.  A scenario starts
with the locomotive injected on a port, reaches the table's first row after
``prefix`` steps and runs ``extend`` steps past its last row, ending idle.
Along a chain of track cells the locomotive moves one cell per step, which
is imposed directly.  Soft clauses prefer white cells, so milestones the
tables do not force are left out.

Rules are added lazily.  After each solve every support cell is checked
under its chosen orientation; for the first local pattern (state, nine
neighbours, next state) missing from the table, a lemma says "not this
orientation, or one of these eleven bits differs".  With ``margin`` set,
every neighbour of a cell that is ever black joins the support, so the
white ring around a structure is checked as well.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field

from pysat.examples.rc2 import RC2
from pysat.formula import WCNF

from ca93.engine import oriented_neighbors
from ca93.ruleset import RuleTable
from ca93.tessellation import Cell, neighbors, parse_cell
from ca93.traces import TraceTable


def cells(text: str) -> list[Cell]:
    return [parse_cell(t) for t in text.replace(",", " ").split()]


@dataclass
class Scen:
    name: str
    inject: list[Cell]
    trace: TraceTable | None = None
    prefix: int = 0
    extend: int = 8
    color: str | None = None  # initial colour
    final_color: str | None = None
    entry_chains: list[list[Cell]] = field(default_factory=list)  # nothing enters p0
    chains: list[list[Cell]] = field(default_factory=list)  # p0 free
    visit: list[Cell] = field(default_factory=list)
    avoid: list[Cell] = field(default_factory=list)

    @property
    def rows(self) -> int:
        return len(self.trace.rows) if self.trace else 0

    @property
    def horizon(self) -> int:
        return self.prefix + self.rows + self.extend


@dataclass
class Problem:
    name: str
    scenarios: list[Scen]
    dynamic: list[Cell] = field(default_factory=list)
    units: dict[Cell, str] = field(default_factory=dict)
    color_cell: Cell | None = None
    orient: dict[Cell, int] = field(default_factory=dict)  # pinned header orientations
    margin: bool = False  # white cells next to black ones need rules too


class Solver:
    def __init__(self, problem: Problem, rules: RuleTable) -> None:
        self.problem = problem
        self.rules = rules
        self.sc = problem.scenarios
        self.headers = sorted({c for s in self.sc if s.trace for c in s.trace.header})
        dyn = set(self.headers) | set(problem.dynamic)
        for s in self.sc:
            for ch in s.chains + s.entry_chains:
                dyn.update(ch)
            dyn.update(s.inject)
        if problem.color_cell:
            dyn.add(problem.color_cell)
        self.dynamic = sorted(dyn)
        region = set(self.dynamic) | set(problem.units)
        for c in list(region):
            region.update(neighbors(c))
        self.inner = set(region)
        if problem.margin:
            for c in list(region):
                region.update(neighbors(c))
        self.region = sorted(region)
        self.nvars = 0
        self.x = {c: self._new() for c in self.region}
        self.o = {c: [self._new() for _ in range(9)] for c in self.region}
        self.dyn: dict[tuple[int, Cell, int], int] = {}
        self.wcnf = WCNF()
        self._build()

    def _new(self) -> int:
        self.nvars += 1
        return self.nvars

    def known(self, s: Scen, h: Cell, i: int) -> bool:
        """State of header cell ``h`` at row time ``i`` (0..rows)."""
        j = s.trace.header.index(h)
        T = len(s.trace.rows)
        if i < T:
            return self.rules[s.trace.rows[i][j]].current == "B"
        return self.rules[s.trace.rows[T - 1][j]].next == "B"

    def initial(self, s: Scen, c: Cell):
        if c in s.inject:
            return True
        if c == self.problem.color_cell and s.color:
            return s.color == "black"
        return self.x[c]

    def state(self, si: int, c: Cell, t: int):
        s = self.sc[si]
        if s.trace and c in s.trace.header and s.prefix <= t <= s.prefix + s.rows:
            return self.known(s, c, t - s.prefix)
        if c not in self.x:
            return False
        if c in self.dynamic:
            if t == 0:
                return self.initial(s, c)
            key = (si, c, t)
            if key not in self.dyn:
                self.dyn[key] = self._new()
            return self.dyn[key]
        if c == self.problem.color_cell and s.color:
            return s.color == "black"
        return self.x[c]

    def hard(self, clause: list) -> None:
        out = []
        for lit in clause:
            if lit is True:
                return
            if lit is False:
                continue
            out.append(lit)
        if not out:
            raise RuntimeError("empty clause")
        self.wcnf.append(out)

    def equal(self, a, b) -> None:
        if isinstance(a, bool) and isinstance(b, bool):
            if a != b:
                raise RuntimeError("contradiction")
            return
        if isinstance(a, bool):
            a, b = b, a
        if isinstance(b, bool):
            self.hard([a if b else -a])
        else:
            self.hard([-a, b])
            self.hard([a, -b])

    def _build(self) -> None:
        for c in self.region:
            lits = self.o[c]
            self.wcnf.append(lits)
            for a, b in itertools.combinations(lits, 2):
                self.wcnf.append([-a, -b])
            if c in self.problem.orient:
                self.hard([lits[self.problem.orient[c]]])
        for c, st in self.problem.units.items():
            self.hard([self.x[c] if st == "B" else -self.x[c]])
        for c in self.region:
            if c not in self.inner:
                self.hard([-self.x[c]])
        if self.problem.color_cell:
            self.hard([self.x[self.problem.color_cell]])
        for si, s in enumerate(self.sc):
            for c in s.inject:
                self.hard([-self.x[c]])
            if s.trace:
                for i, row in enumerate(s.trace.rows):
                    t = s.prefix + i
                    for j, h in enumerate(s.trace.header):
                        r = self.rules[row[j]]
                        for k in range(9):
                            nb = oriented_neighbors(h, k)
                            for m in range(9):
                                lit = self.state(si, nb[m], t)
                                want = r.nbhd[m] == "B"
                                if isinstance(lit, bool):
                                    if lit != want:
                                        self.hard([-self.o[h][k]])
                                else:
                                    self.hard([-self.o[h][k], lit if want else -lit])
                if s.prefix == 0:
                    for h in s.trace.header:
                        self.equal(self.initial(s, h), self.known(s, h, 0))
            H = s.horizon
            for ch in s.entry_chains:
                for t in range(H):
                    self.equal(self.state(si, ch[0], t + 1), False)
            for ch in s.entry_chains + s.chains:
                for a, b in zip(ch, ch[1:]):
                    for t in range(H):
                        self.equal(self.state(si, b, t + 1), self.state(si, a, t))
            for c in self.dynamic:
                want = self.x[c]
                if c == self.problem.color_cell and s.final_color:
                    want = s.final_color == "black"
                self.equal(self.state(si, c, H), want)
            for c in s.visit:
                self.hard([self.state(si, c, t) for t in range(H + 1)])
            for c in s.avoid:
                for t in range(H + 1):
                    self.equal(self.state(si, c, t), False)
        for c in self.region:
            if c not in self.problem.units:
                self.wcnf.append([-self.x[c]], weight=1)

    # ---- model interpretation ----
    def value(self, model: set[int], lit) -> bool:
        if isinstance(lit, bool):
            return lit
        return lit in model if lit > 0 else -lit not in model

    def trajectories(self, model: set[int]):
        return [
            {c: [self.value(model, self.state(si, c, t)) for t in range(s.horizon + 1)] for c in self.region}
            for si, s in enumerate(self.sc)
        ]

    def idle_variants(self, model: set[int]):
        base = {c: self.value(model, self.x[c]) for c in self.region}
        variants = [base]
        if self.problem.color_cell:
            white = dict(base)
            white[self.problem.color_cell] = False
            variants.append(white)
        return variants

    def bits(self, si: int | None, c: Cell, k: int, t: int, idle_white: bool = False):
        """Literals (cur, nbhd by rule side, next) of ``c`` at time ``t``.

        With ``si`` None the idle configuration is read (next = cur).
        """
        nb = oriented_neighbors(c, k)
        if si is None:
            def st(n):
                if n not in self.x:
                    return False
                if idle_white and n == self.problem.color_cell:
                    return False
                return self.x[n]
            cur = st(c)
            return [cur] + [st(n) for n in nb] + [cur]
        return ([self.state(si, c, t)] + [self.state(si, n, t) for n in nb]
                + [self.state(si, c, t + 1)])

    def fits(self, model: set[int], lits) -> bool:
        v = ["B" if self.value(model, lit) else "W" for lit in lits]
        return self.rules.lookup(v[0], "".join(v[1:10])) == v[10]

    def witness(self, model: set[int], c: Cell, k: int):
        """First local pattern of ``c`` under orientation ``k`` the table lacks."""
        variants = [False, True] if self.problem.color_cell else [False]
        for w in variants:
            lits = self.bits(None, c, k, 0, w)
            if not self.fits(model, lits):
                return lits
        for si, s in enumerate(self.sc):
            for t in range(s.horizon):
                lits = self.bits(si, c, k, t)
                if not self.fits(model, lits):
                    return lits
        return None

    def lemma(self, model: set[int], c: Cell, k: int, lits) -> list[int]:
        out = [-self.o[c][k]]
        for lit in lits:
            if isinstance(lit, bool):
                continue
            out.append(-lit if self.value(model, lit) else lit)
        return out

    def support_of(self, model: set[int]) -> set[Cell]:
        sup = set(self.dynamic)
        for c in self.region:
            if self.value(model, self.x[c]):
                sup.add(c)
        if self.problem.margin:
            black = {c for c in self.region if self.value(model, self.x[c])}
            for si in range(len(self.sc)):
                black.update(c for c in self.dynamic if "B" in self.trajectory(model, si, c))
            for c in black:
                sup.update(n for n in neighbors(c) if n in self.x)
        return sup

    def valid_orientations(self, model: set[int], c: Cell) -> list[int]:
        return [k for k in range(9) if self.witness(model, c, k) is None]

    def solve(self, max_rounds: int = 2000, verbose: bool = True):
        rc2 = RC2(self.wcnf)
        for rnd in range(max_rounds):
            m = rc2.compute()
            if m is None:
                return None
            model = {v for v in m if v > 0}
            support = self.support_of(model)
            bad = []
            for c in sorted(support):
                k = next(k for k in range(9) if self.o[c][k] in model)
                w = self.witness(model, c, k)
                if w is not None:
                    bad.append(c)
                    rc2.add_clause(self.lemma(model, c, k, w))
            if verbose and (rnd % 20 == 0 or not bad):
                nb = sum(self.value(model, self.x[c]) for c in self.region)
                print(f"round {rnd}: cost {rc2.cost}, {nb} black, {len(bad)} bad {[str(b) for b in bad[:8]]}",
                      file=sys.stderr)
            if not bad:
                orient = {c: next(k for k in range(9) if self.o[c][k] in model) for c in support}
                return model, support, orient
        return None

    def trajectory(self, model: set[int], si: int, c: Cell) -> str:
        return "".join("B" if self.value(model, self.state(si, c, t)) else "."
                       for t in range(self.sc[si].horizon + 1))
