"""The seven acceptance criteria, one test each.

Every test records a one-line verdict that is printed in the pytest summary
(section "acceptance criteria").  Running this file directly prints the same
lines and exits non-zero if any criterion fails.
"""

from __future__ import annotations

import sys
import time
import warnings
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from ca93 import structures  # noqa: E402
from ca93.engine import locomotive_positions, run  # noqa: E402
from ca93.render import EDGE_TOL, edge_mismatch, geometric_adjacency, layout, render_svg, role_tints  # noqa: E402
from ca93.ruleset import check_coherence, load_rule_table, rotation_analysis  # noqa: E402
from ca93.tessellation import CENTER, cells_within, level_count, neighbors, parse_cell  # noqa: E402
from ca93.traces import catalog, initial_configuration, verify  # noqa: E402
from oracles import brute_level_counts  # noqa: E402

TITLES = {
    1: "rule-table integrity",
    2: "trace replay",
    3: "idle stability",
    4: "behavioural contracts",
    5: "tessellation properties",
    6: "locomotive kinematics",
    7: "rendering",
}

# quoted path lists that are not template ports
EXTRA_PATHS = [
    "1(5) 2(5) 11(5) 12(5) 13(5)",
    "1(1) 1(2) 1(3) 1(4)",
    "1(8) 1(7) 1(6) 1(5)",
    "2(5) 11(5)",
]


def _verdict(n: int, ok: bool, detail: str, seconds: float) -> str:
    return f"criterion {n} {TITLES[n]}: {'PASS' if ok else 'FAIL'} ({seconds:.2f} s) {detail}"


def criterion_1():
    t0 = time.perf_counter()
    rules = load_rule_table()
    bad = [c for c in check_coherence(rules) if not c.redundant]
    rep = rotation_analysis(rules)
    witness = any({199, 201} <= set(c) for c in rep.incompatible)
    dt = time.perf_counter() - t0
    ok = len(rules) == 281 and not bad and witness and dt < 1
    return ok, (f"{len(rules)} rules, {len(bad)} conflicts, {len(rep.incompatible)} rotation-incompatible "
                f"classes, 199/201 flagged: {witness}"), dt


def criterion_2():
    t0 = time.perf_counter()
    rules = load_rule_table()
    reports = [verify(t, rules) for t in catalog(rules)]
    dt = time.perf_counter() - t0
    failed = [str(r) for r in reports if not r.passed]
    tables = {r.name.split("_")[0] for r in reports}
    ok = not failed and len(reports) == 23 and len(tables) == 18 and dt < 5
    detail = f"{len(reports) - len(failed)}/{len(reports)} traces from {len(tables)} tables pass"
    if failed:
        detail += "; " + failed[0]
    return ok, detail, dt


def criterion_3():
    t0 = time.perf_counter()
    rules = load_rule_table()
    bad = []
    variants = [(k, None) for k in structures.template_keys()]
    variants += [("controller", "white"), ("sensor", "white")]
    for key, color in variants:
        tmpl = structures.build(key, color=color)
        log = run(tmpl.idle, rules, 50)
        if not log.ok or any(c.diff(tmpl.idle) for c in log.configs):
            bad.append(f"{key}/{color or 'default'}")
    dt = time.perf_counter() - t0
    n = len(structures.template_keys())
    ok = not bad and n == 8
    return ok, f"{n} templates (+2 colour variants) fixed for 50 steps" + (f"; unstable: {bad}" if bad else ""), dt


# (structure, colour, port, kind) -> (exit outcomes, final colour)
CONTRACTS = [
    (("fixed_switch", None, "left", "simple"), ({"exit": "simple"}, None)),
    (("fixed_switch", None, "left", "double"), ({"exit": "double"}, None)),
    (("fixed_switch", None, "right", "simple"), ({"exit": "simple"}, None)),
    (("fixed_switch", None, "right", "double"), ({"exit": "double"}, None)),
    (("doubler", None, "entry", "simple"), ({"exit": "double"}, None)),
    (("selector", None, "entry", "simple"), ({"continue": None, "leave": "simple"}, None)),
    (("selector", None, "entry", "double"), ({"continue": "simple", "leave": None}, None)),
    (("fork", None, "entry", "simple"), ({"left": "simple", "right": "simple"}, None)),
    (("controller", "black", "main", "simple"), ({"exit": "simple"}, "black")),
    (("controller", "white", "main", "simple"), ({"exit": None}, "white")),
    (("sensor", "white", "main", "simple"), ({"exit": "simple"}, "black")),
    (("sensor", "black", "main", "simple"), ({"exit": None}, "black")),
    (("controller", "black", "signal", "signal"), ({"exit": None}, "white")),
    (("controller", "white", "signal", "signal"), ({"exit": None}, "black")),
    (("sensor", "black", "signal", "signal"), ({"exit": None}, "white")),
    (("sensor", "white", "signal", "signal"), ({"exit": None}, "black")),
]


def criterion_4():
    t0 = time.perf_counter()
    rules = load_rule_table()
    bad = []
    for (name, color, port, kind), (outcomes, final) in CONTRACTS:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _, log, rep = structures.run_scenario(name, port, kind, color=color, rules=rules)
        if not (log.ok and rep.outcomes == outcomes and rep.color == final and rep.back_to_idle):
            why = rep.missing or f"got {rep.outcomes}, colour {rep.color}"
            bad.append(f"{name}/{color or '-'} {port}:{kind} ({why})")
    dt = time.perf_counter() - t0
    detail = f"{len(CONTRACTS) - len(bad)}/{len(CONTRACTS)} contracts hold"
    if bad:
        detail += "; failing: " + "; ".join(bad)
    return not bad, detail, dt


def criterion_5():
    t0 = time.perf_counter()
    problems = []
    # full check, neighbours outside the set included
    for c in cells_within(5):
        nb = neighbors(c)
        if len(set(nb)) != 9 or c in nb:
            problems.append(f"neighbours of {c}")
        for i in range(9):
            if c not in neighbors(nb[i]) or nb[(i + 1) % 9] not in neighbors(nb[i]):
                problems.append(f"around {c}")
    # level 6: every pair of cells inside the set
    cs = cells_within(6)
    inside = set(cs)
    nbs = {c: frozenset(neighbors(c)) for c in cs}
    for c in cs:
        nb = neighbors(c)
        if len(nbs[c]) != 9 or c in nbs[c]:
            problems.append(f"neighbours of {c}")
        for i in range(9):
            a, b = nb[i], nb[(i + 1) % 9]
            if a in inside and (c not in nbs[a] or (b in inside and b not in nbs[a])):
                problems.append(f"around {c}")
    brute = brute_level_counts(10)
    if [level_count(n) for n in range(11)] != brute:
        problems.append("level counts")
    if any(brute[n + 1] != 5 * brute[n] - brute[n - 1] for n in range(1, 10)):
        problems.append("recurrence")
    paths = [p for k in structures.template_keys() for p in structures.build(k).ports.values()]
    paths += [tuple(map(parse_cell, p.split())) for p in EXTRA_PATHS]
    broken = [p for p in paths if not structures.port_is_chain(p)]
    problems += [f"path {' '.join(map(str, p))}" for p in broken]
    dt = time.perf_counter() - t0
    ok = not problems and dt < 5
    detail = f"{len(cs)} cells, level counts n<=10, {len(paths)} paths"
    if problems:
        detail += "; problems: " + ", ".join(problems[:5])
    return ok, detail, dt


def _path_for(tmpl, start):
    for name in tmpl.entry_ports:
        p = list(tmpl.ports[name])
        if start[0] in p:
            if tmpl.name == "fixed_switch":
                p += [CENTER, *tmpl.ports["exit"]]
            return p
    raise LookupError(start)


def criterion_6():
    t0 = time.perf_counter()
    rules = load_rule_table()
    bad, motion = [], 0
    for tr in catalog(rules):
        sc = tr.scenario
        tmpl = structures.build(sc.structure, color=sc.color, direction=sc.direction)
        idle, cfg = initial_configuration(tr)
        log = run(cfg, rules, len(tr.rows))
        pos = [p - {tmpl.color_cell} for p in locomotive_positions(log, idle)]
        # no structure: nothing appears farther than one cell from the previous step
        for a, b in zip(pos, pos[1:]):
            if any(c not in a and not (a & set(neighbors(c))) for c in b):
                bad.append(f"{tr.name}: jump")
                break
        if sc.structure not in ("track_test", "fixed_switch"):
            continue
        motion += 1
        path = _path_for(tmpl, sc.start)
        i0, k = path.index(sc.start[0]), len(sc.start)
        for t, p in enumerate(pos):
            want = frozenset(path[i0 + t:i0 + t + k])
            if p != want:
                bad.append(f"{tr.name} t={t}")
                break
            if len(want) == k and not (k == 1 or (k == 2 and want <= {*neighbors(path[i0 + t]), path[i0 + t]})):
                bad.append(f"{tr.name} t={t} shape")
                break
    dt = time.perf_counter() - t0
    detail = f"{motion} motion traces advance one cell per step, 23 traces without jumps"
    if bad:
        detail += "; " + ", ".join(bad)
    return not bad, detail, dt


def criterion_7():
    t0 = time.perf_counter()
    n1 = len(layout(1))
    lay = layout(3)
    worst = edge_mismatch(lay)
    comb = {frozenset((c, n)) for c in lay.polygons for n in neighbors(c) if n in lay.polygons}
    same_adj = geometric_adjacency(lay) == comb
    tmpl = structures.build("fixed_switch")
    svg1 = render_svg(tmpl.idle, lay, tints=role_tints(tmpl))
    svg2 = render_svg(tmpl.idle, layout(3), tints=role_tints(tmpl))
    dt = time.perf_counter() - t0
    ok = n1 == 55 and worst < EDGE_TOL and same_adj and svg1 == svg2
    return ok, (f"layout(1) has {n1} polygons, max shared-edge gap {worst:.1e}, "
                f"adjacency agrees: {same_adj}, SVG deterministic: {svg1 == svg2}"), dt


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


def _check(n: int) -> None:
    from conftest import ACCEPTANCE

    ok, detail, dt = CRITERIA[n - 1]()
    line = _verdict(n, ok, detail, dt)
    ACCEPTANCE[n] = (ok, line)
    print(line)
    assert ok, line


def test_criterion_1_rule_table():
    _check(1)


def test_criterion_2_trace_replay():
    _check(2)


def test_criterion_3_idle_stability():
    _check(3)


def test_criterion_4_behaviour():
    _check(4)


def test_criterion_5_tessellation():
    _check(5)


def test_criterion_6_kinematics():
    _check(6)


def test_criterion_7_rendering():
    _check(7)


if __name__ == "__main__":
    failed = 0
    for n, fn in enumerate(CRITERIA, 1):
        ok, detail, dt = fn()
        failed += not ok
        print(_verdict(n, ok, detail, dt))
    sys.exit(1 if failed else 0)
