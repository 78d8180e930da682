"""Solve every structure template and freeze it under src/ca93/data/structures.

Run from the repository root: ``python3 tools/build_templates.py [names]``.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from reconstruct import Scen, Solver, Problem, cells  # noqa: E402

from ca93.ruleset import load_rule_table  # noqa: E402
from ca93.traces import load_trace  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
TRACES = ROOT / "src/ca93/data/traces"
OUT = ROOT / "src/ca93/data/structures"
RULES = load_rule_table()


def tr(name):
    return load_trace(TRACES / f"{name}.csv", RULES)


def units_of(black="", white=""):
    u = {c: "B" for c in cells(black)}
    u.update({c: "W" for c in cells(white)})
    return u


def prefix_for(port, kind, start):
    """Steps from injection on ``port`` to the trace's start cells."""
    n = 2 if kind == "double" else 1
    lead_inject = port[n - 1]
    lead_start = max(start, key=port.index)
    return port.index(lead_start) - port.index(lead_inject)


def scen(name, port, kind, trace=None, **kw):
    n = 2 if kind == "double" else 1
    prefix = prefix_for(port, kind, trace.scenario.start) if trace else 0
    return Scen(name, port[:n], trace, prefix, **kw)


PROBLEMS = {}


def problem(fn):
    PROBLEMS[fn.__name__] = fn
    return fn


@problem
def fixed_switch():
    ports = {
        "left": cells("21(2) 5(2) 6(2) 2(3) 1(3)"),
        "right": cells("21(1) 4(1) 3(1) 2(1) 1(9)"),
        "exit": cells("1(5) 2(5) 11(5)"),
    }
    common = dict(entry_chains=[ports["left"], ports["right"]], chains=[ports["exit"]], visit=ports["exit"])
    scens = [
        scen("execfxgs", ports["left"], "simple", tr("execfxgs"), **common),
        scen("execfxds", ports["right"], "simple", tr("execfxds"), **common),
        scen("execfxgd", ports["left"], "double", tr("execfxgd"), **common),
        scen("execfxdd", ports["right"], "double", tr("execfxdd"), **common),
    ]
    sp = Problem("fixed_switch", scens,
              units=units_of("1(1) 1(2) 1(4) 1(6) 1(8)", "0(0) 1(3) 1(5) 1(7) 1(9)"))
    return sp, ports


TRACK_CW = {
    "vertical": cells("5(1) 4(1) 3(1) 2(1) 1(9) 1(8) 1(7) 1(6) 1(5) 2(5) 6(4) 5(4) 4(4)"),
    "horizontal": cells("2(4) 1(3) 1(2) 2(2)"),
}


def track_problem(direction, units=None):
    if direction == "cw":
        ports = dict(TRACK_CW)
        names = [("execvdm", "vertical"), ("execvdmd", "vertical"), ("execvb_a", "horizontal"), ("execvbd_a", "horizontal")]
    else:
        ports = {k: v[::-1] for k, v in TRACK_CW.items()}
        names = [("execvmd", "vertical"), ("execvmdd", "vertical"), ("execvb_b", "horizontal"), ("execvbd_b", "horizontal")]
    chains = list(ports.values())
    scens = []
    for n, port in names:
        t = tr(n)
        scens.append(scen(n, ports[port], t.scenario.kind, t, entry_chains=chains, visit=[ports[port][-1]]))
    return Problem("track_test_" + direction, scens, units=units or {}), ports


@problem
def track_test_cw():
    return track_problem("cw")


@problem
def track_test_ccw():
    # same idle configuration as the clockwise run, only orientations differ
    path = OUT / "track_test_cw.cfg"
    units = {}
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].split()
        if line:
            units[cells(line[0])[0]] = line[1]
    sp, ports = track_problem("ccw")
    region_units = {}
    solver = Solver(sp, RULES)
    for c in solver.region:
        region_units[c] = units.get(c, "W")
    sp.units = region_units
    return sp, ports


@problem
def doubler():
    ports = {
        "entry": cells("7(1) 6(9) 1(9)"),
        "green": cells("1(1) 1(2) 1(3) 1(4)"),
        "blue": cells("1(8) 1(7) 1(6) 1(5)"),
        "exit": cells("2(5) 11(5) 12(5) 13(5)"),
    }
    chains = [ports["green"][:3], ports["blue"][:3], ports["exit"]]
    scens = [scen("execdbl", ports["entry"], "simple", tr("execdbl"), entry_chains=[ports["entry"]],
                  chains=chains, visit=ports["exit"], extend=6)]
    sp = Problem("doubler", scens, dynamic=ports["green"] + ports["blue"],
              units=units_of("0(0)", "1(1) 1(2) 1(3) 1(4) 1(5) 1(6) 1(7) 1(8) 1(9) 6(9) 7(1) 2(5) 11(5)"))
    return sp, ports


@problem
def fork():
    ports = {
        "entry": cells("7(1) 6(9) 1(9)"),
        "left": cells("1(1) 1(2) 6(2) 7(3) 8(3) 9(3)"),
        "right": cells("1(8) 1(7) 6(7) 7(8) 8(8) 9(8)"),
    }
    scens = [scen("execfk", ports["entry"], "simple", tr("execfk"), entry_chains=[ports["entry"]],
                  chains=[ports["left"], ports["right"]], visit=[ports["left"][-1], ports["right"][-1]])]
    sp = Problem("fork", scens, units=units_of("", " ".join(str(c) for p in ports.values() for c in p)))
    return sp, ports


@problem
def selector():
    ports = {
        "entry": cells("45(8) 9(8) 8(8) 7(8) 6(7) 1(7)"),
        "continue": cells("1(5) 2(6) 7(6) 30(5)"),
        "leave": cells("1(9) 2(9) 11(9) 12(9) 13(9) 64(9)"),
    }
    scens = [
        scen("execsels", ports["entry"], "simple", tr("execsels"), entry_chains=[ports["entry"]],
             chains=[ports["leave"]], visit=[ports["leave"][-1]], avoid=ports["continue"][1:], extend=8),
        scen("execseld", ports["entry"], "double", tr("execseld"), entry_chains=[ports["entry"]],
             chains=[ports["continue"]], visit=[ports["continue"][-1]], avoid=ports["leave"][1:], extend=8),
    ]
    sp = Problem("selector", scens, dynamic=[c for p in ports.values() for c in p] + cells("0(0) 1(6) 1(8)"),
              units=units_of("", " ".join(str(c) for p in ports.values() for c in p)))
    return sp, ports


@problem
def controller():
    ports = {
        "main": cells("45(8) 9(8) 8(8) 7(8) 6(7) 1(7)"),
        "exit": cells("1(4) 2(5) 7(5) 30(4)"),
        "signal": cells("21(1) 5(1) 6(1) 2(2) 1(2)"),
    }
    common = dict(entry_chains=[ports["main"], ports["signal"]], chains=[ports["exit"]])
    scens = [
        scen("execctrl_a", ports["main"], "simple", tr("execctrl_a"), color="black", final_color="black",
             visit=[ports["exit"][-1]], **common),
        scen("execctrl_b", ports["main"], "simple", tr("execctrl_b"), color="white", final_color="white",
             avoid=ports["exit"] + cells("0(0)"), **common),
        scen("execctrls_a", ports["signal"], "signal", tr("execctrls_a"), color="white", final_color="black",
             avoid=ports["exit"], **common),
        scen("execctrls_b", ports["signal"], "signal", tr("execctrls_b"), color="black", final_color="white",
             avoid=ports["exit"], **common),
    ]
    white = " ".join(str(c) for p in ports.values() for c in p)
    sp = Problem("controller", scens, dynamic=cells("0(0)"), units=units_of("", white + " 0(0)"),
              color_cell=cells("1(3)")[0])
    return sp, ports


@problem
def sensor():
    ports = {
        "main": cells("45(7) 9(7) 8(7) 7(7) 6(6) 1(6)"),
        "exit": cells("1(4) 2(5) 7(5) 30(4)"),
        "signal": cells("21(8) 5(8) 6(8) 2(9) 1(9)"),
    }
    common = dict(entry_chains=[ports["main"], ports["signal"]], chains=[ports["exit"]])
    scens = [
        scen("execcaptcrb_a", ports["main"], "simple", tr("execcaptcrb_a"), color="black", final_color="black",
             avoid=ports["exit"], **common),
        scen("execcaptcrw", ports["main"], "simple", tr("execcaptcrw"), color="white", final_color="black",
             visit=[ports["exit"][-1]], **common),
        scen("execcaptcrb_b", ports["signal"], "signal", tr("execcaptcrb_b"), color="black", final_color="white",
             avoid=ports["exit"], **common),
    ]
    if "--sensor-signal-white" in sys.argv:
        scens.append(scen("signal_white", ports["signal"], "signal", None, color="white", final_color=("white" if "--absorb" in sys.argv else "black"),
                          avoid=ports["exit"], extend=10, **common))
    white = " ".join(str(c) for p in ports.values() for c in p)
    sp = Problem("sensor", scens, dynamic=cells("0(0)"), units=units_of("", white + " 0(0)"),
              color_cell=cells("1(1)")[0])
    return sp, ports


def solve(name):
    sp, ports = PROBLEMS[name]()
    sp.margin = "--no-margin" not in sys.argv
    S = Solver(sp, RULES)
    res = S.solve()
    if res is None:
        print(name, "UNSAT")
        return None
    model, support, orient = res
    black = sorted(c for c in support if S.value(model, S.x[c]))
    print(name, "black:", " ".join(map(str, black)))
    print(name, "header orientations:", {str(c): orient[c] for c in S.headers})
    for si, s in enumerate(sp.scenarios):
        moving = [(str(c), S.trajectory(model, si, c)) for c in S.dynamic if "B" in S.trajectory(model, si, c)]
        print(" ", s.name, moving)
    return S, res, ports


ROLES = {
    "track_test_cw": {"entry": ["vertical", "horizontal"], "exit": ["vertical", "horizontal"]},
    "track_test_ccw": {"entry": ["vertical", "horizontal"], "exit": ["vertical", "horizontal"]},
    "fixed_switch": {"entry": ["left", "right"], "exit": ["exit"]},
    "doubler": {"entry": ["entry"], "exit": ["exit"], "internal": ["green", "blue"]},
    "fork": {"entry": ["entry"], "exit": ["left", "right"]},
    "selector": {"entry": ["entry"], "exit": ["continue", "leave"]},
    "controller": {"entry": ["main"], "exit": ["exit"], "signal": ["signal"]},
    "sensor": {"entry": ["main"], "exit": ["exit"], "signal": ["signal"]},
}


def freeze(name, S, res, ports):
    model, support, orient = res
    lines = [
        f"# {name}: idle configuration, one line per support cell",
        "# address STATE offset; 'also' lists other offsets the traces and rules allow",
    ]
    free = 0
    for c in sorted(support):
        st = "B" if S.value(model, S.x[c]) else "W"
        alts = [k for k in S.valid_orientations(model, c) if k != orient[c]]
        tail = f"  # also {' '.join(map(str, alts))}" if alts else ""
        free += bool(alts)
        lines.append(f"{c} {st} {orient[c]}{tail}")
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / f"{name}.cfg").write_text("\n".join(lines) + "\n")
    entry = {
        "file": f"{name}.cfg",
        "ports": {k: [str(c) for c in v] for k, v in ports.items()},
        **ROLES[name],
    }
    if S.problem.color_cell:
        entry["color_cell"] = str(S.problem.color_cell)
    manifest_path = OUT / "manifest.json"
    manifest = json.loads(manifest_path.read_text()) if manifest_path.exists() else {}
    manifest[name] = entry
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"{name}: {len(support)} support cells, {free} with a free orientation")


if __name__ == "__main__":
    names = [a for a in sys.argv[1:] if not a.startswith("--")] or list(PROBLEMS)
    for name in names:
        out = solve(name)
        if out and "--write" in sys.argv:
            freeze(name, *out)
