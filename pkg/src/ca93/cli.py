"""Command-line front end: ``hca93 <command>``.

Exit codes: 0 success, 1 a check failed, 2 bad input (usage, parse error,
missing file).
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from ca93 import render, structures, traces
from ca93.engine import ConfigParseError, load_configuration, run
from ca93.ruleset import RuleParseError, RuleTable, conflicts, load_rule_table, rotation_analysis
from ca93.tessellation import level_count

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _rules(path: str | None) -> RuleTable:
    try:
        return load_rule_table(path)
    except (OSError, RuleParseError) as exc:
        raise InputError(f"cannot read rules: {exc}") from None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def cmd_check_rules(args: argparse.Namespace) -> int:
    table = _rules(args.rules)
    bad = conflicts(table)
    print(f"{len(table)} rules, {len(bad)} conflicts")
    for c in bad:
        print(f"  conflict: rule {c.first.id} -> {c.first.next}, rule {c.second.id} -> {c.second.next}"
              f" on {c.first.current} {c.first.nbhd}")
    rep = rotation_analysis(table)
    print(f"{len(rep.classes)} rotation classes, {len(rep.incompatible)} rotation-incompatible, "
          f"{rep.collapsed_count} rules up to rotation")
    for ids in rep.incompatible:
        print("  incompatible: " + ", ".join(map(str, ids)))
    return OK if not bad else FAILED


def cmd_verify_traces(args: argparse.Namespace) -> int:
    table = _rules(args.rules)
    try:
        suite = traces.catalog()
    except (OSError, traces.TraceParseError) as exc:
        raise InputError(f"cannot read traces: {exc}") from None
    if args.only:
        suite = [t for t in suite if t.name in args.only]
        missing = set(args.only) - {t.name for t in suite}
        if missing:
            raise InputError("unknown trace: " + ", ".join(sorted(missing)))
    reports = [traces.verify(t, table) for t in suite]
    sys.stdout.write(traces.report_csv(reports) if args.csv else traces.report_text(reports))
    return OK if all(r.passed for r in reports) else FAILED


def _template(args: argparse.Namespace) -> structures.StructureTemplate:
    try:
        return structures.build(args.structure, color=args.color, direction=args.direction)
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc).strip("'\"")) from None


def cmd_simulate(args: argparse.Namespace) -> int:
    table = _rules(args.rules)
    tmpl = _template(args)
    port, sep, kind = args.inject.partition(":")
    if not sep:
        raise InputError("--inject expects PORT:KIND, e.g. entry:simple")
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cfg = tmpl.inject(port, kind)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    log = run(cfg, table, args.steps)
    csv_text = log.to_csv()
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
    if args.svg:
        tints = render.role_tints(tmpl)
        cells = set(tints)
        for t in range(len(log) + 1):
            cells |= log.config_at(t).black_cells()
        lay = render.layout(min(render.MAX_LEVELS, max(args.levels or 0, render.levels_needed(cells))))
        out = Path(args.svg)
        out.mkdir(parents=True, exist_ok=True)
        for t, svg in enumerate(render.render_log(log, lay, tints=tints, size=args.size)):
            (out / f"step_{t:03d}.svg").write_text(svg, encoding="utf-8")
    rep = structures.classify_exit(log, tmpl)
    for name, outcome in rep.outcomes.items():
        print(f"exit {name}: {outcome or 'none'}", file=sys.stderr)
    if rep.color:
        print(f"colour: {rep.color}", file=sys.stderr)
    if log.missing:
        print(f"error: {log.missing}", file=sys.stderr)
        return FAILED
    return OK


def cmd_render(args: argparse.Namespace) -> int:
    tints = {}
    if args.config:
        try:
            cfg = load_configuration(args.config)
        except (OSError, ConfigParseError) as exc:
            raise InputError(f"cannot read configuration: {exc}") from None
    else:
        if not args.structure:
            raise InputError("give --structure or --config")
        tmpl = _template(args)
        cfg = tmpl.idle
        if not args.no_tints:
            tints = render.role_tints(tmpl)
    levels = args.levels
    if levels is None:
        levels = min(render.MAX_LEVELS, render.levels_needed(set(tints) | cfg.black_cells()))
    try:
        lay = render.layout(levels)
        svg = render.render_svg(cfg, lay, tints=tints, size=args.size)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.out:
        Path(args.out).write_text(svg, encoding="utf-8")
    else:
        sys.stdout.write(svg)
    return OK


def cmd_stats(args: argparse.Namespace) -> int:
    counts = [level_count(n) for n in range(args.levels + 1)]
    total = [1 + 9 * sum(counts[: n + 1]) for n in range(args.levels + 1)]
    print("nodes per level in a sector: " + ", ".join(map(str, counts)))
    print("tiles up to each level: " + ", ".join(map(str, total)))
    if args.check_recurrence:
        ok = all(counts[n + 1] == 5 * counts[n] - counts[n - 1] for n in range(1, args.levels))
        print(f"u(n+1)=5u(n)-u(n-1): {'OK' if ok else 'FAILED'}")
        return OK if ok else FAILED
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hca93", description="Railway cellular automaton on the {9,3} tiling.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check-rules", help="coherence and rotation report")
    c.add_argument("--rules", help="rule file (default: shipped table)")
    c.set_defaults(func=cmd_check_rules)

    v = sub.add_parser("verify-traces", help="replay the execution traces")
    v.add_argument("--rules")
    v.add_argument("--only", action="append", metavar="NAME")
    v.add_argument("--csv", action="store_true", help="machine-readable report")
    v.set_defaults(func=cmd_verify_traces)

    def scenario_flags(q: argparse.ArgumentParser, required: bool) -> None:
        q.add_argument("--structure", required=required, choices=structures.NAMES)
        q.add_argument("--color", choices=structures.COLORS)
        q.add_argument("--direction", choices=structures.DIRECTIONS)
        q.add_argument("--size", type=_positive, default=800, help="SVG canvas side in pixels")

    s = sub.add_parser("simulate", help="inject a locomotive and run")
    scenario_flags(s, True)
    s.add_argument("--inject", required=True, metavar="PORT:KIND")
    s.add_argument("--steps", type=_positive, required=True)
    s.add_argument("--rules")
    s.add_argument("--out", help="step log CSV (default: stdout)")
    s.add_argument("--svg", metavar="DIR", help="write one SVG per step")
    s.add_argument("--levels", type=int, help="minimum drawing depth")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("render", help="draw a template or configuration file")
    scenario_flags(r, False)
    r.add_argument("--config", help="configuration file instead of a template")
    r.add_argument("--levels", type=int)
    r.add_argument("--no-tints", action="store_true")
    r.add_argument("--out")
    r.set_defaults(func=cmd_render)

    t = sub.add_parser("stats", help="tile counts per level")
    t.add_argument("--levels", type=int, default=5, choices=range(0, 11), metavar="N")
    t.add_argument("--check-recurrence", action="store_true")
    t.set_defaults(func=cmd_stats)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
