"""Structure templates of the railway circuit and locomotive injection.

Templates are read from ``data/structures``: one configuration file per
template plus ``manifest.json`` naming the port paths.  A port is a chain
of track cells listed in the order the locomotive runs along it.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

from ca93.engine import Configuration, StepLog, load_configuration, run
from ca93.ruleset import RuleTable, load_rule_table
from ca93.tessellation import Cell, are_adjacent, parse_cell

NAMES = ("track_test", "fixed_switch", "doubler", "selector", "fork", "controller", "sensor")
KINDS = ("simple", "double", "signal")
COLORS = ("black", "white")
DIRECTIONS = ("cw", "ccw")


class PortError(ValueError):
    pass


@dataclass(frozen=True)
class StructureTemplate:
    name: str
    idle: Configuration
    ports: dict[str, tuple[Cell, ...]]
    entry_ports: tuple[str, ...]
    exit_ports: tuple[str, ...]
    signal_ports: tuple[str, ...] = ()
    internal_ports: tuple[str, ...] = ()
    color_cell: Cell | None = None
    direction: str | None = None

    @property
    def color(self) -> str | None:
        return self.color_of(self.idle)

    def color_of(self, cfg: Configuration) -> str | None:
        if self.color_cell is None:
            return None
        return "black" if cfg.state(self.color_cell) == "B" else "white"

    def port(self, name: str) -> tuple[Cell, ...]:
        try:
            return self.ports[name]
        except KeyError:
            raise PortError(f"{self.name} has no port {name!r}; ports: {', '.join(self.ports)}") from None

    def inject(self, port: str, kind: str, cfg: Configuration | None = None) -> Configuration:
        if kind == "signal" and port not in self.signal_ports:
            raise PortError(f"{port!r} is not a signal port of {self.name}")
        if kind != "signal" and port not in self.entry_ports:
            raise PortError(f"{port!r} is not an entry port of {self.name}")
        if self.name == "doubler" and kind == "double":
            warnings.warn("the doubler is only specified for a simple locomotive", stacklevel=2)
        return inject(self.idle if cfg is None else cfg, self.port(port), kind)


def inject(cfg: Configuration, port: tuple[Cell, ...] | list[Cell], kind: str) -> Configuration:
    """Put a locomotive on the first cell(s) of ``port``."""
    if kind not in KINDS:
        raise ValueError(f"unknown locomotive kind {kind!r}")
    n = 2 if kind == "double" else 1
    cells = list(port[:n])
    if len(cells) < n:
        raise PortError("port too short for a double locomotive")
    for c in cells:
        if c not in cfg.states:
            raise PortError(f"port cell {c} is outside the support")
        if cfg.states[c] == "B":
            raise PortError(f"port cell {c} is already occupied")
    return cfg.with_states({c: "B" for c in cells})


@lru_cache(maxsize=None)
def _manifest() -> dict:
    from ca93.data import data_path

    return json.loads(data_path("structures", "manifest.json").read_text(encoding="utf-8"))


@lru_cache(maxsize=None)
def _load(key: str) -> Configuration:
    from ca93.data import data_path

    return load_configuration(data_path("structures", _manifest()[key]["file"]))


def template_keys() -> list[str]:
    """Names of the frozen template files, e.g. ``track_test_cw``."""
    return sorted(_manifest())


def build(name: str, color: str | None = None, direction: str | None = None) -> StructureTemplate:
    """The template ``name``; controller and sensor take a colour, the track test a direction."""
    if name not in NAMES and name not in _manifest():
        raise KeyError(f"unknown structure {name!r}; known: {', '.join(NAMES)}")
    if name.startswith("track_test"):
        if name != "track_test":
            direction = name.rsplit("_", 1)[1]
        direction = direction or "cw"
        if direction not in DIRECTIONS:
            raise ValueError(f"direction must be cw or ccw, got {direction!r}")
        key = f"track_test_{direction}"
    else:
        key = name
        direction = None
    m = _manifest()[key]
    idle = _load(key)
    color_cell = parse_cell(m["color_cell"]) if "color_cell" in m else None
    if color_cell is not None:
        color = color or "black"
        if color not in COLORS:
            raise ValueError(f"colour must be black or white, got {color!r}")
        idle = idle.with_states({color_cell: "B" if color == "black" else "W"})
    elif color is not None:
        raise ValueError(f"{name} has no colour")
    ports = {k: tuple(parse_cell(c) for c in v) for k, v in m["ports"].items()}
    return StructureTemplate(
        name="track_test" if key.startswith("track_test") else key,
        idle=idle,
        ports=ports,
        entry_ports=tuple(m.get("entry", ())),
        exit_ports=tuple(m.get("exit", ())),
        signal_ports=tuple(m.get("signal", ())),
        internal_ports=tuple(m.get("internal", ())),
        color_cell=color_cell,
        direction=direction,
    )


def all_templates() -> list[StructureTemplate]:
    """The eight frozen templates, colours at their black default."""
    out = []
    for key in template_keys():
        out.append(build(key))
    return out


def port_is_chain(port: tuple[Cell, ...]) -> bool:
    return all(are_adjacent(a, b) for a, b in zip(port, port[1:]))


@dataclass
class ExitReport:
    outcomes: dict[str, str | None]
    color: str | None = None
    back_to_idle: bool = False
    missing: str | None = None
    passes: dict[str, list[int]] = field(default_factory=dict)  # port -> run lengths


def _runs(flags: list[bool]) -> list[int]:
    out, n = [], 0
    for f in flags + [False]:
        if f:
            n += 1
        elif n:
            out.append(n)
            n = 0
    return out


def classify_exit(log: StepLog, tmpl: StructureTemplate) -> ExitReport:
    """What left through each exit port, read at the port's last cell.

    A simple locomotive keeps that cell black for one step, a double one
    for two consecutive steps.
    """
    outcomes: dict[str, str | None] = {}
    passes: dict[str, list[int]] = {}
    for name in tmpl.exit_ports:
        last = tmpl.port(name)[-1]
        runs = _runs([log.config_at(t).state(last) == "B" for t in range(len(log) + 1)])
        passes[name] = runs
        if not runs:
            outcomes[name] = None
        elif runs == [1]:
            outcomes[name] = "simple"
        elif runs == [2]:
            outcomes[name] = "double"
        else:
            outcomes[name] = "irregular"
    final = log.final
    ref = tmpl.idle
    if tmpl.color_cell is not None:
        ref = ref.with_states({tmpl.color_cell: final.state(tmpl.color_cell)})
    return ExitReport(
        outcomes=outcomes,
        color=tmpl.color_of(final),
        back_to_idle=final.same_states(ref),
        missing=str(log.missing) if log.missing else None,
        passes=passes,
    )


def run_scenario(
    name: str,
    port: str,
    kind: str,
    color: str | None = None,
    direction: str | None = None,
    steps: int = 40,
    rules: RuleTable | None = None,
) -> tuple[StructureTemplate, StepLog, ExitReport]:
    """Build, inject, run and classify in one call."""
    tmpl = build(name, color=color, direction=direction)
    cfg = tmpl.inject(port, kind)
    log = run(cfg, rules or load_rule_table(), steps)
    return tmpl, log, classify_exit(log, tmpl)
