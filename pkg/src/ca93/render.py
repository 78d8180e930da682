"""Poincaré-disk layout of the tessellation and SVG output.

The central 9-gon is centred at the origin.  Every other tile is the mirror
image of its father across their shared edge, so only reflections along the
tree paths are composed and rounding stays far below the 1e-9 tolerance used
to compare shared edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ca93.engine import Configuration, StepLog
from ca93.tessellation import CENTER, Cell, cells_within, father, neighbors, side_of

MAX_LEVELS = 6
SEGMENTS = 16
EDGE_TOL = 1e-9

# cosh of the distance from a tile centre to the middle of its sides
COSH_TILE_RADIUS = math.cos(math.pi / 3) / math.sin(math.pi / 9)
TILE_RADIUS = math.acosh(COSH_TILE_RADIUS)
# cosh of the distance from a tile centre to its vertices
COSH_CIRCUMRADIUS = 1 / (math.tan(math.pi / 9) * math.tan(math.pi / 3))
CIRCUMRADIUS = math.acosh(COSH_CIRCUMRADIUS)


def _to_origin(a: complex):
    return lambda z: (z - a) / (1 - a.conjugate() * z)


def _from_origin(a: complex):
    return lambda z: (z + a) / (1 + a.conjugate() * z)


def reflect(points: Iterable[complex], a: complex, b: complex) -> list[complex]:
    """Mirror ``points`` across the geodesic through ``a`` and ``b``."""
    to, back = _to_origin(a), _from_origin(a)
    w = to(b)
    u2 = (w / abs(w)) ** 2
    return [back(u2 * to(z).conjugate()) for z in points]


def geodesic(a: complex, b: complex, segments: int = SEGMENTS) -> list[complex]:
    """``segments + 1`` points along the geodesic from ``a`` to ``b``."""
    to, back = _to_origin(a), _from_origin(a)
    w = to(b)
    pts = [back(w * i / segments) for i in range(segments + 1)]
    pts[0], pts[-1] = a, b
    return pts


@dataclass
class DiskLayout:
    levels: int
    polygons: dict[Cell, tuple[complex, ...]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.polygons)

    def __contains__(self, c: object) -> bool:
        return c in self.polygons

    def vertices(self, c: Cell) -> list[tuple[float, float]]:
        return [(z.real, z.imag) for z in self.polygons[c]]

    def side(self, c: Cell, i: int) -> tuple[complex, complex]:
        """End points of canonical side ``i`` (1..9), counterclockwise."""
        v = self.polygons[c]
        return v[i - 1], v[i % 9]

    def edge(self, c: Cell, i: int, segments: int = SEGMENTS) -> list[complex]:
        return geodesic(*self.side(c, i), segments)

    def outline(self, c: Cell, segments: int = SEGMENTS) -> list[complex]:
        """Closed boundary of ``c`` as geodesic polylines, last point dropped."""
        pts: list[complex] = []
        for i in range(1, 10):
            pts.extend(self.edge(c, i, segments)[:-1])
        return pts


def _central_polygon() -> tuple[complex, ...]:
    r = math.tanh(CIRCUMRADIUS / 2)
    # side i joins vertices i-1 and i; side 1 faces up
    theta0 = math.pi / 2 - math.pi / 9
    return tuple(complex(r * math.cos(theta0 + 2 * math.pi * k / 9), r * math.sin(theta0 + 2 * math.pi * k / 9))
                 for k in range(9))


def _place(poly: tuple[complex, ...], j: int, m: int) -> tuple[complex, ...]:
    """Polygon of the neighbour across side ``j`` whose own side ``m`` is shared."""
    a, b = poly[j - 1], poly[j % 9]
    mirrored = reflect(poly, a, b)
    out: list[complex] = [0j] * 9
    for s in range(9):
        out[(m - 1 + s) % 9] = mirrored[(j - s) % 9]
    out[(m - 1) % 9], out[m % 9] = b, a
    return tuple(out)


def layout(levels: int) -> DiskLayout:
    """Tiles of tree level <= ``levels`` placed in the Poincaré disk."""
    if levels < 0:
        raise ValueError("levels must be >= 0")
    if levels > MAX_LEVELS:
        raise ValueError(f"depth too large: at most {MAX_LEVELS} levels")
    polys: dict[Cell, tuple[complex, ...]] = {CENTER: _central_polygon()}
    for c in cells_within(levels):
        if c == CENTER:
            continue
        parent = CENTER if c.num == 1 else Cell(c.sector, father(c.num))
        polys[c] = _place(polys[parent], side_of(parent, c), side_of(c, parent))
    return DiskLayout(levels, polys)


def edge_mismatch(lay: DiskLayout) -> float:
    """Largest gap between the two copies of any shared edge."""
    worst = 0.0
    for c in lay.polygons:
        for i, n in enumerate(neighbors(c), 1):
            if n not in lay.polygons or n < c:
                continue
            a, b = lay.side(c, i)
            p, q = lay.side(n, side_of(n, c))
            worst = max(worst, abs(a - q), abs(b - p))
    return worst


def geometric_adjacency(lay: DiskLayout, tol: float = 1e-7) -> set[frozenset[Cell]]:
    """Pairs of tiles sharing two vertices, found from coordinates alone."""
    scale = 1 / tol
    buckets: dict[tuple[int, int], list[tuple[complex, Cell]]] = {}
    for c, poly in lay.polygons.items():
        for z in poly:
            buckets.setdefault((round(z.real * scale), round(z.imag * scale)), []).append((z, c))
    shared: dict[frozenset[Cell], int] = {}
    for c, poly in lay.polygons.items():
        for z in poly:
            kx, ky = round(z.real * scale), round(z.imag * scale)
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for w, d in buckets.get((kx + dx, ky + dy), ()):
                        if d != c and abs(w - z) < tol:
                            key = frozenset((c, d))
                            shared[key] = shared.get(key, 0) + 1
    # each shared vertex is seen from both tiles
    return {k for k, n in shared.items() if n >= 4}


@dataclass(frozen=True)
class Palette:
    black: str = "#1b2a7a"
    white: str = "#ffffff"
    stroke: str = "#7f7f7f"
    disk: str = "#000000"
    tints: Mapping[str, str] = field(default_factory=lambda: {
        "yellow": "#ffe45c",
        "pink": "#f7a8c8",
        "green": "#a8e6a0",
    })


ROLE_TINTS = {"entry": "yellow", "exit": "pink", "signal": "green", "internal": "green"}


def role_tints(tmpl) -> dict[Cell, str]:
    """Tint names for the port cells of a structure template."""
    out: dict[Cell, str] = {}
    groups = [
        ("internal", tmpl.internal_ports),
        ("signal", tmpl.signal_ports),
        ("exit", tmpl.exit_ports),
        ("entry", tmpl.entry_ports),
    ]
    for role, names in groups:
        for name in names:
            for c in tmpl.ports[name]:
                out[c] = ROLE_TINTS[role]
    return out


def _fmt(x: float) -> str:
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _path(points: list[complex], lay_size: float) -> str:
    h = lay_size / 2
    xy = [(h + z.real * h, h - z.imag * h) for z in points]
    return "M" + " L".join(f"{_fmt(x)} {_fmt(y)}" for x, y in xy) + " Z"


def _outline_px(lay: DiskLayout, c: Cell, size: float) -> list[complex]:
    """Outline with visually straight edges reduced to their end points."""
    h = size / 2
    out: list[complex] = []
    for i in range(1, 10):
        pts = lay.edge(c, i)
        a, b = pts[0], pts[-1]
        chord = b - a
        if abs(chord) * h < 1e-12:
            out.append(a)
            continue
        dev = max(abs(((z - a) * chord.conjugate()).imag) / abs(chord) for z in pts[1:-1])
        out.extend(pts[:-1] if dev * h > 0.2 else [a])
    return out


def render_svg(
    cfg: Configuration,
    lay: DiskLayout,
    palette: Palette | None = None,
    tints: Mapping[Cell, str] | None = None,
    size: int = 800,
) -> str:
    """SVG 1.1 picture of ``cfg``; black cells dark blue, tints on white cells."""
    palette = palette or Palette()
    tints = tints or {}
    # white support cells beyond the drawn depth look like the background
    for c in cfg.black_cells():
        if c not in lay.polygons:
            raise ValueError(f"cell {c} is missing from the layout (levels={lay.levels})")
    for c in tints:
        if c not in lay.polygons:
            raise ValueError(f"tinted cell {c} is missing from the layout")
    h = size / 2
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<circle cx="{_fmt(h)}" cy="{_fmt(h)}" r="{_fmt(h)}" fill="{palette.white}" stroke="{palette.disk}"/>',
        f'<g stroke="{palette.stroke}" stroke-width="0.5">',
    ]
    for c in sorted(lay.polygons):
        if cfg.state(c) == "B":
            fill = palette.black
        elif c in tints:
            fill = palette.tints[tints[c]]
        else:
            fill = palette.white
        lines.append(f'<path d="{_path(_outline_px(lay, c, size), size)}" fill="{fill}"><title>{c}</title></path>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_log(
    log: StepLog,
    lay: DiskLayout,
    palette: Palette | None = None,
    tints: Mapping[Cell, str] | None = None,
    size: int = 800,
) -> list[str]:
    """One SVG per time 0..n of the run."""
    return [render_svg(log.config_at(t), lay, palette, tints, size) for t in range(len(log) + 1)]


def levels_needed(cells: Iterable[Cell]) -> int:
    """Smallest layout depth containing every cell of ``cells``."""
    from ca93.tessellation import level_of

    return max((level_of(c.num) for c in cells if c != CENTER), default=0)
