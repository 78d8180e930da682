"""Integer coordinates and adjacency for the hyperbolic tessellation {9,3}.

The plane is split into a central tile and nine sectors.  Each sector is a
tree whose root is a neighbour of the central tile.  Nodes come in two
kinds: a W-node has five sons (``W -> BWWWW``) and a B-node has four
(``B -> BWWW``).  Inside a sector the nodes are numbered breadth first,
level by level, the root getting number 1.

On a given tree level the nodes of the nine sectors form a cycle: sector 1
from left to right, then sector 2, and so on.  Going left to right along a
level is counterclockwise around the central tile.  The left lateral
neighbour of a node is its predecessor on that cycle, the right one its
successor.

Canonical side numbering (counterclockwise, side 1 first):

* central tile: side ``i`` is shared with ``1(i)``;
* W-node: father, left lateral, the five sons, the first son of the right
  lateral, right lateral;
* B-node: father, left lateral of the father (its second "parent"), left
  lateral, the four sons, the first son of the right lateral, right lateral.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from functools import lru_cache
from typing import Iterator, NamedTuple

SECTORS = 9
W, B = "W", "B"

_ADDRESS_RE = re.compile(r"^\s*(\d+)\s*\(\s*(\d+)\s*\)\s*$")


class Cell(NamedTuple):
    """A tile: ``Cell(0, 0)`` is the central tile, else (sector, number)."""

    sector: int
    num: int

    def __str__(self) -> str:
        return f"{self.num}({self.sector})"

    @property
    def is_center(self) -> bool:
        return self.sector == 0


CENTER = Cell(0, 0)
_mk = tuple.__new__  # skips the NamedTuple wrapper in hot loops


def cell(num: int, sector: int) -> Cell:
    """Build a validated address, argument order mirroring ``num(sector)``."""
    if num == 0 and sector == 0:
        return CENTER
    if not 1 <= sector <= SECTORS:
        raise ValueError(f"sector must be in 1..9, got {sector}")
    if num < 1:
        raise ValueError(f"node number must be >= 1, got {num}")
    return Cell(sector, num)


def parse_cell(text: str) -> Cell:
    m = _ADDRESS_RE.match(text)
    if not m:
        raise ValueError(f"not a cell address: {text!r}")
    return cell(int(m.group(1)), int(m.group(2)))


class _Tree:
    """Breadth-first expansion of one sector tree, grown on demand."""

    def __init__(self) -> None:
        self.level_start = [1, 2]  # level d occupies nums [start[d], start[d+1])
        self.kind = bytearray(b"\x00\x00")  # index = num; 0 = W, 1 = B
        self.first_son: list[int] = [0]
        self.father: list[int] = [0, 0]

    @property
    def depth(self) -> int:
        return len(self.level_start) - 2

    def grow(self, depth: int) -> None:
        while self.depth < depth:
            d = self.depth
            nxt = self.level_start[d + 1]
            for num in range(self.level_start[d], self.level_start[d + 1]):
                self.first_son.append(nxt)
                sons = 4 if self.kind[num] else 5
                self.kind.extend(b"\x01" + b"\x00" * (sons - 1))
                self.father.extend([num] * sons)
                nxt += sons
            self.level_start.append(nxt)

    def level_of(self, num: int) -> int:
        while num >= self.level_start[-1]:
            self.grow(self.depth + 1)
        return bisect_right(self.level_start, num) - 1


_TREE = _Tree()


def node_kind(num: int) -> str:
    """Kind (``"W"`` or ``"B"``) of the node numbered ``num``."""
    if num < 1:
        raise ValueError("node numbers start at 1")
    _TREE.level_of(num)
    return B if _TREE.kind[num] else W


def sons(num: int) -> range:
    if num < 1:
        raise ValueError("node numbers start at 1")
    d = _TREE.level_of(num)
    _TREE.grow(d + 1)
    first = _TREE.first_son[num]
    return range(first, first + (4 if _TREE.kind[num] else 5))


def father(num: int) -> int:
    if num < 2:
        raise ValueError("the root of a sector has no father")
    _TREE.level_of(num)
    return _TREE.father[num]


def level_of(num: int) -> int:
    if num < 1:
        raise ValueError("node numbers start at 1")
    return _TREE.level_of(num)


def level_count(level: int) -> int:
    """Number of nodes on ``level`` of one sector tree (counts kinds only)."""
    if level < 0:
        raise ValueError("level must be >= 0")
    white, black = 1, 0
    for _ in range(level):
        white, black = 4 * white + 3 * black, white + black
    return white + black


def _lateral(level: int, sector: int, num: int, step: int) -> Cell:
    width = _TREE.level_start[level + 1] - _TREE.level_start[level]
    g = (sector - 1) * width + (num - _TREE.level_start[level]) + step
    g %= SECTORS * width
    s, p = divmod(g, width)
    return _mk(Cell, (s + 1, _TREE.level_start[level] + p))


@lru_cache(maxsize=None)
def neighbors(c: Cell) -> tuple[Cell, ...]:
    """The nine neighbours of ``c`` in canonical counterclockwise order."""
    if c.is_center:
        return tuple(Cell(s, 1) for s in range(1, SECTORS + 1))
    s, num = c
    d = _TREE.level_of(num)
    _TREE.grow(d + 1)
    left = _lateral(d, s, num, -1)
    right = _lateral(d, s, num, +1)
    first = _TREE.first_son[num]
    count = 4 if _TREE.kind[num] else 5
    own = [_mk(Cell, (s, n)) for n in range(first, first + count)]
    given = _mk(Cell, (right[0], _TREE.first_son[right[1]]))
    if d == 0:
        up = [CENTER]
    else:
        f = _mk(Cell, (s, _TREE.father[num]))
        up = [f]
        if _TREE.kind[num]:
            up.append(_lateral(d - 1, s, f[1], -1))
    return tuple(up + [left] + own + [given, right])


def side_of(c: Cell, other: Cell) -> int:
    """Canonical side index (1..9) of ``c`` shared with ``other``."""
    try:
        return neighbors(c).index(other) + 1
    except ValueError:
        raise ValueError(f"{other} is not a neighbour of {c}") from None


def are_adjacent(a: Cell, b: Cell) -> bool:
    return b in neighbors(a)


def cells_within(levels: int) -> list[Cell]:
    """Central tile plus every sector node of tree level <= ``levels``."""
    if levels < 0:
        raise ValueError("levels must be >= 0")
    _TREE.grow(levels)
    last = _TREE.level_start[levels + 1]
    out = [CENTER]
    for s in range(1, SECTORS + 1):
        out.extend(Cell(s, n) for n in range(1, last))
    return out


def iter_level(level: int) -> Iterator[Cell]:
    """Nodes of one tree level in cycle order (counterclockwise)."""
    _TREE.grow(level)
    lo, hi = _TREE.level_start[level], _TREE.level_start[level + 1]
    for s in range(1, SECTORS + 1):
        for n in range(lo, hi):
            yield Cell(s, n)
