"""Young-diagram shapes with at most k-1 rows and their one-square moves.

Shapes are plain tuples of positive row lengths, weakly decreasing top to
bottom; the empty tuple is the empty shape. All values are immutable.
"""
from __future__ import annotations

from array import array
from functools import lru_cache
from typing import NamedTuple

Shape = tuple[int, ...]

ADD = "add"
REMOVE = "remove"
NOTHING = "nothing"


class Move(NamedTuple):
    kind: str  # ADD, REMOVE or NOTHING
    row: int  # 1-based; 0 for NOTHING


def valid_shape(rows, k: int) -> bool:
    """True iff rows is weakly decreasing, strictly positive, with <= k-1 rows."""
    rows = tuple(rows)
    if len(rows) > k - 1:
        return False
    if any(r <= 0 for r in rows):
        return False
    return all(rows[i] >= rows[i + 1] for i in range(len(rows) - 1))


def add_square(shape: Shape, row: int) -> Shape | None:
    """Shape with one square added in `row` (1-based), or None if invalid."""
    if row < 1:
        return None
    if row > len(shape) + 1:
        return None  # would leave an empty row above
    if row == len(shape) + 1:
        new = shape + (1,)
    else:
        new = shape[: row - 1] + (shape[row - 1] + 1,) + shape[row:]
    if row > 1 and new[row - 1] > new[row - 2]:
        return None
    return new


def remove_square(shape: Shape, row: int) -> Shape | None:
    """Shape with the corner square of `row` removed, or None if not removable."""
    if row < 1 or row > len(shape):
        return None
    if row < len(shape) and shape[row - 1] == shape[row]:
        return None  # not a corner
    val = shape[row - 1] - 1
    if val == 0:
        if row != len(shape):
            return None
        return shape[:-1]
    return shape[: row - 1] + (val,) + shape[row:]


def enumerate_moves(shape: Shape, k: int) -> list[tuple[Move, Shape]]:
    """All (move, result) pairs reachable in one step, including (NOTHING, shape).

    Order is fixed: NOTHING, then ADD by ascending row, then REMOVE by
    ascending row. Additions beyond k-1 rows are excluded.
    """
    out = [(Move(NOTHING, 0), shape)]
    for j in range(1, k):
        grown = add_square(shape, j)
        if grown is not None:
            out.append((Move(ADD, j), grown))
    for j in range(1, k):
        shrunk = remove_square(shape, j)
        if shrunk is not None:
            out.append((Move(REMOVE, j), shrunk))
    return out


class ShapeSpace:
    """Dense ordinal indexing of all valid shapes with a bounded square count.

    Shapes are enumerated once in lexicographic tuple order, so the empty
    shape always gets ordinal 0 and ordinals are stable across calls. The
    per-ordinal adjacency lists (row, target ordinal) feed the table-filling
    and sampling kernels.
    """

    def __init__(self, k: int, max_squares: int):
        if k < 2:
            raise ValueError(f"k must be >= 2, got {k}")
        if max_squares < 0:
            raise ValueError("max_squares must be >= 0")
        self.k = k
        self.max_squares = max_squares
        self.shapes: list[Shape] = self._enumerate()
        self.index: dict[Shape, int] = {s: i for i, s in enumerate(self.shapes)}
        # adjacency within the space; additions leaving the space are dropped,
        # which is sound because such cells are never reachable (an open
        # square still needs at least one future position to close)
        self.adds: list[list[tuple[int, int]]] = []
        self.removes: list[list[tuple[int, int]]] = []
        for s in self.shapes:
            add_row = []
            for j in range(1, k):
                g = add_square(s, j)
                if g is not None and g in self.index:
                    add_row.append((j, self.index[g]))
            rem_row = []
            for j in range(1, k):
                r = remove_square(s, j)
                if r is not None:
                    rem_row.append((j, self.index[r]))
            self.adds.append(add_row)
            self.removes.append(rem_row)
        # CSR-flattened adjacency consumed by the table/sampling kernels
        self.add_off = array("i", [0])
        self.add_row = array("i")
        self.add_tgt = array("i")
        self.rem_off = array("i", [0])
        self.rem_row = array("i")
        self.rem_tgt = array("i")
        for add_row_list, rem_row_list in zip(self.adds, self.removes):
            for j, tgt in add_row_list:
                self.add_row.append(j)
                self.add_tgt.append(tgt)
            self.add_off.append(len(self.add_tgt))
            for j, tgt in rem_row_list:
                self.rem_row.append(j)
                self.rem_tgt.append(tgt)
            self.rem_off.append(len(self.rem_tgt))

    def _enumerate(self) -> list[Shape]:
        found = {()}
        frontier = [()]
        while frontier:
            nxt = []
            for s in frontier:
                for j in range(1, self.k):
                    g = add_square(s, j)
                    if g is not None and sum(g) <= self.max_squares and g not in found:
                        found.add(g)
                        nxt.append(g)
            frontier = nxt
        return sorted(found)

    def __len__(self) -> int:
        return len(self.shapes)

    def ordinal(self, shape: Shape) -> int:
        try:
            return self.index[tuple(shape)]
        except KeyError:
            raise ValueError(f"shape {shape!r} outside space (k={self.k}, "
                             f"max_squares={self.max_squares})") from None

    def shape(self, ordinal: int) -> Shape:
        return self.shapes[ordinal]


@lru_cache(maxsize=64)
def _space(k: int, max_squares: int) -> ShapeSpace:
    return ShapeSpace(k, max_squares)


def shape_index(shape, n: int, k: int) -> int:
    """Stable ordinal of a valid shape among all shapes with <= n squares."""
    shape = tuple(shape)
    if not valid_shape(shape, k):
        raise ValueError(f"not a valid shape for k={k}: {shape!r}")
    if sum(shape) > n:
        raise ValueError(f"shape {shape!r} has more than n={n} squares")
    return _space(k, n).ordinal(shape)


def shape_unindex(ordinal: int, n: int, k: int) -> Shape:
    """Inverse of shape_index."""
    space = _space(k, n)
    if not 0 <= ordinal < len(space):
        raise ValueError(f"ordinal {ordinal} out of range [0, {len(space)})")
    return space.shape(ordinal)
