"""RSK row insertion, reverse bumping, and the diagram <-> shape-sequence maps.

A filled tableau holds distinct integer labels, weakly increasing along rows
and strictly increasing down columns. Arc weights (stack sizes) ride on the
labels, not on cell positions, so they survive bumping.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import Diagram
from .errors import MalformedSequenceError, RowOverflowError
from .shapes import ADD, NOTHING, REMOVE, Move, Shape, add_square, remove_square

StarSequence = tuple[Shape, ...]


@dataclass
class Tableau:
    rows: list[list[int]] = field(default_factory=list)
    weights: dict[int, int] = field(default_factory=dict)

    @property
    def shape(self) -> Shape:
        return tuple(len(r) for r in self.rows)

    def copy(self) -> "Tableau":
        return Tableau([list(r) for r in self.rows], dict(self.weights))

    def check(self) -> None:
        """Raise if rows/columns are not increasing or labels repeat."""
        seen = set()
        for r, row in enumerate(self.rows):
            for c, val in enumerate(row):
                if val in seen:
                    raise ValueError(f"duplicate label {val}")
                seen.add(val)
                if c > 0 and row[c - 1] > val:
                    raise ValueError(f"row {r + 1} not weakly increasing")
                if r > 0 and self.rows[r - 1][c] >= val:
                    raise ValueError(f"column {c + 1} not strictly increasing")
        if any(len(self.rows[i]) < len(self.rows[i + 1])
               for i in range(len(self.rows) - 1)):
            raise ValueError("row lengths not weakly decreasing")


def rsk_insert(tableau: Tableau, entry: int, max_rows: int | None = None) -> Tableau:
    """Row-bump `entry` into a copy of the tableau.

    The entry displaces the smallest label greater than it in row 1, the
    displaced label bumps into row 2, and so on; the shape grows by exactly
    one square. A bump cascade past `max_rows` raises RowOverflowError.
    """
    out = tableau.copy()
    if any(entry in row for row in out.rows):
        raise ValueError(f"label {entry} already present")
    x = entry
    for row in out.rows:
        if not row or x >= row[-1]:
            row.append(x)
            return out
        # leftmost entry strictly greater than x
        lo, hi = 0, len(row)
        while lo < hi:
            mid = (lo + hi) // 2
            if row[mid] > x:
                hi = mid
            else:
                lo = mid + 1
        x, row[lo] = row[lo], x
    if max_rows is not None and len(out.rows) + 1 > max_rows:
        raise RowOverflowError(
            f"insertion would need {len(out.rows) + 1} rows (> {max_rows})")
    out.rows.append([x])
    return out


def rsk_extract(tableau: Tableau, row: int) -> tuple[Tableau, int]:
    """Reverse bumping from the corner of `row` (1-based).

    Returns (reduced tableau, ejected entry); rsk_insert of the ejected entry
    into the reduced tableau reproduces the input exactly.
    """
    if not 1 <= row <= len(tableau.rows):
        raise ValueError(f"no row {row}")
    if row < len(tableau.rows) and len(tableau.rows[row - 1]) == len(tableau.rows[row]):
        raise ValueError(f"row {row} has no removable corner")
    out = tableau.copy()
    x = out.rows[row - 1].pop()
    if not out.rows[row - 1]:
        out.rows.pop()
    for r in range(row - 2, -1, -1):
        cells = out.rows[r]
        # rightmost entry strictly smaller than x
        lo, hi = 0, len(cells)
        while lo < hi:
            mid = (lo + hi) // 2
            if cells[mid] < x:
                lo = mid + 1
            else:
                hi = mid
        x, cells[lo - 1] = cells[lo - 1], x
    return out, x


def step_between(prev: Shape, cur: Shape) -> Move:
    """Classify the move taking `prev` to `cur`, or raise if not adjacent."""
    if prev == cur:
        return Move(NOTHING, 0)
    if sum(cur) == sum(prev) + 1:
        for j in range(1, max(len(prev), len(cur)) + 2):
            if add_square(prev, j) == cur:
                return Move(ADD, j)
    elif sum(cur) == sum(prev) - 1:
        for j in range(1, len(prev) + 1):
            if remove_square(prev, j) == cur:
                return Move(REMOVE, j)
    raise MalformedSequenceError(f"shapes {prev!r} -> {cur!r} are not adjacent")


def diagram_to_star_sequence(diagram: Diagram, k: int) -> StarSequence:
    """Read the diagram right to left into its shape sequence.

    Vertex i inserts the partner j of an arc (j, i), does nothing when
    isolated, and removes its own square when it is an arc origin. Needing
    a k-th row raises RowOverflowError, which doubles as the k-noncrossing
    validator.
    """
    origin_of = {}
    terminal_at = {}
    for i, j in diagram.arcs:
        origin_of[i] = j
        terminal_at[j] = i
    result = [()] * (diagram.n + 1)
    tab = Tableau()
    for i in range(diagram.n, 0, -1):
        if i in terminal_at:
            tab = rsk_insert(tab, terminal_at[i], max_rows=k - 1)
        elif i in origin_of:
            # the pending origin with the largest label always sits in a
            # corner, and i is that maximum when its vertex is reached
            for r in range(len(tab.rows) - 1, -1, -1):
                if tab.rows[r] and tab.rows[r][-1] == i:
                    tab.rows[r].pop()
                    if not tab.rows[r]:
                        tab.rows.pop()
                    break
            else:
                raise ValueError(f"vertex {i} not found as pending origin")
        result[i - 1] = tab.shape
    if result[0] != ():
        raise ValueError("reading did not return to the empty shape")
    return tuple(result)


def forward_pass(seq: StarSequence) -> list[tuple[int, int]]:
    """Left-to-right construction; returns arcs in extraction order.

    An ADD step at position i places label i directly in the new corner, a
    REMOVE step extracts via reverse bumping and emits an arc.
    """
    if not seq or seq[0] != ():
        raise MalformedSequenceError("sequence must start at the empty shape")
    tab = Tableau()
    arcs = []
    for pos in range(1, len(seq)):
        move = step_between(seq[pos - 1], seq[pos])
        if move.kind == NOTHING:
            continue
        if move.kind == ADD:
            while len(tab.rows) < move.row:
                tab.rows.append([])
            tab.rows[move.row - 1].append(pos)
        else:
            tab, popped = rsk_extract(tab, move.row)
            arcs.append((popped, pos))
    if tab.rows:
        raise MalformedSequenceError("sequence did not end at the empty shape")
    return arcs


def star_sequence_to_diagram(seq: StarSequence) -> Diagram:
    """Diagram induced by a complete shape sequence (both ends empty)."""
    arcs = forward_pass(seq)
    return Diagram(len(seq) - 1, frozenset(arcs))
