"""Exact big-integer counting tables and transition-weight queries.

CoreTable holds the no-stack prefix counts t and the stacking correction g;
WeightedTable holds the weighted counts w, the correction v, and the
stride-2 suffix sums s2 used for aggregated stack-size draws. All entries
are exact Python ints; tables are built once and then treated as frozen.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from math import comb

from ._backend import get_kernels
from .errors import CacheError
from .shapes import ADD, NOTHING, REMOVE, Move, Shape, ShapeSpace

FORMAT_VERSION = 1


def compositions_count(s: int, parts: int, sigma: int) -> int:
    """Ordered tuples (a_1..a_parts), every a_i >= sigma, summing to s.

    Equals C(s - parts*sigma + parts - 1, parts - 1) when s >= parts*sigma,
    else 0.
    """
    if parts < 1 or sigma < 1:
        raise ValueError("need parts >= 1 and sigma >= 1")
    if s < parts * sigma:
        return 0
    return comb(s - parts * sigma + parts - 1, parts - 1)

# (n+1) * num_shapes guard against accidentally huge builds
DEFAULT_MAX_CELLS = 500_000_000


@dataclass
class CoreTable:
    n: int
    k: int
    space: ShapeSpace
    t: list[list[int]]
    g: list[list[int]]

    def total(self) -> int:
        """Number of k-noncrossing cores on n vertices."""
        return self.t[self.n][self.space.ordinal(())]

    def t_at(self, i: int, shape: Shape) -> int:
        """t[i, shape], reading out-of-range indices as 0."""
        if i < 0 or i > self.n:
            return 0
        o = self.space.index.get(tuple(shape))
        return 0 if o is None else self.t[i][o]

    def g_at(self, i: int, shape: Shape) -> int:
        if i < 0 or i > self.n:
            return 0
        o = self.space.index.get(tuple(shape))
        return 0 if o is None else self.g[i][o]


@dataclass
class WeightedTable:
    n: int
    k: int
    sigma: int
    space: ShapeSpace
    w: list[list[int]]
    v: list[list[int]]
    s2: list[list[int]]

    def total(self) -> int:
        """Number of k-noncrossing sigma-modular diagrams on n vertices."""
        return self.w[self.n][self.space.ordinal(())]

    def w_at(self, i: int, shape: Shape) -> int:
        if i < 0 or i > self.n:
            return 0
        o = self.space.index.get(tuple(shape))
        return 0 if o is None else self.w[i][o]

    def v_at(self, i: int, shape: Shape) -> int:
        if i < 0 or i > self.n:
            return 0
        o = self.space.index.get(tuple(shape))
        return 0 if o is None else self.v[i][o]


def _check_capacity(n: int, space: ShapeSpace, max_cells: int) -> None:
    cells = (n + 1) * max(1, len(space))
    if cells > max_cells:
        raise MemoryError(
            f"table would need {cells} cells (> {max_cells}); "
            "raise max_cells explicitly if this is intended")


def build_core_table(n: int, k: int, backend: str | None = None,
                     max_cells: int = DEFAULT_MAX_CELLS) -> CoreTable:
    """Fill t and g for all lengths 0..n and all reachable shapes."""
    if n < 0 or k < 2:
        raise ValueError("need n >= 0 and k >= 2")
    space = ShapeSpace(k, n // 2)
    _check_capacity(n, space, max_cells)
    kern = get_kernels(backend)
    t, g = kern.fill_core(n, len(space), space.ordinal(()),
                          space.add_off, space.add_tgt,
                          space.rem_off, space.rem_tgt)
    return CoreTable(n, k, space, t, g)


def build_weighted_table(n: int, k: int, sigma: int,
                         backend: str | None = None,
                         max_cells: int = DEFAULT_MAX_CELLS) -> WeightedTable:
    """Fill w, v and the aggregated s2 sums."""
    if n < 0 or k < 2 or sigma < 1:
        raise ValueError("need n >= 0, k >= 2 and sigma >= 1")
    space = ShapeSpace(k, n // 2)
    _check_capacity(n, space, max_cells)
    kern = get_kernels(backend)
    w, v, s2 = kern.fill_weighted(n, sigma, len(space), space.ordinal(()),
                                  space.add_off, space.add_tgt,
                                  space.rem_off, space.rem_tgt)
    return WeightedTable(n, k, sigma, space, w, v, s2)


def core_transition_weights(table: CoreTable, remaining: int,
                            shape: Shape) -> list[tuple[Move, Shape, int]]:
    """Move weights of the reversed walk at (remaining, shape).

    Order is fixed: NOTHING, forward-insertions (shape shrinks) by ascending
    row, forward-extractions (shape grows) by ascending row. The weights sum
    to t[remaining, shape]; a zero-count state is rejected.
    """
    if not 1 <= remaining <= table.n:
        raise ValueError(f"remaining {remaining} outside 1..{table.n}")
    o = table.space.ordinal(tuple(shape))
    if table.t[remaining][o] == 0:
        raise ValueError(f"state (remaining={remaining}, {shape!r}) has count 0")
    ti1 = table.t[remaining - 1]
    gi1 = table.g[remaining - 1]
    out = [(Move(NOTHING, 0), tuple(shape), ti1[o])]
    for j, o2 in table.space.removes[o]:
        out.append((Move(REMOVE, j), table.space.shape(o2), ti1[o2]))
    for j, o2 in table.space.adds[o]:
        out.append((Move(ADD, j), table.space.shape(o2), ti1[o2] - gi1[o2]))
    return out


def weighted_transition_weights(table: WeightedTable, remaining: int,
                                shape: Shape) -> list[tuple[Move, Shape, int | None, int]]:
    """Per-move, per-stack-size weights of the reversed weighted walk.

    Extraction entries enumerate every stack size s with sigma <= s and
    2s <= remaining + 1, ascending within each row; the size entry is None
    for non-extraction moves. The weights sum to w[remaining, shape].
    """
    if remaining < 1:
        raise ValueError(f"remaining {remaining} must be >= 1")
    if remaining > table.n:
        raise ValueError(f"remaining {remaining} exceeds table length {table.n}")
    o = table.space.ordinal(tuple(shape))
    if table.w[remaining][o] == 0:
        raise ValueError(f"state (remaining={remaining}, {shape!r}) has count 0")
    wi1 = table.w[remaining - 1]
    out = [(Move(NOTHING, 0), tuple(shape), None, wi1[o])]
    for j, o2 in table.space.removes[o]:
        out.append((Move(REMOVE, j), table.space.shape(o2), None, wi1[o2]))
    for j, o2 in table.space.adds[o]:
        s = table.sigma
        while 2 * s <= remaining + 1:
            x = remaining - 2 * s + 1
            out.append((Move(ADD, j), table.space.shape(o2), s,
                        table.w[x][o2] - table.v[x][o2]))
            s += 1
    return out


# ---------------------------------------------------------------------------
# persistence: decimal-string JSON keyed by (kind, n, k, sigma, version)

def _cache_name(kind: str, n: int, k: int, sigma: int | None) -> str:
    if kind == "core":
        return f"core_n{n}_k{k}_v{FORMAT_VERSION}.json"
    return f"weighted_n{n}_k{k}_s{sigma}_v{FORMAT_VERSION}.json"


def _encode(rows: list[list[int]]) -> list[list[str]]:
    return [[str(x) for x in row] for row in rows]


def _decode(rows) -> list[list[int]]:
    return [[int(x) for x in row] for row in rows]


def save_table(table: CoreTable | WeightedTable, directory: str) -> str:
    """Write the table to the cache directory; returns the file path."""
    os.makedirs(directory, exist_ok=True)
    if isinstance(table, CoreTable):
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "core",
            "n": table.n,
            "k": table.k,
            "num_shapes": len(table.space),
            "t": _encode(table.t),
            "g": _encode(table.g),
        }
        path = os.path.join(directory, _cache_name("core", table.n, table.k, None))
    else:
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "weighted",
            "n": table.n,
            "k": table.k,
            "sigma": table.sigma,
            "num_shapes": len(table.space),
            "w": _encode(table.w),
            "v": _encode(table.v),
        }
        path = os.path.join(
            directory, _cache_name("weighted", table.n, table.k, table.sigma))
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
    os.replace(tmp, path)
    return path


def _validate_header(doc: dict, kind: str, n: int, k: int,
                     sigma: int | None, num_shapes: int) -> None:
    expected = {"format_version": FORMAT_VERSION, "kind": kind, "n": n, "k": k,
                "num_shapes": num_shapes}
    if sigma is not None:
        expected["sigma"] = sigma
    for key, want in expected.items():
        got = doc.get(key)
        if got != want:
            raise CacheError(f"cache {key}={got!r}, expected {want!r}")


def load_core_table(directory: str, n: int, k: int) -> CoreTable | None:
    """Load a cached core table; None if absent, CacheError if invalid."""
    path = os.path.join(directory, _cache_name("core", n, k, None))
    if not os.path.exists(path):
        return None
    space = ShapeSpace(k, n // 2)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheError(f"unreadable cache {path}: {exc}") from exc
    _validate_header(doc, "core", n, k, None, len(space))
    try:
        t = _decode(doc["t"])
        g = _decode(doc["g"])
    except (KeyError, ValueError, TypeError) as exc:
        raise CacheError(f"corrupt cache {path}: {exc}") from exc
    table = CoreTable(n, k, space, t, g)
    try:
        _sanity_check_core(table, path)
    except IndexError as exc:
        raise CacheError(f"cache {path} is truncated") from exc
    return table


def load_weighted_table(directory: str, n: int, k: int,
                        sigma: int) -> WeightedTable | None:
    path = os.path.join(directory, _cache_name("weighted", n, k, sigma))
    if not os.path.exists(path):
        return None
    space = ShapeSpace(k, n // 2)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheError(f"unreadable cache {path}: {exc}") from exc
    _validate_header(doc, "weighted", n, k, sigma, len(space))
    try:
        w = _decode(doc["w"])
        v = _decode(doc["v"])
    except (KeyError, ValueError, TypeError) as exc:
        raise CacheError(f"corrupt cache {path}: {exc}") from exc
    for name, rows in (("w", w), ("v", v)):
        if len(rows) != n + 1 or any(len(row) != len(space) for row in rows):
            raise CacheError(f"cache {path} has wrong {name} dimensions")
    s2 = _rebuild_s2(w, v)
    table = WeightedTable(n, k, sigma, space, w, v, s2)
    try:
        _sanity_check_weighted(table, path)
    except IndexError as exc:
        raise CacheError(f"cache {path} is truncated") from exc
    return table


def _rebuild_s2(w: list[list[int]], v: list[list[int]]) -> list[list[int]]:
    num = len(w[0]) if w else 0
    s2 = [[0] * num for _ in w]
    for i in range(len(w)):
        for o in range(num):
            diff = w[i][o] - v[i][o]
            if diff < 0:
                raise CacheError("cached w - v negative")
            s2[i][o] = diff + (s2[i - 2][o] if i >= 2 else 0)
    return s2


def _sanity_check_core(table: CoreTable, path: str) -> None:
    if len(table.t) != table.n + 1 or len(table.g) != table.n + 1:
        raise CacheError(f"cache {path} has wrong dimensions")
    if table.t[0][table.space.ordinal(())] != 1:
        raise CacheError(f"cache {path} fails t[0, empty] == 1")
    for i in range(1, table.n + 1):
        for o in range(len(table.space)):
            total = table.t[i - 1][o]
            for _, o2 in table.space.removes[o]:
                total += table.t[i - 1][o2]
            for _, o2 in table.space.adds[o]:
                total += table.t[i - 1][o2] - table.g[i - 1][o2]
            if total != table.t[i][o]:
                raise CacheError(
                    f"cache {path} breaks the counting recursion at "
                    f"(i={i}, ordinal={o})")


def _sanity_check_weighted(table: WeightedTable, path: str) -> None:
    if table.w[0][table.space.ordinal(())] != 1:
        raise CacheError(f"cache {path} fails w[0, empty] == 1")
    for i in range(1, table.n + 1):
        x = i - 2 * table.sigma + 1
        for o in range(len(table.space)):
            total = table.w[i - 1][o]
            for _, o2 in table.space.removes[o]:
                total += table.w[i - 1][o2]
            if x >= 0:
                for _, o2 in table.space.adds[o]:
                    total += table.s2[x][o2]
            if total != table.w[i][o]:
                raise CacheError(
                    f"cache {path} breaks the counting recursion at "
                    f"(i={i}, ordinal={o})")
