"""Pure-Python hot kernels: table filling and single sampling attempts.

The compiled variant in _kernels_cy.pyx implements the same four entry
points with identical semantics and, crucially, an identical random-bit
stream: given the same `getrandbits` both backends draw the same moves in
the same order. Counts are exact Python ints throughout; no floats.

Conventions shared by both backends:
  - tables are lists indexed [length][shape ordinal];
  - shape adjacency comes CSR-style: off[o]..off[o+1] slices row/tgt arrays;
  - a step draw enumerates moves as (nothing, forward-insertions by ascending
    row, forward-extractions by ascending row); the weighted sampler draws
    the stack size in a second pass, ascending from sigma;
  - uniform integers below a total come from bit rejection, with the
    single-outcome case consuming no bits.
"""
from __future__ import annotations

from .errors import NormalizationError


def draw_below(total, getrandbits):
    """Exact uniform integer in [0, total) from random bits by rejection."""
    if total <= 1:
        if total == 1:
            return 0
        raise ValueError("draw_below needs a positive total")
    nbits = total.bit_length()
    r = getrandbits(nbits)
    while r >= total:
        r = getrandbits(nbits)
    return r


def fill_core(n, num_shapes, empty_ord, add_off, add_tgt, rem_off, rem_tgt):
    """Fill the no-stack prefix counts t and the stacking correction g."""
    t = [[0] * num_shapes for _ in range(n + 1)]
    g = [[0] * num_shapes for _ in range(n + 1)]
    t[0][empty_ord] = 1
    for i in range(1, n + 1):
        ti, ti1 = t[i], t[i - 1]
        gi, gi1 = g[i], g[i - 1]
        if i >= 2:
            ti2, gi2 = t[i - 2], g[i - 2]
            for o in range(num_shapes):
                gi[o] = ti2[o] - gi2[o]
        for o in range(num_shapes):
            val = ti1[o]
            for a in range(rem_off[o], rem_off[o + 1]):
                val += ti1[rem_tgt[a]]
            for a in range(add_off[o], add_off[o + 1]):
                o2 = add_tgt[a]
                val += ti1[o2] - gi1[o2]
            ti[o] = val
    return t, g


def fill_weighted(n, sigma, num_shapes, empty_ord, add_off, add_tgt,
                  rem_off, rem_tgt):
    """Fill weighted counts w, the correction v, and stride-2 suffix sums s2.

    s2[x][o] = sum of (w - v)[y][o] over y = x, x-2, x-4, ... >= 0, so the
    aggregate extraction weight at remaining length t is s2[t - 2*sigma + 1].
    """
    w = [[0] * num_shapes for _ in range(n + 1)]
    v = [[0] * num_shapes for _ in range(n + 1)]
    s2 = [[0] * num_shapes for _ in range(n + 1)]
    w[0][empty_ord] = 1
    s2[0][empty_ord] = 1
    for i in range(1, n + 1):
        wi, wi1, vi = w[i], w[i - 1], v[i]
        if i >= 2:
            vi2 = v[i - 2]
            for o in range(num_shapes):
                vi[o] = vi2[o]
        if i - 2 * sigma >= 0:
            wx, vx = w[i - 2 * sigma], v[i - 2 * sigma]
            for o in range(num_shapes):
                vi[o] += wx[o] - vx[o]
        x = i - 2 * sigma + 1
        sx = s2[x] if x >= 0 else None
        for o in range(num_shapes):
            val = wi1[o]
            for a in range(rem_off[o], rem_off[o + 1]):
                val += wi1[rem_tgt[a]]
            if sx is not None:
                for a in range(add_off[o], add_off[o + 1]):
                    val += sx[add_tgt[a]]
            wi[o] = val
        s2i = s2[i]
        s2i2 = s2[i - 2] if i >= 2 else None
        for o in range(num_shapes):
            diff = wi[o] - vi[o]
            if diff < 0:
                raise NormalizationError(
                    f"(w - v)[{i}][{o}] = {diff} < 0: recursion bug")
            s2i[o] = diff + (s2i2[o] if s2i2 is not None else 0)
    return w, v, s2


def _forward_core_pass(steps, num_rows):
    """Materialize arcs left to right; abort on the first stacking arc.

    steps: (code, row) per position, code 0 nothing / 1 insert / 2 extract.
    Returns (accepted, arcs in extraction order).
    """
    rows = [[] for _ in range(num_rows)]
    arcs = []
    last_p = last_q = -1
    for pos_minus1, (code, row) in enumerate(steps):
        if code == 0:
            continue
        pos = pos_minus1 + 1
        if code == 1:
            rows[row - 1].append(pos)
            continue
        # reverse bumping from the corner of `row`
        cells = rows[row - 1]
        x = cells.pop()
        for r in range(row - 2, -1, -1):
            cells = rows[r]
            lo, hi = 0, len(cells)
            while lo < hi:
                mid = (lo + hi) // 2
                if cells[mid] < x:
                    lo = mid + 1
                else:
                    hi = mid
            x, cells[lo - 1] = cells[lo - 1], x
        if last_q == pos - 1 and last_p == x + 1:
            return False, None
        arcs.append((x, pos))
        last_p, last_q = x, pos
    return True, arcs


def core_attempt(n, k, empty_ord, t, g, add_off, add_row, add_tgt,
                 rem_off, rem_row, rem_tgt, getrandbits):
    """One restart-sampler attempt for a core diagram.

    Draws the reversed shape walk against the t/g tables (one flat draw per
    step), then runs the forward construction with the stacking check.
    Returns (accepted, arcs, steps_drawn). Raises NormalizationError if a
    state's move weights do not sum to its table entry.
    """
    trem = n
    o = empty_ord
    rev = []
    steps_drawn = 0
    while trem > 0:
        ti1 = t[trem - 1]
        gi1 = g[trem - 1]
        weights = [ti1[o]]
        moves = [(0, 0, o)]
        for a in range(rem_off[o], rem_off[o + 1]):
            weights.append(ti1[rem_tgt[a]])
            moves.append((1, rem_row[a], rem_tgt[a]))
        for a in range(add_off[o], add_off[o + 1]):
            o2 = add_tgt[a]
            weights.append(ti1[o2] - gi1[o2])
            moves.append((2, add_row[a], o2))
        total = sum(weights)
        if total != t[trem][o]:
            raise NormalizationError(
                f"core weights sum {total} != t[{trem}][{o}] = {t[trem][o]}")
        r = draw_below(total, getrandbits)
        steps_drawn += 1
        for idx, wt in enumerate(weights):
            if r < wt:
                code, row, o2 = moves[idx]
                rev.append((code, row))
                o = o2
                break
            r -= wt
        trem -= 1
    rev.reverse()
    accepted, arcs = _forward_core_pass(rev, k - 1)
    return accepted, arcs, steps_drawn


def weighted_steps(n, sigma, empty_ord, w, v, s2, add_off, add_row, add_tgt,
                   rem_off, rem_row, rem_tgt, getrandbits):
    """Draw the reversed weighted walk; returns forward (code, row, size) steps.

    Each step first draws among (nothing, insertions, per-row extraction
    aggregates), then resolves the stack size inside a chosen aggregate by a
    second exact draw, walking sizes upward from sigma.
    """
    trem = n
    o = empty_ord
    rev = []
    steps_drawn = 0
    while trem > 0:
        wi1 = w[trem - 1]
        weights = [wi1[o]]
        moves = [(0, 0, o)]
        x = trem - 2 * sigma + 1
        sx = s2[x] if x >= 0 else None
        for a in range(rem_off[o], rem_off[o + 1]):
            weights.append(wi1[rem_tgt[a]])
            moves.append((1, rem_row[a], rem_tgt[a]))
        if sx is not None:
            for a in range(add_off[o], add_off[o + 1]):
                weights.append(sx[add_tgt[a]])
                moves.append((2, add_row[a], add_tgt[a]))
        total = sum(weights)
        if total != w[trem][o]:
            raise NormalizationError(
                f"weighted sums {total} != w[{trem}][{o}] = {w[trem][o]}")
        r = draw_below(total, getrandbits)
        steps_drawn += 1
        chosen = None
        for idx, wt in enumerate(weights):
            if r < wt:
                chosen = moves[idx]
                break
            r -= wt
        code, row, o2 = chosen
        if code != 2:
            rev.append((code, row, 0))
            o = o2
            trem -= 1
            continue
        # resolve the stack size: weight of size s is (w - v)[trem - 2s + 1]
        r2 = draw_below(sx[o2], getrandbits)
        steps_drawn += 1
        size = sigma
        y = x
        while True:
            wv = w[y][o2] - v[y][o2]
            if r2 < wv:
                break
            r2 -= wv
            y -= 2
            size += 1
        rev.append((2, row, size))
        o = o2
        trem = y
    rev.reverse()
    return rev, steps_drawn


def modular_attempt(n, sigma, k, empty_ord, w, v, s2, add_off, add_row,
                    add_tgt, rem_off, rem_row, rem_tgt, getrandbits):
    """One restart-sampler attempt for a sigma-modular diagram.

    Returns (accepted, core_length, weighted arcs in extraction order,
    steps_drawn); the arcs carry their drawn stack sizes and live on core
    positions 1..core_length.
    """
    steps, steps_drawn = weighted_steps(
        n, sigma, empty_ord, w, v, s2, add_off, add_row, add_tgt,
        rem_off, rem_row, rem_tgt, getrandbits)
    m = len(steps)
    rows = [[] for _ in range(k - 1)]
    arcs = []
    last_p = last_q = -1
    for pos_minus1, (code, row, size) in enumerate(steps):
        if code == 0:
            continue
        pos = pos_minus1 + 1
        if code == 1:
            rows[row - 1].append(pos)
            continue
        cells = rows[row - 1]
        x = cells.pop()
        for r in range(row - 2, -1, -1):
            cells = rows[r]
            lo, hi = 0, len(cells)
            while lo < hi:
                mid = (lo + hi) // 2
                if cells[mid] < x:
                    lo = mid + 1
                else:
                    hi = mid
            x, cells[lo - 1] = cells[lo - 1], x
        if last_q == pos - 1 and last_p == x + 1:
            return False, m, None, steps_drawn
        arcs.append((x, pos, size))
        last_p, last_q = x, pos
    return True, m, arcs, steps_drawn
