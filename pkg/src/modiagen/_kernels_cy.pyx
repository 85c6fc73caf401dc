# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels: table filling and single sampling attempts.

Mirrors _kernels_py exactly, including the random-bit stream: the same
`getrandbits` callable produces the same walks on either backend. Counts
stay arbitrary-precision Python ints; the compiled speedup comes from the
loop machinery, the step records and the C tableau used in the forward
pass.
"""
from libc.stdlib cimport free, malloc

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
    cdef Py_ssize_t cn = n, nsh = num_shapes
    cdef Py_ssize_t i, o, a
    cdef int[::1] aoff = add_off
    cdef int[::1] atgt = add_tgt
    cdef int[::1] roff = rem_off
    cdef int[::1] rtgt = rem_tgt
    t = [[0] * nsh for _ in range(cn + 1)]
    g = [[0] * nsh for _ in range(cn + 1)]
    t[0][empty_ord] = 1
    cdef list ti, ti1, gi, gi1, ti2, gi2
    for i in range(1, cn + 1):
        ti = t[i]
        ti1 = t[i - 1]
        gi = g[i]
        gi1 = g[i - 1]
        if i >= 2:
            ti2 = t[i - 2]
            gi2 = g[i - 2]
            for o in range(nsh):
                gi[o] = ti2[o] - gi2[o]
        for o in range(nsh):
            val = ti1[o]
            for a in range(roff[o], roff[o + 1]):
                val = val + ti1[rtgt[a]]
            for a in range(aoff[o], aoff[o + 1]):
                o2 = atgt[a]
                val = val + (ti1[o2] - gi1[o2])
            ti[o] = val
    return t, g


def fill_weighted(n, sigma, num_shapes, empty_ord, add_off, add_tgt,
                  rem_off, rem_tgt):
    """Fill weighted counts w, the correction v, and stride-2 suffix sums s2."""
    cdef Py_ssize_t cn = n, csigma = sigma, nsh = num_shapes
    cdef Py_ssize_t i, o, a, x
    cdef int[::1] aoff = add_off
    cdef int[::1] atgt = add_tgt
    cdef int[::1] roff = rem_off
    cdef int[::1] rtgt = rem_tgt
    w = [[0] * nsh for _ in range(cn + 1)]
    v = [[0] * nsh for _ in range(cn + 1)]
    s2 = [[0] * nsh for _ in range(cn + 1)]
    w[0][empty_ord] = 1
    s2[0][empty_ord] = 1
    cdef list wi, wi1, vi, vi2, wx, vx, sx, s2i, s2i2
    for i in range(1, cn + 1):
        wi = w[i]
        wi1 = w[i - 1]
        vi = v[i]
        if i >= 2:
            vi2 = v[i - 2]
            for o in range(nsh):
                vi[o] = vi2[o]
        if i - 2 * csigma >= 0:
            wx = w[i - 2 * csigma]
            vx = v[i - 2 * csigma]
            for o in range(nsh):
                vi[o] = vi[o] + (wx[o] - vx[o])
        x = i - 2 * csigma + 1
        sx = s2[x] if x >= 0 else None
        for o in range(nsh):
            val = wi1[o]
            for a in range(roff[o], roff[o + 1]):
                val = val + wi1[rtgt[a]]
            if sx is not None:
                for a in range(aoff[o], aoff[o + 1]):
                    val = val + sx[atgt[a]]
            wi[o] = val
        s2i = s2[i]
        s2i2 = s2[i - 2] if i >= 2 else None
        for o in range(nsh):
            diff = wi[o] - vi[o]
            if diff < 0:
                raise NormalizationError(
                    f"(w - v)[{i}][{o}] = {diff} < 0: recursion bug")
            s2i[o] = diff + (s2i2[o] if s2i2 is not None else 0)
    return w, v, s2


cdef inline int _reverse_bump(int* rows, int* rowlen, Py_ssize_t width,
                              int row) nogil:
    """Pop the corner of `row` (1-based) and bump upward; returns the entry
    ejected from row 1. rows is row-major with `width` slots per row."""
    cdef int x, tmp
    cdef Py_ssize_t r, lo, hi, mid
    rowlen[row - 1] -= 1
    x = rows[(row - 1) * width + rowlen[row - 1]]
    for r in range(row - 2, -1, -1):
        lo = 0
        hi = rowlen[r]
        while lo < hi:
            mid = (lo + hi) // 2
            if rows[r * width + mid] < x:
                lo = mid + 1
            else:
                hi = mid
        tmp = rows[r * width + (lo - 1)]
        rows[r * width + (lo - 1)] = x
        x = tmp
    return x


def core_attempt(n, k, empty_ord, t, g, add_off, add_row, add_tgt,
                 rem_off, rem_row, rem_tgt, getrandbits):
    """One restart-sampler attempt for a core diagram.

    Returns (accepted, arcs in extraction order, steps_drawn).
    """
    cdef Py_ssize_t cn = n, ck = k
    cdef Py_ssize_t trem, o, o2, a, idx, pos, width, nrows
    cdef int[::1] aoff = add_off
    cdef int[::1] arow = add_row
    cdef int[::1] atgt = add_tgt
    cdef int[::1] roff = rem_off
    cdef int[::1] rrow = rem_row
    cdef int[::1] rtgt = rem_tgt
    cdef list ti1, gi1, tt
    cdef int* codes = NULL
    cdef int* rowsrec = NULL
    cdef int* tab = NULL
    cdef int* rowlen = NULL
    cdef int steps_drawn = 0, code, row, x, last_p, last_q
    codes = <int*> malloc((cn + 1) * sizeof(int))
    rowsrec = <int*> malloc((cn + 1) * sizeof(int))
    width = cn // 2 + 2
    nrows = ck - 1
    tab = <int*> malloc(nrows * width * sizeof(int))
    rowlen = <int*> malloc(nrows * sizeof(int))
    if codes == NULL or rowsrec == NULL or tab == NULL or rowlen == NULL:
        free(codes); free(rowsrec); free(tab); free(rowlen)
        raise MemoryError()
    try:
        trem = cn
        o = empty_ord
        while trem > 0:
            ti1 = t[trem - 1]
            gi1 = g[trem - 1]
            total = ti1[o]
            for a in range(roff[o], roff[o + 1]):
                total = total + ti1[rtgt[a]]
            for a in range(aoff[o], aoff[o + 1]):
                o2 = atgt[a]
                total = total + (ti1[o2] - gi1[o2])
            tt = t[trem]
            if total != tt[o]:
                raise NormalizationError(
                    f"core weights sum {total} != t[{trem}][{o}] = {tt[o]}")
            r = draw_below(total, getrandbits)
            steps_drawn += 1
            # re-enumerate in the same order and select
            code = 0
            row = 0
            wt = ti1[o]
            if r < wt:
                pass
            else:
                r = r - wt
                for a in range(roff[o], roff[o + 1]):
                    wt = ti1[rtgt[a]]
                    if r < wt:
                        code = 1
                        row = rrow[a]
                        o = rtgt[a]
                        break
                    r = r - wt
                else:
                    for a in range(aoff[o], aoff[o + 1]):
                        o2 = atgt[a]
                        wt = ti1[o2] - gi1[o2]
                        if r < wt:
                            code = 2
                            row = arow[a]
                            o = o2
                            break
                        r = r - wt
            trem -= 1
            codes[trem] = code      # reversed drawing: position trem+1
            rowsrec[trem] = row
        # forward pass with the stacking check
        for a in range(nrows):
            rowlen[a] = 0
        arcs = []
        last_p = -1
        last_q = -1
        for pos in range(1, cn + 1):
            code = codes[pos - 1]
            if code == 0:
                continue
            row = rowsrec[pos - 1]
            if code == 1:
                tab[(row - 1) * width + rowlen[row - 1]] = <int> pos
                rowlen[row - 1] += 1
                continue
            x = _reverse_bump(tab, rowlen, width, row)
            if last_q == pos - 1 and last_p == x + 1:
                return False, None, steps_drawn
            arcs.append((x, pos))
            last_p = x
            last_q = <int> pos
        return True, arcs, steps_drawn
    finally:
        free(codes)
        free(rowsrec)
        free(tab)
        free(rowlen)


def modular_attempt(n, sigma, k, empty_ord, w, v, s2, add_off, add_row,
                    add_tgt, rem_off, rem_row, rem_tgt, getrandbits):
    """One restart-sampler attempt for a sigma-modular diagram.

    Returns (accepted, core_length, weighted arcs in extraction order,
    steps_drawn).
    """
    cdef Py_ssize_t cn = n, csigma = sigma, ck = k
    cdef Py_ssize_t trem, o, o2, a, pos, x, y, width, nrows, m
    cdef int[::1] aoff = add_off
    cdef int[::1] arow = add_row
    cdef int[::1] atgt = add_tgt
    cdef int[::1] roff = rem_off
    cdef int[::1] rrow = rem_row
    cdef int[::1] rtgt = rem_tgt
    cdef list wi1, sx, wy, vy, wtab
    cdef int* codes = NULL
    cdef int* rowsrec = NULL
    cdef int* sizes = NULL
    cdef int* tab = NULL
    cdef int* rowlen = NULL
    cdef int steps_drawn = 0, code, row, size, xent, last_p, last_q
    codes = <int*> malloc((cn + 1) * sizeof(int))
    rowsrec = <int*> malloc((cn + 1) * sizeof(int))
    sizes = <int*> malloc((cn + 1) * sizeof(int))
    width = cn // 2 + 2
    nrows = ck - 1
    tab = <int*> malloc(nrows * width * sizeof(int))
    rowlen = <int*> malloc(nrows * sizeof(int))
    if codes == NULL or rowsrec == NULL or sizes == NULL or tab == NULL \
            or rowlen == NULL:
        free(codes); free(rowsrec); free(sizes); free(tab); free(rowlen)
        raise MemoryError()
    try:
        trem = cn
        o = empty_ord
        m = 0  # number of core steps drawn (stored reversed)
        while trem > 0:
            wi1 = w[trem - 1]
            x = trem - 2 * csigma + 1
            sx = s2[x] if x >= 0 else None
            total = wi1[o]
            for a in range(roff[o], roff[o + 1]):
                total = total + wi1[rtgt[a]]
            if sx is not None:
                for a in range(aoff[o], aoff[o + 1]):
                    total = total + sx[atgt[a]]
            wtab = w[trem]
            if total != wtab[o]:
                raise NormalizationError(
                    f"weighted sums {total} != w[{trem}][{o}] = {wtab[o]}")
            r = draw_below(total, getrandbits)
            steps_drawn += 1
            code = 0
            row = 0
            size = 0
            o2 = o
            wt = wi1[o]
            if r < wt:
                pass
            else:
                r = r - wt
                hit = False
                for a in range(roff[o], roff[o + 1]):
                    wt = wi1[rtgt[a]]
                    if r < wt:
                        code = 1
                        row = rrow[a]
                        o2 = rtgt[a]
                        hit = True
                        break
                    r = r - wt
                if not hit:
                    for a in range(aoff[o], aoff[o + 1]):
                        wt = sx[atgt[a]]
                        if r < wt:
                            code = 2
                            row = arow[a]
                            o2 = atgt[a]
                            break
                        r = r - wt
            if code != 2:
                codes[m] = code
                rowsrec[m] = row
                sizes[m] = 0
                m += 1
                o = o2
                trem -= 1
                continue
            # second draw resolves the stack size, ascending from sigma
            r2 = draw_below(sx[o2], getrandbits)
            steps_drawn += 1
            size = <int> csigma
            y = x
            while True:
                wy = w[y]
                vy = v[y]
                wv = wy[o2] - vy[o2]
                if r2 < wv:
                    break
                r2 = r2 - wv
                y -= 2
                size += 1
            codes[m] = 2
            rowsrec[m] = row
            sizes[m] = size
            m += 1
            o = o2
            trem = y
        # forward pass over core positions 1..m (records are reversed)
        for a in range(nrows):
            rowlen[a] = 0
        arcs = []
        last_p = -1
        last_q = -1
        for pos in range(1, m + 1):
            code = codes[m - pos]
            if code == 0:
                continue
            row = rowsrec[m - pos]
            if code == 1:
                tab[(row - 1) * width + rowlen[row - 1]] = <int> pos
                rowlen[row - 1] += 1
                continue
            xent = _reverse_bump(tab, rowlen, width, row)
            if last_q == pos - 1 and last_p == xent + 1:
                return False, m, None, steps_drawn
            arcs.append((xent, pos, sizes[m - pos]))
            last_p = xent
            last_q = <int> pos
        return True, m, arcs, steps_drawn
    finally:
        free(codes)
        free(rowsrec)
        free(sizes)
        free(tab)
        free(rowlen)
