# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled twin of ``cuboid_complex._exactcore.pure``.

Same algorithms, same pivot rules, bit-identical output.  The arithmetic
still runs on Python ints (entries routinely exceed machine words), so the
speedup comes from removing interpreter dispatch in the inner loops, not
from native arithmetic.
"""

from math import gcd

DEF PIVOT_ROWS = 12


def ff_rank(rows, Py_ssize_t ncols):
    """Rank of a sparse integer matrix, fraction-free with Markowitz pivoting."""
    cdef dict act = {}
    cdef dict col_count = {}
    cdef dict r, new, prow
    cdef Py_ssize_t i, rank
    for i, row in enumerate(rows):
        r = {c: v for c, v in (<dict> row).items() if v}
        if r:
            _strip_content(r)
            act[i] = r
    for r in act.values():
        for c in r:
            col_count[c] = col_count.get(c, 0) + 1

    rank = 0
    while act:
        pi, pc = _pick_pivot(act, col_count)
        prow = <dict> act.pop(pi)
        piv = prow[pc]
        for c in prow:
            col_count[c] = col_count[c] - 1
        rank += 1

        targets = [ri for ri in act if pc in <dict> act[ri]]
        for ri in targets:
            r = <dict> act.pop(ri)
            f = r.pop(pc)
            col_count[pc] = col_count[pc] - 1
            g = gcd(piv, f)
            a = piv // g
            b = f // g
            new = {}
            for c, v in r.items():
                pv = prow.get(c)
                w = a * v if pv is None else a * v - b * pv
                if w:
                    new[c] = w
                else:
                    col_count[c] = col_count[c] - 1
            for c, pv in prow.items():
                if c != pc and c not in r:
                    new[c] = -b * pv
                    col_count[c] = col_count.get(c, 0) + 1
            if new:
                _strip_content(new)
                act[ri] = new
    return rank


cdef _pick_pivot(dict act, dict col_count):
    cdef list shortlist = sorted(act.items(), key=_row_weight)[:PIVOT_ROWS]
    cdef dict r
    cdef Py_ssize_t rc
    best_key = None
    best = (-1, -1)
    for i, row in shortlist:
        r = <dict> row
        rc = len(r) - 1
        for c, v in r.items():
            key = (rc * (col_count[c] - 1), (v if v > 0 else -v).bit_length(), i, c)
            if best_key is None or key < best_key:
                best_key = key
                best = (i, c)
    return best


def _row_weight(item):
    return (len(item[1]), item[0])


cdef _strip_content(dict row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return
    if g > 1:
        for c in row:
            row[c] = row[c] // g


def fj_inverse(mat):
    """Exact inverse via fraction-free Gauss-Jordan; returns (num, den)."""
    cdef Py_ssize_t n = len(mat)
    cdef Py_ssize_t width = 2 * n
    cdef Py_ssize_t t, i, j, p
    cdef list m = [list(row) + [1 if i == j else 0 for j in range(n)]
                   for i, row in enumerate(mat)]
    cdef list mi, mt
    prev = 1
    for t in range(n):
        p = -1
        best = None
        for i in range(t, n):
            v = (<list> m[i])[t]
            if v:
                key = ((v if v > 0 else -v).bit_length(), i)
                if best is None or key < best:
                    best = key
                    p = i
        if p < 0:
            raise ZeroDivisionError("matrix is singular")
        if p != t:
            m[t], m[p] = m[p], m[t]
        mt = <list> m[t]
        piv = mt[t]
        for i in range(n):
            if i == t:
                continue
            mi = <list> m[i]
            f = mi[t]
            if f:
                for j in range(width):
                    if j != t:
                        mi[j] = (piv * mi[j] - f * mt[j]) // prev
            elif prev != 1 or piv != 1:
                for j in range(width):
                    if j != t:
                        mi[j] = piv * mi[j] // prev
            mi[t] = 0
        prev = piv
    return [(<list> row)[n:] for row in m], prev


def imat_mul(a, b):
    """Dense integer matrix product ``a @ b``."""
    cdef Py_ssize_t ncols, i, j, k
    cdef list out = []
    cdef list acc, arow, brow
    if not a or not b:
        return out
    ncols = len(b[0])
    for arow in a:
        acc = [0] * ncols
        for k in range(len(arow)):
            v = arow[k]
            if v:
                brow = <list> b[k]
                for j in range(ncols):
                    w = brow[j]
                    if w:
                        acc[j] = acc[j] + v * w
        out.append(acc)
    return out


def spmul(a, b):
    """Sparse integer matrix product ``a @ b`` (rows of dicts)."""
    cdef list out = []
    cdef dict acc, brow
    for arow in a:
        acc = {}
        for k, v in (<dict> arow).items():
            brow = <dict> b[k]
            for c, w in brow.items():
                acc[c] = acc.get(c, 0) + v * w
        out.append({c: v for c, v in acc.items() if v})
    return out
