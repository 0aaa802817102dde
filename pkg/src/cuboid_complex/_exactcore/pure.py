"""Exact integer linear-algebra kernels, pure Python reference backend.

Conventions shared with the compiled twin in ``_speedups.pyx``:

* a dense matrix is a list of rows, each row a list of ``int``;
* a sparse matrix is a list of rows, each row a ``dict`` mapping column
  index to a nonzero ``int``;
* every routine is exact.  Callers keep track of denominators themselves
  (the surrounding code stores rational matrices as an integer matrix plus
  one common denominator).

The two backends must produce bit-identical results; ``ff_rank`` and
``fj_inverse`` therefore fix their pivot strategy deterministically instead
of leaving it to chance.
"""

from __future__ import annotations

from math import gcd

# How many of the sparsest rows the pivot search inspects per step.  Small
# enough to keep the search cheap, large enough that the Markowitz count has
# real candidates to compare.
_PIVOT_ROWS = 12


def ff_rank(rows: list[dict[int, int]], ncols: int) -> int:
    """Rank of a sparse integer matrix by fraction-free elimination.

    Bareiss-style cross-multiplication updates keep every intermediate
    entry an integer; per-row content removal plays the role of the exact
    Bareiss division (the guaranteed divisor always divides the row
    content, so entries never grow past the classical bound).  Pivots are
    chosen by Markowitz count, with ties broken toward entries of small
    magnitude and then by (row, column) index so runs are reproducible.
    """
    act: dict[int, dict[int, int]] = {}
    for i, row in enumerate(rows):
        r = {c: v for c, v in row.items() if v}
        if r:
            _strip_content(r)
            act[i] = r
    col_count: dict[int, int] = {}
    for r in act.values():
        for c in r:
            col_count[c] = col_count.get(c, 0) + 1

    rank = 0
    while act:
        pi, pc = _pick_pivot(act, col_count)
        prow = act.pop(pi)
        piv = prow[pc]
        for c in prow:
            col_count[c] -= 1
        rank += 1

        targets = [i for i, r in act.items() if pc in r]
        for ri in targets:
            r = act.pop(ri)
            f = r.pop(pc)
            col_count[pc] -= 1
            g = gcd(piv, f)
            a = piv // g
            b = f // g
            new: dict[int, int] = {}
            for c, v in r.items():
                pv = prow.get(c)
                w = a * v if pv is None else a * v - b * pv
                if w:
                    new[c] = w
                else:
                    col_count[c] -= 1
            for c, pv in prow.items():
                if c != pc and c not in r:
                    new[c] = -b * pv
                    col_count[c] = col_count.get(c, 0) + 1
            if new:
                _strip_content(new)
                act[ri] = new
    return rank


def _pick_pivot(act: dict[int, dict[int, int]], col_count: dict[int, int]) -> tuple[int, int]:
    shortlist = sorted(act.items(), key=lambda item: (len(item[1]), item[0]))[:_PIVOT_ROWS]
    best_key = None
    best = (-1, -1)
    for i, r in shortlist:
        rc = len(r) - 1
        for c, v in r.items():
            key = (rc * (col_count[c] - 1), v.bit_length() if v > 0 else (-v).bit_length(), i, c)
            if best_key is None or key < best_key:
                best_key = key
                best = (i, c)
    return best


def _strip_content(row: dict[int, int]) -> None:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return
    if g > 1:
        for c in row:
            row[c] //= g


def fj_inverse(mat: list[list[int]]) -> tuple[list[list[int]], int]:
    """Exact inverse of a square integer matrix.

    Runs one-step fraction-free Gauss-Jordan elimination on ``[mat | I]``.
    Every division is exact; on return the left block has been reduced to
    ``den * I`` and the right block ``num`` satisfies ``mat^-1 = num / den``.
    Raises ``ZeroDivisionError`` if the matrix is singular.
    """
    n = len(mat)
    width = 2 * n
    m = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(mat)]
    prev = 1
    for t in range(n):
        p = -1
        best = None
        for i in range(t, n):
            v = m[i][t]
            if v:
                key = (v.bit_length() if v > 0 else (-v).bit_length(), i)
                if best is None or key < best:
                    best = key
                    p = i
        if p < 0:
            raise ZeroDivisionError("matrix is singular")
        if p != t:
            m[t], m[p] = m[p], m[t]
        piv = m[t][t]
        mt = m[t]
        for i in range(n):
            if i == t:
                continue
            mi = m[i]
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
    num = [row[n:] for row in m]
    return num, prev


def imat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    """Dense integer matrix product ``a @ b``."""
    if not a or not b:
        return []
    ncols = len(b[0])
    out = []
    for arow in a:
        acc = [0] * ncols
        for k, v in enumerate(arow):
            if v:
                brow = b[k]
                for j in range(ncols):
                    w = brow[j]
                    if w:
                        acc[j] += v * w
        out.append(acc)
    return out


def spmul(a: list[dict[int, int]], b: list[dict[int, int]]) -> list[dict[int, int]]:
    """Sparse integer matrix product ``a @ b`` (rows of dicts)."""
    out = []
    for arow in a:
        acc: dict[int, int] = {}
        for k, v in arow.items():
            for c, w in b[k].items():
                acc[c] = acc.get(c, 0) + v * w
        out.append({c: v for c, v in acc.items() if v})
    return out
