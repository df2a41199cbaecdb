"""Exact sparse linear algebra over Q(i) for the commutant and closure solves.

Rows are dicts column -> GaussianRational.  Elimination is fraction free:
rows are scaled to Gaussian-integer entries and kept primitive (content
divided out) after every cross-multiplication step, which bounds entry
growth the way Bareiss elimination does while leaving pivot choice free.
Pivots follow a minimum-degree rule (sparsest live column, then sparsest
row) with explicit tie breaks, so results never depend on dict iteration
order or thread scheduling.

Phase 1 cross-eliminates each pivot column from every other row, leaving one
pivot per surviving row.  Phase 2 runs a strict left-to-right Gauss-Jordan
over those survivors.  The reduced row echelon form of a row space is
unique, so every caller-visible basis is independent of the pivot path.
"""

from __future__ import annotations

import heapq
from typing import Mapping, Sequence

from .ring import GR_ONE, GaussianRational, mpq

__all__ = ["rref", "nullspace", "solve_affine", "rank"]

_GR_ZERO = GaussianRational(0)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _make_primitive(row: dict) -> None:
    """Scale a Q(i) row in place to Gaussian-integer entries with content 1."""
    if not row:
        return
    den = 1
    for c in row.values():
        dr = int(c.re.denominator)
        di = int(c.im.denominator)
        den = den * dr // _gcd(den, dr)
        den = den * di // _gcd(den, di)
    num = 0
    for c in row.values():
        num = _gcd(num, abs(int(c.re.numerator) * (den // int(c.re.denominator))))
        if num == 1 and den == 1:
            return
        num = _gcd(num, abs(int(c.im.numerator) * (den // int(c.im.denominator))))
    if num in (0, den) and den == 1:
        return
    scale = GaussianRational(mpq(den, num if num else 1), 0)
    for k in row:
        row[k] = row[k] * scale


def _phase1(rows: Sequence[Mapping], pivotable) -> list[dict]:
    """Fraction-free Gauss-Jordan with minimum-degree pivoting.

    Returns surviving rows, each owning one pivot column that is zero in all
    other rows.  pivotable(col) -> bool masks columns that must not pivot.
    """
    work: list[dict] = []
    for r in rows:
        row = {c: v for c, v in r.items() if v}
        if row:
            _make_primitive(row)
            work.append(row)

    col_rows: dict[int, set] = {}
    for idx, row in enumerate(work):
        for c in row:
            col_rows.setdefault(c, set()).add(idx)

    heap = [(len(owners), col) for col, owners in col_rows.items() if pivotable(col)]
    heapq.heapify(heap)
    pivot_of_row: dict[int, int] = {}
    pivoted_cols: set = set()

    while heap:
        cnt, pcol = heapq.heappop(heap)
        if pcol in pivoted_cols:
            continue
        owners = col_rows.get(pcol)
        if not owners:
            continue
        if len(owners) != cnt:
            heapq.heappush(heap, (len(owners), pcol))
            continue
        candidates = [ridx for ridx in owners if ridx not in pivot_of_row]
        if not candidates:
            # every row holding this column already pivots elsewhere; since
            # phase 1 cross-eliminates, such a column stays for phase 2
            continue
        pidx = min(candidates, key=lambda ridx: (len(work[ridx]), ridx))
        prow = work[pidx]
        pval = prow[pcol]
        pivot_of_row[pidx] = pcol
        pivoted_cols.add(pcol)

        touched_cols: set = set()
        for ridx in sorted(owners - {pidx}):
            row = work[ridx]
            rval = row.pop(pcol)
            col_rows[pcol].discard(ridx)
            for c in row:
                row[c] = row[c] * pval
            for c, v in prow.items():
                if c == pcol:
                    continue
                delta = rval * v
                cur = row.get(c)
                if cur is None:
                    row[c] = -delta
                    col_rows.setdefault(c, set()).add(ridx)
                    touched_cols.add(c)
                else:
                    nv = cur - delta
                    if nv:
                        row[c] = nv
                    else:
                        del row[c]
                        col_rows[c].discard(ridx)
                        touched_cols.add(c)
            _make_primitive(row)
            if not row:
                own_pivot = pivot_of_row.pop(ridx, None)
                if own_pivot is not None:
                    pivoted_cols.discard(own_pivot)
        col_rows[pcol] = {pidx}
        for c in touched_cols:
            if c not in pivoted_cols and pivotable(c) and col_rows.get(c):
                heapq.heappush(heap, (len(col_rows[c]), c))

    return [row for row in work if row]


def _phase2(
    rows: list[dict],
    col_order: Sequence[int],
    pivot_eligible=None,
) -> tuple[list[int], list[dict], list[dict]]:
    """Strict left-to-right Gauss-Jordan.

    Returns (pivot_cols, rref_rows, leftovers).  Rows come back sorted by
    pivot position in col_order, each with a unit pivot and that column
    cleared everywhere else: the canonical RREF.  Rows whose support lies
    entirely in pivot-ineligible columns are returned as leftovers.
    """
    work = [dict(r) for r in rows if r]
    taken: dict[int, int] = {}
    for col in col_order:
        if pivot_eligible is not None and not pivot_eligible(col):
            continue
        pidx = None
        for ridx, row in enumerate(work):
            if ridx in taken.values():
                continue
            if row.get(col):
                pidx = ridx
                break
        if pidx is None:
            continue
        prow = work[pidx]
        inv = GR_ONE / prow[col]
        for c in list(prow):
            prow[c] = prow[c] * inv
        for ridx, row in enumerate(work):
            if ridx == pidx:
                continue
            rval = row.get(col)
            if not rval:
                continue
            for c, v in prow.items():
                cur = row.get(c)
                nv = -(rval * v) if cur is None else cur - rval * v
                if nv:
                    row[c] = nv
                elif cur is not None:
                    del row[c]
        taken[col] = pidx

    order_pos = {c: i for i, c in enumerate(col_order)}
    pivot_cols = sorted(taken, key=lambda c: order_pos[c])
    out_rows = [work[taken[c]] for c in pivot_cols]
    used = set(taken.values())
    leftovers = [r for i, r in enumerate(work) if r and i not in used]
    return pivot_cols, out_rows, leftovers


def rref(
    rows: Sequence[Mapping],
    ncols: int,
    frozen_cols: Sequence[int] = (),
) -> tuple[list[int], list[dict]]:
    """Canonical reduced row echelon form.

    Columns are ordered 0..ncols-1; frozen columns are moved to the end of
    the order and never chosen as phase-1 pivots (used for the right hand
    side of affine solves).
    """
    frozen = set(frozen_cols)
    survivors = _phase1(rows, pivotable=lambda c: c not in frozen)
    col_order = [c for c in range(ncols) if c not in frozen] + sorted(frozen)
    pivots, rows_r, leftovers = _phase2(survivors, col_order)
    if leftovers:
        raise AssertionError("nonzero rows left without pivot after phase 2")
    return pivots, rows_r


def rank(rows: Sequence[Mapping], ncols: int) -> int:
    return len(rref(rows, ncols)[0])


def nullspace(rows: Sequence[Mapping], ncols: int) -> list[dict]:
    """Canonical basis of {x : A x = 0}.

    The standard free-column vectors of the RREF of A are themselves reduced
    to canonical RREF under the same column order, so the basis is the
    unique echelon basis of the solution space.
    """
    pivot_cols, rows_r = rref(rows, ncols)
    pivot_set = set(pivot_cols)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis: list[dict] = []
    for f in free_cols:
        vec = {f: GR_ONE}
        for pcol, row in zip(pivot_cols, rows_r):
            v = row.get(f)
            if v:
                vec[pcol] = -v
        basis.append(vec)
    if not basis:
        return []
    _, canon, _ = _phase2([dict(b) for b in basis], list(range(ncols)))
    return canon


def solve_affine(
    eq_rows: Sequence[Mapping],
    ncols: int,
    rhs_col: int,
) -> tuple[dict, list[dict], int]:
    """Solve sum_c a_rc x_c = b_r given as rows over columns + rhs_col.

    Returns (particular, nullspace_basis, dropped) where particular sets all
    free variables to zero, nullspace_basis is the canonical basis over the
    unknown columns, and dropped counts the rows reduced to rhs-only support
    (the inconsistent part of the system); the solution then satisfies the
    remaining consistent subsystem.  For an inconsistent system the split
    into consistent and dropped rows follows the deterministic phase-1
    elimination order, which is part of the documented convention.
    """
    survivors = _phase1(eq_rows, pivotable=lambda c: c != rhs_col)
    col_order = [c for c in range(ncols) if c != rhs_col] + [rhs_col]
    a_pivots, a_rows, leftovers = _phase2(
        survivors, col_order, pivot_eligible=lambda c: c != rhs_col
    )
    dropped = len(leftovers)
    particular: dict[int, GaussianRational] = {}
    for pcol, row in zip(a_pivots, a_rows):
        v = row.get(rhs_col)
        if v:
            particular[pcol] = v

    pivot_set = set(a_pivots)
    free_cols = [c for c in range(ncols) if c != rhs_col and c not in pivot_set]
    basis = []
    for f in free_cols:
        vec = {f: GR_ONE}
        for pcol, row in zip(a_pivots, a_rows):
            v = row.get(f)
            if v:
                vec[pcol] = -v
        basis.append(vec)
    if basis:
        cols_wo_rhs = [c for c in range(ncols) if c != rhs_col]
        _, basis, _ = _phase2([dict(b) for b in basis], cols_wo_rhs)
    return particular, basis, dropped
