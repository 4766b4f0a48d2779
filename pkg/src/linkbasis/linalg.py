"""Exact linear algebra over the fraction field Q(q).

Matrices are lists of sparse rows (dict column -> ExactScalar).  Elimination
is exact: rows are combined with field arithmetic and every surviving entry
stays in reduced canonical form, so rank and kernel results are certificates,
not numerics.

Pivoting is deterministic: within the current column the candidate row with
the fewest nonzero entries wins, ties broken by position.  This keeps fill-in
low on the very sparse generator matrices while producing stable fixtures.
"""

from __future__ import annotations

from .qfield import ExactScalar, S_ONE

Row = dict[int, ExactScalar]


def _clean(row: Row) -> Row:
    return {c: v for c, v in row.items() if v}


def rref(rows: list[Row], ncols: int) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form; returns (rows, pivot columns).

    Input rows are not mutated.  Output rows are the nonzero echelon rows,
    one per pivot column, each scaled to a unit pivot and fully reduced
    upward (entries above pivots cleared).
    """
    work = [_clean(r) for r in rows if any(r.values())]
    echelon: list[Row] = []
    pivots: list[int] = []
    for col in range(ncols):
        best = None
        for i, r in enumerate(work):
            if col in r:
                if best is None or len(r) < len(work[best]):
                    best = i
        if best is None:
            continue
        piv = work.pop(best)
        inv = piv[col].inverse()
        piv = {c: v * inv for c, v in piv.items()}
        # eliminate from remaining working rows
        nxt = []
        for r in work:
            f = r.get(col)
            if f is not None:
                r = {c: v for c, v in r.items() if c != col}
                for c, v in piv.items():
                    if c == col:
                        continue
                    w = r.get(c)
                    w = (w - f * v) if w is not None else -(f * v)
                    if w:
                        r[c] = w
                    else:
                        r.pop(c, None)
            if r:
                nxt.append(r)
        work = nxt
        # clear this column from earlier echelon rows
        for r in echelon:
            f = r.pop(col, None)
            if f is not None:
                for c, v in piv.items():
                    if c == col:
                        continue
                    w = r.get(c)
                    w = (w - f * v) if w is not None else -(f * v)
                    if w:
                        r[c] = w
                    else:
                        r.pop(c, None)
        echelon.append(piv)
        pivots.append(col)
    return echelon, pivots


def rank(rows: list[Row], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def kernel_basis(rows: list[Row], ncols: int) -> list[Row]:
    """Basis of the right kernel, one sparse vector per free column."""
    echelon, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    by_pivot = dict(zip(pivots, echelon))
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec: Row = {free: S_ONE}
        for p in pivots:
            v = by_pivot[p].get(free)
            if v:
                vec[p] = -v
        basis.append(vec)
    return basis


def solve_unique(rows: list[Row], rhs: list[ExactScalar], ncols: int) -> list[ExactScalar]:
    """Solve a consistent system with a unique solution; raise otherwise."""
    from .qfield import S_ZERO
    aug = []
    for r, b in zip(rows, rhs):
        row = dict(r)
        if b:
            row[ncols] = b
        aug.append(row)
    echelon, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        raise ValueError("inconsistent linear system")
    if len(pivots) < ncols:
        raise ValueError("linear system is underdetermined")
    sol = [S_ZERO] * ncols
    for p, row in zip(pivots, echelon):
        sol[p] = row.get(ncols, S_ZERO)
    return sol
