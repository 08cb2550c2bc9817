"""Exact linear algebra over duck-typed field scalars.

Everything here works for Fraction, TowerScalar and FloatScalar entries alike:
the only requirements are +, -, *, / and an `== 0` test (exact for the first
two, tolerance-based for floats).  Matrices are sequences of rows; functions
return tuples of tuples so results stay hashable and immutable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def mat_from_rows(rows) -> tuple:
    return tuple(tuple(row) for row in rows)


def zeros(nrows: int, ncols: int, zero=Fraction(0)) -> tuple:
    return tuple(tuple(zero for _ in range(ncols)) for _ in range(nrows))


def identity(n: int, one=Fraction(1), zero=Fraction(0)) -> tuple:
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def transpose(mat) -> tuple:
    return tuple(zip(*[tuple(r) for r in mat])) if mat else ()


def mat_add(A, B) -> tuple:
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A, B) -> tuple:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))

def mat_neg(A) -> tuple:
    return tuple(tuple(-a for a in row) for row in A)


def mat_scale(c, A) -> tuple:
    return tuple(tuple(c * a for a in row) for row in A)


def mat_mul(A, B) -> tuple:
    """Matrix product skipping zero entries of A (gammas are very sparse)."""
    Bt = [tuple(r) for r in B]
    n = len(Bt[0]) if Bt else 0
    out = []
    for row in A:
        acc = [None] * n
        for k, aik in enumerate(row):
            if aik == 0:
                continue
            brow = Bt[k]
            for j in range(n):
                v = brow[j]
                if v == 0:
                    continue
                t = aik * v
                acc[j] = t if acc[j] is None else acc[j] + t
        zero = _zero_like(row[0]) if row else Fraction(0)
        out.append(tuple(zero if x is None else x for x in acc))
    return tuple(out)


def _zero_like(x):
    return x - x


def mat_vec(A, v) -> tuple:
    out = []
    for row in A:
        acc = None
        for a, x in zip(row, v):
            if a == 0 or x == 0:
                continue
            t = a * x
            acc = t if acc is None else acc + t
        out.append(_zero_like(row[0]) if acc is None else acc)
    return tuple(out)


def vec_add(u, v) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v) -> tuple:
    return tuple(c * x for x in v)


def is_zero_matrix(A) -> bool:
    return all(all(x == 0 for x in row) for row in A)


def is_zero_vector(v) -> bool:
    return all(x == 0 for x in v)


def mat_equal(A, B) -> bool:
    return all(all(a == b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def rref(rows: list[list], ncols: int) -> list[int]:
    """In-place reduced row echelon form; returns the pivot column list."""
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(rows)):
            if not rows[i][c] == 0:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c] == 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def matrix_rank(mat) -> int:
    rows = [list(r) for r in mat]
    if not rows:
        return 0
    return len(rref(rows, len(rows[0])))


def nullspace(mat, ncols: int | None = None) -> list[tuple]:
    """Basis of the right kernel; free variables get 1, pivots back-substituted."""
    rows = [list(r) for r in mat]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for r, pc in enumerate(pivots):
            coeff = rows[r][free]
            if not coeff == 0:
                vec[pc] = -coeff
        basis.append(tuple(vec))
    return basis


def solve_linear(A, b):
    """One exact solution of A x = b (free variables set to 0), or None."""
    rows = [list(ra) + [bv] for ra, bv in zip(A, b)]
    ncols = len(A[0]) if A else 0
    pivots = rref(rows, ncols)
    for row in rows[len(pivots):]:
        if not row[-1] == 0:
            return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][-1]
    return tuple(x)


def sparse_nullspace(eqs: Sequence[dict], ncols: int) -> list[tuple]:
    """Kernel basis for a sparse system given as dicts {column: coefficient}.

    Designed for the half-space Killing solve, where each equation touches a
    handful of unknowns; pivoting is by lowest column index for determinism.
    """
    pivots: dict[int, dict] = {}
    for eq in eqs:
        row = {c: v for c, v in eq.items() if not v == 0}
        while row:
            hit = None
            for c in sorted(row):
                if c in pivots:
                    hit = c
                    break
            if hit is None:
                break
            f = row.pop(hit)
            for c, v in pivots[hit].items():
                if c == hit:
                    continue
                nv = row.get(c)
                nv = -f * v if nv is None else nv - f * v
                if nv == 0:
                    row.pop(c, None)
                else:
                    row[c] = nv
        if not row:
            continue
        pc = min(row)
        pv = row[pc]
        pivots[pc] = {c: v / pv for c, v in row.items()}
    # full reduction: clear pivot columns from every other pivot row
    for pc in sorted(pivots, reverse=True):
        prow = pivots[pc]
        for qc, qrow in pivots.items():
            if qc == pc or pc not in qrow:
                continue
            f = qrow.pop(pc)
            for c, v in prow.items():
                if c == pc:
                    continue
                nv = qrow.get(c)
                nv = -f * v if nv is None else nv - f * v
                if nv == 0:
                    qrow.pop(c, None)
                else:
                    qrow[c] = nv
    basis = []
    for free in range(ncols):
        if free in pivots:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for pc, prow in pivots.items():
            coeff = prow.get(free)
            if coeff is not None and not coeff == 0:
                vec[pc] = -coeff
        basis.append(tuple(vec))
    return basis


def normalize_vector(v) -> tuple:
    """Scale so the first nonzero entry is 1 (deterministic bases)."""
    for x in v:
        if not x == 0:
            return tuple(y / x for y in v)
    return tuple(v)
