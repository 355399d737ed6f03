"""Small exact linear algebra helpers.

Matrices are tuples of tuples.  Entries are any scalar ring supporting
+, -, *, is_zero (QQi, PolyScalar); field operations (rank, solve) are
restricted to QQi entries.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .scalars import QQI_ONE, QQI_ZERO, QQi

Matrix = Tuple[tuple, ...]


def mat_from_rows(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def mat_shape(a: Matrix) -> Tuple[int, int]:
    return (len(a), len(a[0]) if a else 0)


def mat_zero(n: int, m: int, zero) -> Matrix:
    return tuple(tuple(zero for _ in range(m)) for _ in range(n))


def mat_eye(n: int, zero, one) -> Matrix:
    return tuple(
        tuple(one if i == j else zero for j in range(n)) for i in range(n)
    )


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b)
    )


def mat_neg(a: Matrix) -> Matrix:
    return tuple(tuple(-x for x in row) for row in a)

def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return mat_add(a, mat_neg(b))


def mat_scale(c, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k = mat_shape(a)
    k2, m = mat_shape(b)
    if k != k2:
        raise ValueError(f"matrix shapes {n}x{k} and {k2}x{m} do not compose")
    bt = list(zip(*b))
    out = []
    for row in a:
        orow = []
        for col in bt:
            acc = None
            for x, y in zip(row, col):
                p = x * y
                acc = p if acc is None else acc + p
            orow.append(acc)
        out.append(tuple(orow))
    return tuple(out)


def mat_trace(a: Matrix):
    n, m = mat_shape(a)
    if n != m:
        raise ValueError("trace of a non-square matrix")
    acc = a[0][0]
    for i in range(1, n):
        acc = acc + a[i][i]
    return acc


def mat_conj_transpose(a: Matrix) -> Matrix:
    return tuple(
        tuple(a[i][j].conj() for i in range(len(a)))
        for j in range(len(a[0]))
    )


def mat_is_zero(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def mat_eq(a: Matrix, b: Matrix) -> bool:
    return mat_shape(a) == mat_shape(b) and all(
        x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb)
    )


# -- QQi field routines -----------------------------------------------


def qq_rank(a: Sequence[Sequence[QQi]]) -> int:
    """Rank over the Gaussian rationals by fraction-exact elimination."""
    rows = [list(r) for r in a]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    col = 0
    while rank < len(rows) and col < ncols:
        piv = next(
            (r for r in range(rank, len(rows)) if not rows[r][col].is_zero()),
            None,
        )
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [inv * x for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def qq_nullity(a: Sequence[Sequence[QQi]]) -> int:
    if not a:
        return 0
    return len(a[0]) - qq_rank(a)


def qq_solve(a: Sequence[Sequence[QQi]], b: Sequence[QQi]) -> Optional[List[QQi]]:
    """One exact solution of A x = b, or None if inconsistent."""
    rows = [list(r) + [bv] for r, bv in zip(a, b)]
    ncols = len(a[0]) if a else 0
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next(
            (r for r in range(rank, len(rows)) if not rows[r][col].is_zero()),
            None,
        )
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [inv * x for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    for r in range(rank, len(rows)):
        if not rows[r][ncols].is_zero():
            return None
    x = [QQI_ZERO] * ncols
    for r, col in enumerate(pivots):
        x[col] = rows[r][ncols]
    return x


def qq_inverse_matrix(a: Sequence[Sequence[QQi]]) -> Matrix:
    n = len(a)
    rows = [list(r) + [QQI_ONE if i == j else QQI_ZERO for j in range(n)]
            for i, r in enumerate(a)]
    for col in range(n):
        piv = next(
            (r for r in range(col, n) if not rows[r][col].is_zero()), None
        )
        if piv is None:
            raise ValueError("matrix is singular")
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = rows[col][col].inverse()
        rows[col] = [inv * x for x in rows[col]]
        for r in range(n):
            if r != col and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return tuple(tuple(rows[i][n:]) for i in range(n))


def qq_kernel_basis(a: Sequence[Sequence[QQi]]) -> List[List[QQi]]:
    """Basis of the right kernel of A over QQi."""
    rows = [list(r) for r in a]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next(
            (r for r in range(rank, len(rows)) if not rows[r][col].is_zero()),
            None,
        )
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [inv * x for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [QQI_ZERO] * ncols
        v[fc] = QQI_ONE
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc]
        basis.append(v)
    return basis
