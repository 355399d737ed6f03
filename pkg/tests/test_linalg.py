import random
from fractions import Fraction

import numpy as np
from hypothesis import given
import hypothesis.strategies as st

from ncgkit import intlinalg, linalg
from ncgkit.scalars import QQi


def rand_qq_matrix(rng, n, m):
    return [[QQi(Fraction(rng.randint(-4, 4), rng.randint(1, 3)),
                 Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
             for _ in range(m)] for _ in range(n)]


def test_rank_nullity_against_numpy():
    rng = random.Random(0)
    for _ in range(20):
        n, m = rng.randint(1, 5), rng.randint(1, 5)
        a = rand_qq_matrix(rng, n, m)
        a_np = np.array([[complex(x) for x in row] for row in a])
        assert linalg.qq_rank(a) == np.linalg.matrix_rank(a_np, tol=1e-9)
        assert linalg.qq_nullity(a) == m - np.linalg.matrix_rank(a_np, tol=1e-9)


def test_solve_and_kernel():
    rng = random.Random(1)
    for _ in range(20):
        n, m = rng.randint(1, 5), rng.randint(1, 5)
        a = rand_qq_matrix(rng, n, m)
        x_true = [QQi(rng.randint(-3, 3)) for _ in range(m)]
        b = [sum((a[i][j] * x_true[j] for j in range(m)), QQi(0)) for i in range(n)]
        x = linalg.qq_solve(a, b)
        assert x is not None
        bx = [sum((a[i][j] * x[j] for j in range(m)), QQi(0)) for i in range(n)]
        assert bx == b
        for v in linalg.qq_kernel_basis(a):
            av = [sum((a[i][j] * v[j] for j in range(m)), QQi(0)) for i in range(n)]
            assert all(e.is_zero() for e in av)


def test_inverse_matrix():
    rng = random.Random(2)
    for _ in range(10):
        n = rng.randint(1, 4)
        a = rand_qq_matrix(rng, n, n)
        a_np = np.array([[complex(x) for x in row] for row in a])
        if abs(np.linalg.det(a_np)) < 1e-6:
            continue
        inv = linalg.qq_inverse_matrix(a)
        prod = linalg.mat_mul(a, inv)
        assert linalg.mat_eq(prod, linalg.mat_eye(n, QQi(0), QQi(1)))


small_int_matrices = st.lists(
    st.lists(st.integers(-6, 6), min_size=1, max_size=5),
    min_size=1, max_size=5,
).filter(lambda rows: len({len(r) for r in rows}) == 1)


@given(small_int_matrices)
def test_smith_normal_form_properties(rows):
    u, s, v = intlinalg.smith_normal_form(rows)
    n, m = len(rows), len(rows[0])
    # S = U A V
    uav = [[sum(u[i][k] * rows[k][l] * v[l][j] for k in range(n) for l in range(m))
            for j in range(m)] for i in range(n)]
    assert uav == s
    assert intlinalg.is_unimodular(u)
    assert intlinalg.is_unimodular(v)
    diag = intlinalg.snf_diagonal(s)
    for i in range(n):
        for j in range(m):
            if i != j:
                assert s[i][j] == 0
    assert all(d > 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert b % a == 0


@given(small_int_matrices, st.integers(0, 7))
def test_integer_solver_on_consistent_systems(rows, seed):
    rng = random.Random(seed)
    m = len(rows[0])
    x_true = [rng.randint(-3, 3) for _ in range(m)]
    b = [sum(r * x for r, x in zip(row, x_true)) for row in rows]
    x = intlinalg.solve_integer(rows, b)
    assert x is not None
    assert [sum(r * xx for r, xx in zip(row, x)) for row in rows] == b


def test_integer_solver_detects_impossible():
    # 2x = 1 has no integer solution
    assert intlinalg.solve_integer([[2]], [1]) is None


def test_integer_kernel_basis():
    a = [[1, 2, 3], [2, 4, 6]]
    basis = intlinalg.integer_kernel_basis(a)
    assert len(basis) == 2
    for v in basis:
        assert all(sum(r * x for r, x in zip(row, v)) == 0 for row in a)
