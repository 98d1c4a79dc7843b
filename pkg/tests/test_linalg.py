import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from msrcode.codes import build_c1, build_c3
from msrcode.gf import GF
from msrcode.linalg import (
    ColumnVector,
    Matrix,
    SingularMatrixError,
    inverse,
    mat_mul,
    mat_vec,
    rank,
    same_row_space,
    solve,
    stack,
)

F5 = GF(5)


def random_matrix(field, rng, rows, cols):
    return Matrix(field, rng.integers(0, field.q, size=(rows, cols)))


def test_rank_basics():
    assert rank(Matrix.identity(F5, 4)) == 4
    assert rank(Matrix.zeros(F5, 3, 4)) == 0
    assert rank(Matrix.from_rows(F5, [[1, 2], [2, 4]])) == 1


def test_example3_repair_stack_is_full_rank():
    code = build_c3(2, F5)
    S, A = code.S[0], code.A[0]
    assert rank(stack(S, mat_mul(S, A))) == 4


def test_coding_matrix_acts_on_columns():
    code = build_c1(2, F5)
    f = ColumnVector.of(F5, [1, 0, 0, 0])
    assert mat_vec(code.A[0], f) == ColumnVector.of(F5, [0, 0, 2, 0])


def test_identity_products_and_inverse():
    rng = np.random.default_rng(7)
    I = Matrix.identity(F5, 4)
    for _ in range(20):
        A = random_matrix(F5, rng, 4, 4)
        assert A @ I == A
        if rank(A) == 4:
            assert mat_mul(A, inverse(A)) == I
            assert mat_mul(inverse(A), A) == I
        else:
            with pytest.raises(SingularMatrixError):
                inverse(A)


def test_solve():
    y = ColumnVector.of(F5, [1, 2, 3])
    assert solve(Matrix.identity(F5, 3), y) == y
    with pytest.raises(SingularMatrixError):
        solve(Matrix.from_rows(F5, [[1, 1], [2, 2]]), ColumnVector.of(F5, [1, 2]))
    with pytest.raises(SingularMatrixError):
        solve(Matrix.from_rows(F5, [[1], [1]]), ColumnVector.of(F5, [1, 2]))  # inconsistent


def test_solve_repair_system_recovers_node():
    code = build_c1(2, F5)
    rng = np.random.default_rng(3)
    for i in range(1, code.k + 1):
        S, A = code.S[i - 1], code.A[i - 1]
        M = stack(S, mat_mul(S, A))
        f = ColumnVector(F5, rng.integers(0, 5, size=4))
        assert solve(M, mat_vec(M, f)) == f


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 8, 9]), st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_rank_transpose_and_inverse_law(q, r, c, seed):
    F = GF(q)
    A = random_matrix(F, np.random.default_rng(seed), r, c)
    assert rank(A) == rank(A.T)
    if r == c:
        try:
            Ainv = inverse(A)
        except SingularMatrixError:
            assert rank(A) < r
        else:
            assert rank(A) == r
            assert mat_mul(Ainv, A) == Matrix.identity(F, r)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 4, 7, 16]), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_solve_inverts_apply(q, n, seed):
    F = GF(q)
    rng = np.random.default_rng(seed)
    A = random_matrix(F, rng, n + 2, n)
    if rank(A) < n:
        return
    x = ColumnVector(F, rng.integers(0, q, size=n))
    assert solve(A, mat_vec(A, x)) == x


def test_same_row_space_and_validation():
    a = Matrix.from_rows(F5, [[1, 0, 0], [0, 1, 0]])
    b = Matrix.from_rows(F5, [[1, 1, 0], [2, 0, 0]])
    assert same_row_space(a, b)
    assert not same_row_space(a, Matrix.from_rows(F5, [[0, 0, 1], [0, 1, 0]]))
    with pytest.raises(ValueError):
        Matrix(F5, np.array([[5]]))
    with pytest.raises(ValueError):
        Matrix.from_rows(F5, [[1, 2], [3]])
    with pytest.raises(ValueError):
        stack(a, Matrix.identity(F5, 2))
    with pytest.raises(AttributeError):
        a.data = None
