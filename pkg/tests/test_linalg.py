import random

import pytest

from arcat.linalg import Field, Mat, block_diag, block_matrix, hstack, kron, solve, vstack

F5 = Field.prime(5)
F2 = Field.prime(2)
F3 = Field.prime(3)
F101 = Field.prime(101)
QQ = Field.rationals()


def rand_mat(field, rows, cols, rng):
    return Mat(field, rows, cols, [field.random(rng) for _ in range(rows * cols)])


def test_field_rejects_composite_modulus():
    with pytest.raises(ValueError):
        Field.prime(6)


def test_field_arithmetic_f5():
    assert F5.add(3, 4) == 2
    assert F5.mul(3, 4) == 2
    assert F5.inv(2) == 3
    assert F5.neg(1) == 4
    assert F5.of(-1) == 4


def test_rref_rank_one():
    a = Mat.from_rows(F5, [[1, 2], [2, 4]])
    r, pivots = a.rref()
    assert r.to_lists() == [[1, 2], [0, 0]]
    assert pivots == (0,)


def test_rref_swap():
    a = Mat.from_rows(F3, [[0, 1], [1, 0]])
    r, pivots = a.rref()
    assert r == Mat.identity(F3, 2)
    assert pivots == (0, 1)


def test_solve_identity():
    b = Mat.from_rows(F5, [[2], [3]])
    assert solve(Mat.identity(F5, 2), b) == b


def test_solve_free_variables_zero():
    a = Mat.from_rows(F2, [[1, 1]])
    b = Mat.from_rows(F2, [[1]])
    x = solve(a, b)
    assert x.to_lists() == [[1], [0]]


def test_solve_inconsistent():
    a = Mat.from_rows(F5, [[1, 2], [2, 4]])
    b = Mat.from_rows(F5, [[1], [1]])
    assert solve(a, b) is None


def test_kernel_canonical():
    a = Mat.from_rows(F5, [[1, 2]])
    k = a.kernel_basis()
    assert k.to_lists() == [[3], [1]]


def test_kernel_of_injective_is_empty():
    a = Mat.identity(F101, 3)
    assert a.kernel_basis().cols == 0


def test_kron_permutation():
    s = Mat.from_rows(F2, [[0, 1], [1, 0]])
    k = kron(s, Mat.identity(F2, 2))
    assert k.to_lists() == [
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [1, 0, 0, 0],
        [0, 1, 0, 0],
    ]


def test_empty_matrices_compose():
    a = Mat.zeros(F5, 0, 3)
    b = Mat.zeros(F5, 3, 2)
    c = a @ b
    assert (c.rows, c.cols) == (0, 2)
    assert Mat.zeros(F5, 2, 0).kernel_basis().cols == 0


def test_rationals_exact():
    a = Mat.from_rows(QQ, [[1, 2], [3, 4]])
    inv = a.inverse()
    assert inv @ a == Mat.identity(QQ, 2)
    assert a.at(0, 0) * 1 == 1  # Fraction compares with int


def test_stack_shapes():
    a = Mat.from_rows(F5, [[1, 2], [3, 4]])
    b = Mat.from_rows(F5, [[0], [1]])
    assert hstack([a, b]).cols == 3
    assert vstack([a, a]).rows == 4
    d = block_diag(F5, [a, Mat.identity(F5, 1)])
    assert (d.rows, d.cols) == (3, 3)
    assert d.at(2, 2) == 1 and d.at(2, 0) == 0
    g = block_matrix(F5, [[a, b]])
    assert g == hstack([a, b])


def test_randomized_invariants():
    rng = random.Random(7)
    for field in (F101, QQ, F5):
        for _ in range(40):
            rows = rng.randrange(0, 5)
            cols = rng.randrange(0, 5)
            a = rand_mat(field, rows, cols, rng)
            r, pivots = a.rref()
            r2, pivots2 = r.rref()
            assert r2 == r and pivots2 == pivots
            # rank plus nullity is the column count
            k = a.kernel_basis()
            assert len(pivots) + k.cols == cols
            if k.cols:
                assert (a @ k).is_zero()
            # consistent systems solve exactly
            x0 = rand_mat(field, cols, 2, rng)
            b = a @ x0
            x = solve(a, b)
            assert x is not None and a @ x == b


def test_randomized_kron_multiplicative():
    rng = random.Random(11)
    for _ in range(25):
        a = rand_mat(F101, rng.randrange(1, 4), rng.randrange(1, 4), rng)
        c = rand_mat(F101, a.cols, rng.randrange(1, 4), rng)
        b = rand_mat(F101, rng.randrange(1, 4), rng.randrange(1, 4), rng)
        d = rand_mat(F101, b.cols, rng.randrange(1, 4), rng)
        assert kron(a, b) @ kron(c, d) == kron(a @ c, b @ d)


def test_randomized_inverse():
    rng = random.Random(13)
    found = 0
    for _ in range(60):
        a = rand_mat(F101, 3, 3, rng)
        inv = a.inverse()
        if inv is not None:
            found += 1
            assert a @ inv == Mat.identity(F101, 3)
    assert found > 30
