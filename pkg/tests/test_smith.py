"""Integer lattice normal forms: Smith, Hermite, saturation, solving."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbicert.errors import DimensionMismatch
from orbicert.smith import (
    diagonal_of,
    hermite_row_basis,
    int_det,
    int_mat_mul,
    int_mat_vec,
    integer_solve,
    lattice_saturation,
    left_kernel_saturated,
    rational_rows_to_integer,
    smith_normal_form,
)

ENTRY = st.integers(min_value=-9, max_value=9)


def int_matrices(max_rows=4, max_cols=4):
    return st.integers(min_value=1, max_value=max_rows).flatmap(
        lambda r: st.integers(min_value=1, max_value=max_cols).flatmap(
            lambda c: st.lists(
                st.lists(ENTRY, min_size=c, max_size=c), min_size=r, max_size=r
            )
        )
    )


def cofactor_det(mat):
    """Independent oracle: Laplace expansion over Fractions."""
    n = len(mat)
    if n == 0:
        return 1
    if n == 1:
        return mat[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in mat[1:]]
        term = mat[0][j] * cofactor_det(minor)
        total += term if j % 2 == 0 else -term
    return total


@given(st.lists(st.lists(ENTRY, min_size=4, max_size=4), min_size=4, max_size=4))
def test_int_det_matches_cofactor_expansion(mat):
    assert int_det(mat) == cofactor_det(mat)


def test_int_det_rejects_ragged():
    with pytest.raises(DimensionMismatch):
        int_det([[1, 2], [3]])


def test_smith_frozen_values():
    _, d, _, _, _ = smith_normal_form([[2, 1], [1, 2]])
    assert diagonal_of(d) == [1, 3]
    _, d, _, _, _ = smith_normal_form([[1, 1], [1, 2]])
    assert diagonal_of(d) == [1, 1]
    _, d, _, _, _ = smith_normal_form([[2, 0], [0, 4]])
    assert diagonal_of(d) == [2, 4]
    _, d, _, _, _ = smith_normal_form([[0, 0], [0, 0]])
    assert diagonal_of(d) == []


@given(int_matrices())
def test_smith_properties(mat):
    u, d, v, uinv, vinv = smith_normal_form(mat)
    rows, cols = len(mat), len(mat[0])
    assert int_mat_mul(int_mat_mul(u, mat), v) == [list(r) for r in d]
    for i in range(rows):
        for j in range(cols):
            if i != j:
                assert d[i][j] == 0
    diag = diagonal_of(d)
    for a, b in zip(diag, diag[1:]):
        assert b % a == 0
    assert abs(int_det(u)) == 1
    assert abs(int_det(v)) == 1
    ident_r = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    ident_c = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]
    assert int_mat_mul(u, uinv) == ident_r
    assert int_mat_mul(v, vinv) == ident_c


def in_row_lattice(rows, vec, width):
    if not rows:
        return not any(vec)
    mat = [[r[i] for r in rows] for i in range(width)]
    return integer_solve(mat, list(vec)) is not None


@given(int_matrices(3, 4), st.randoms(use_true_random=False))
def test_hermite_canonical_and_lattice_preserving(mat, rng):
    width = len(mat[0])
    basis = hermite_row_basis(mat, width)
    for row in basis:
        piv = next(i for i, x in enumerate(row) if x)
        assert row[piv] > 0
    # same lattice both ways
    for row in mat:
        assert in_row_lattice(basis, row, width)
    for row in basis:
        assert in_row_lattice([list(r) for r in mat], row, width)
    # canonical under unimodular re-generation
    other = [list(r) for r in mat]
    rng.shuffle(other)
    if len(other) >= 2:
        other[0] = [a + 2 * b for a, b in zip(other[0], other[1])]
    other.append([0] * width)
    assert hermite_row_basis(other, width) == basis


def test_hermite_frozen():
    assert hermite_row_basis([[2, 4], [0, 3]]) == [[2, 1], [0, 3]]
    assert hermite_row_basis([[0, 0]]) == []


@given(int_matrices(3, 4))
def test_saturation_contains_and_is_saturated(mat):
    width = len(mat[0])
    sat = lattice_saturation(mat, width)
    for row in mat:
        if any(row):
            assert in_row_lattice(sat, row, width)
    if sat:
        _, d, _, _, _ = smith_normal_form(sat)
        assert all(abs(x) == 1 for x in diagonal_of(d))
        assert len(diagonal_of(d)) == len(sat)


def test_saturation_frozen():
    # Q-span of (2,4) meets Z^2 in the lattice generated by (1,2)
    assert lattice_saturation([[2, 4]]) == [[1, 2]]


@given(int_matrices())
def test_left_kernel(mat):
    rows = len(mat)
    ker = left_kernel_saturated(mat)
    for u in ker:
        assert all(
            sum(u[i] * mat[i][j] for i in range(rows)) == 0
            for j in range(len(mat[0]))
        )
    _, d, _, _, _ = smith_normal_form(mat)
    assert len(ker) == rows - len(diagonal_of(d))


@given(int_matrices(), st.lists(ENTRY, min_size=1, max_size=4))
def test_integer_solve_constructed(mat, xs):
    cols = len(mat[0])
    x = (xs * cols)[:cols]
    target = int_mat_vec(mat, x)
    sol = integer_solve(mat, target)
    assert sol is not None
    assert int_mat_vec(mat, sol) == target
    assert all(isinstance(c, int) for c in sol)


def test_integer_solve_unsolvable():
    assert integer_solve([[2]], [1]) is None
    assert integer_solve([[2, 0], [0, 3]], [1, 1]) is None
    assert integer_solve([[1, 1]], [5]) is not None


def test_rational_rows_primitive():
    rows = rational_rows_to_integer(
        [[Fraction(1, 2), Fraction(1, 3)], [0, 0], [Fraction(-2), Fraction(4)]]
    )
    assert rows == [[3, 2], [-1, 2]]
