"""
Tests for mfrctl.matrix — graded matrices, validity, transposition, pivots.
"""

import numpy as np
import pytest

from mfrctl.grades import EPSILON, Grade
from mfrctl.matrix import (
    GradedMatrix,
    composes_to_zero,
    graded_transpose,
    matmul,
    pivot,
    shift,
    validate,
    with_minimal_col_grades,
)
from mfrctl.types import InvalidMatrixError, MfrError


def _make_example() -> GradedMatrix:
    """2×3 [[1,1,0],[0,1,1]] with rg ((1,4),(4,1)), cg ((1,7),(4,4),(7,1))."""
    return GradedMatrix.from_dense(
        [[1, 1, 0], [0, 1, 1]],
        row_grades=[(1, 4), (4, 1)],
        col_grades=[(1, 7), (4, 4), (7, 1)],
    )


class TestConstruction:
    def test_entries_normalized_mod_two(self):
        M = GradedMatrix([(0, 0), (0, 0)], [(1, 1)], [[1, 0, 1, 1]])
        assert M.columns == [[0, 1]]

    def test_column_count_mismatch(self):
        with pytest.raises(InvalidMatrixError):
            GradedMatrix([(0, 0)], [(1, 1)], [])

    def test_row_index_out_of_range(self):
        with pytest.raises(InvalidMatrixError):
            GradedMatrix([(0, 0)], [(1, 1)], [[3]])

    def test_dense_round_trip(self):
        M = _make_example()
        assert np.array_equal(M.to_dense(), [[1, 1, 0], [0, 1, 1]])
        assert M.nnz == 4
        assert M.shape == (2, 3)


class TestValidity:
    def test_valid_single_entry(self):
        assert validate(GradedMatrix([(0, 0)], [(1, 1)], [[0]]))

    def test_incomparable_entry(self):
        assert not validate(GradedMatrix([(1, 0)], [(0, 1)], [[0]]))

    def test_zero_entry_unconstrained(self):
        assert validate(GradedMatrix([(1, 0)], [(0, 1)], [[]]))

    def test_minimal_needs_strict(self):
        assert not GradedMatrix([(0, 0)], [(0, 0)], [[0]]).is_minimal()
        assert GradedMatrix([(0, 0)], [(0, 1)], [[0]]).is_minimal()


class TestTranspose:
    def test_example(self):
        T = graded_transpose(_make_example())
        assert np.array_equal(T.to_dense(), [[1, 0], [1, 1], [0, 1]])
        assert T.row_grades == [Grade(-7, -1), Grade(-4, -4), Grade(-1, -7)]
        assert T.col_grades == [Grade(-4, -1), Grade(-1, -4)]

    def test_one_by_one(self):
        M = GradedMatrix([(0, 0)], [(0, 0)], [[0]])
        assert graded_transpose(M) == M

    def test_involution(self):
        M = _make_example()
        assert graded_transpose(graded_transpose(M)) == M

    def test_preserves_validity(self):
        assert graded_transpose(_make_example()).is_valid()


class TestShift:
    def test_zero_shift(self):
        M = _make_example()
        assert shift(M, Grade(0, 0)) == M

    def test_inverse(self):
        M = _make_example()
        assert shift(shift(M, EPSILON), Grade(-1, -1)) == M

    def test_translates_grades(self):
        M = shift(GradedMatrix([(0, 1)], [(2, 2)], [[0]]), EPSILON)
        assert M.row_grades == [Grade(1, 2)]
        assert M.col_grades == [Grade(3, 3)]


class TestMinimalColumnGrades:
    def test_join_of_rows(self):
        M = with_minimal_col_grades([[0, 1]], [(0, 1), (1, 0)])
        assert M.col_grades == [Grade(1, 1)]

    def test_single_entry(self):
        M = with_minimal_col_grades([[0]], [(0, 1), (1, 0)])
        assert M.col_grades == [Grade(0, 1)]
        assert M.is_valid()

    def test_zero_column_rejected(self):
        with pytest.raises(InvalidMatrixError):
            with_minimal_col_grades([[]], [(0, 1), (1, 0)])


class TestPivot:
    ROWS = [Grade(0, 2), Grade(1, 1), Grade(2, 0)]

    def test_colex(self):
        assert pivot([0, 1], self.ROWS, "colex") == 0

    def test_lex(self):
        assert pivot([0, 1], self.ROWS, "lex") == 1

    def test_index(self):
        assert pivot([0, 1], self.ROWS, "index") == 1

    def test_zero_column(self):
        for kind in ("index", "lex", "colex"):
            assert pivot([], self.ROWS, kind) is None

    def test_ties_pick_smallest_index(self):
        rows = [Grade(1, 1), Grade(1, 1)]
        assert pivot([0, 1], rows, "lex") == 0
        assert pivot([0, 1], rows, "colex") == 0

    def test_bad_kind(self):
        with pytest.raises(MfrError):
            pivot([0], self.ROWS, "diagonal")


class TestProducts:
    def test_matmul(self):
        A = _make_example()
        B = GradedMatrix([(1, 7), (4, 4), (7, 1)], [(7, 7)], [[0, 1, 2]])
        assert matmul(A, B).is_zero()
        assert composes_to_zero(A, B)

    def test_shape_mismatch(self):
        A = _make_example()
        with pytest.raises(InvalidMatrixError):
            matmul(A, A)
        assert not composes_to_zero(A, A)

    def test_restrict(self):
        M = _make_example().restrict([1], [1, 2])
        assert M.columns == [[0], [0]]
        assert M.row_grades == [Grade(4, 1)]
        assert M.col_grades == [Grade(4, 4), Grade(7, 1)]

    def test_identity_and_empty(self):
        I2 = GradedMatrix.identity([(0, 0), (1, 1)])
        assert I2.columns == [[0], [1]]
        E = GradedMatrix.empty([(0, 0)], [(1, 1), (2, 2)])
        assert E.is_zero() and E.shape == (1, 2)
