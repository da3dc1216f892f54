"""
Tests for mfrctl.kernels — graded kernels, minimal generating systems, factorization.

Results are checked grade by grade against dense GF(2) linear algebra.
"""

import numpy as np
import pytest

from mfrctl.gf2 import gf2_matmul, gf2_rank, in_span, nullity
from mfrctl.grades import Grade, join_all, leq, lt
from mfrctl.kernels import factorize, ker_basis, mgs_with_ker
from mfrctl.matrix import GradedMatrix
from mfrctl.types import InvalidMatrixError, NotInSpanError, RunStats

SEEDS = range(40)


def _random_valid(seed: int, m: int = 5, n: int = 7) -> GradedMatrix:
    """Random valid matrix: column grade = join of its rows plus a random offset."""
    rng = np.random.default_rng(seed)
    rows = [Grade(int(x), int(y)) for x, y in rng.integers(0, 4, size=(m, 2))]
    columns, grades = [], []
    for _ in range(n):
        support = sorted(int(i) for i in np.flatnonzero(rng.random(m) < 0.4))
        base = join_all([rows[i] for i in support]) if support else Grade(0, 0)
        dx, dy = rng.integers(0, 2, size=2)
        columns.append(support)
        grades.append(Grade(base.x + int(dx), base.y + int(dy)))
    return GradedMatrix(rows, grades, columns)


def _grid(grades):
    xs = [g.x for g in grades] or [0]
    ys = [g.y for g in grades] or [0]
    for x in range(min(xs), max(xs) + 2):
        for y in range(min(ys), max(ys) + 2):
            yield Grade(x, y)


def _cols_at(M: GradedMatrix, z: Grade, strict: bool = False):
    test = lt if strict else leq
    return [j for j, g in enumerate(M.col_grades) if test(g, z)]


def _assert_kernel(M: GradedMatrix, K: GradedMatrix):
    """K is a graded basis of ker M at every grade."""
    assert K.row_grades == M.col_grades
    assert K.is_valid()
    dense_m, dense_k = M.to_dense(), K.to_dense()
    assert gf2_rank(dense_k) == K.n
    if K.n:
        assert not gf2_matmul(dense_m, dense_k).any()
    for z in _grid(M.col_grades):
        cols = _cols_at(M, z)
        kcols = _cols_at(K, z)
        assert gf2_rank(dense_k[:, kcols]) == nullity(dense_m[:, cols]), f"at {z}"


class TestKerBasis:
    def test_single_column_kernel(self):
        M = GradedMatrix([(0, 0)], [(0, 1), (1, 0)], [[0], [0]])
        K = ker_basis(M)
        assert K.columns == [[0, 1]]
        assert K.col_grades == [Grade(1, 1)]

    def test_injective(self):
        K = ker_basis(GradedMatrix.identity([(0, 0), (1, 1)]))
        assert K.n == 0

    def test_zero_column(self):
        K = ker_basis(GradedMatrix.empty([(0, 0)], [(2, 3)]))
        assert K.columns == [[0]]
        assert K.col_grades == [Grade(2, 3)]

    @pytest.mark.parametrize("seed", SEEDS)
    def test_random(self, seed):
        M = _random_valid(seed)
        _assert_kernel(M, ker_basis(M))

    def test_lex_ordered_output(self):
        K = ker_basis(_random_valid(3, m=4, n=9))
        keys = [(g.x, g.y) for g in K.col_grades]
        assert keys == sorted(keys)

    def test_backends_agree(self):
        for seed in range(10):
            M = _random_valid(seed)
            assert ker_basis(M, backend="heap") == ker_basis(M, backend="vector")

    def test_invalid_rejected(self):
        with pytest.raises(InvalidMatrixError):
            ker_basis(GradedMatrix([(1, 0)], [(0, 1)], [[0]]))

    def test_stats(self):
        stats = RunStats()
        ker_basis(GradedMatrix([(0, 0)], [(0, 1), (1, 0)], [[0], [0]]), stats=stats)
        assert stats.kernel_additions == 1
        assert stats.peak_columns == 2


class TestMgsWithKer:
    def test_drops_redundant_column(self):
        M = GradedMatrix([(0, 0)], [(0, 0), (1, 1)], [[0], [0]])
        gens, rels = mgs_with_ker(M)
        assert gens.col_grades == [Grade(0, 0)]
        assert rels.n == 0

    def test_relation_at_join(self):
        M = GradedMatrix([(0, 0)], [(0, 1), (1, 0)], [[0], [0]])
        gens, rels = mgs_with_ker(M)
        assert gens.n == 2
        assert rels.columns == [[0, 1]]
        assert rels.col_grades == [Grade(1, 1)]

    @pytest.mark.parametrize("seed", SEEDS)
    def test_random(self, seed):
        M = _random_valid(seed)
        gens, rels = mgs_with_ker(M)
        assert gens.is_valid()
        dense_m, dense_g = M.to_dense(), gens.to_dense()
        for j, g in enumerate(gens.col_grades):
            assert in_span(dense_m[:, _cols_at(M, g)], dense_g[:, j])
        for z in _grid(M.col_grades):
            here = gf2_rank(dense_m[:, _cols_at(M, z)])
            below = gf2_rank(dense_m[:, _cols_at(M, z, strict=True)])
            assert gf2_rank(dense_g[:, _cols_at(gens, z)]) == here, f"span at {z}"
            assert gens.col_grades.count(z) == here - below, f"minimality at {z}"
        _assert_kernel(gens, rels)


class TestFactorize:
    def test_solves(self):
        A = GradedMatrix([(0, 0)] * 3, [(1, 0), (2, 0)], [[0, 1], [0, 2]])
        B = GradedMatrix([(0, 0)] * 3, [(2, 2)], [[1, 2]])
        N = factorize(B, A)
        assert N.columns == [[0, 1]]
        assert N.row_grades == A.col_grades
        assert N.col_grades == B.col_grades

    def test_not_in_span(self):
        A = GradedMatrix([(0, 0)] * 2, [(1, 0)], [[0, 1]])
        B = GradedMatrix([(0, 0)] * 2, [(1, 1)], [[0]])
        with pytest.raises(NotInSpanError):
            factorize(B, A)

    @pytest.mark.parametrize("n_jobs", [1, 2])
    def test_random(self, n_jobs):
        rng = np.random.default_rng(5)
        for seed in range(10):
            M = _random_valid(seed, m=4, n=8)
            A = ker_basis(M)
            if A.n == 0:
                continue
            coeffs = (rng.random((A.n, 3)) < 0.5).astype(np.uint8)
            dense_b = gf2_matmul(A.to_dense(), coeffs)
            B = GradedMatrix.from_dense(dense_b, A.row_grades, [(9, 9)] * 3)
            N = factorize(B, A, n_jobs=n_jobs)
            assert np.array_equal(N.to_dense(), coeffs)

    def test_row_mismatch(self):
        A = GradedMatrix([(0, 0)], [(0, 0)], [[0]])
        B = GradedMatrix([(0, 0)] * 2, [], [])
        with pytest.raises(InvalidMatrixError):
            factorize(B, A)
