"""
Graded Matrices over GF(2)

A GradedMatrix stores its columns as sorted lists of nonzero row
indices, together with one grade per row and one per column. It
represents a morphism of free Z²-graded modules iff it is valid: every
nonzero entry (i, j) has row_grades[i] ≤ col_grades[j].

Matrices are value-like. All transforms below return new matrices and
leave their input untouched.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from mfrctl.grades import Grade, add, as_grade, colex_key, join_all, leq, lex_key, negated
from mfrctl.types import VALID_PIVOT_KINDS, InvalidMatrixError, MfrError, PivotKind

logger = logging.getLogger(__name__)


def _normalize(col: Iterable[int]) -> List[int]:
    """GF(2) normal form of a column: entries of odd multiplicity, ascending."""
    counts = Counter(int(i) for i in col)
    return sorted(i for i, c in counts.items() if c % 2)


@dataclass
class GradedMatrix:
    """Sparse column-major GF(2) matrix with row and column grades."""

    row_grades: List[Grade] = field(default_factory=list)
    col_grades: List[Grade] = field(default_factory=list)
    columns: List[List[int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.row_grades = [as_grade(g) for g in self.row_grades]
        self.col_grades = [as_grade(g) for g in self.col_grades]
        self.columns = [_normalize(c) for c in self.columns]
        if len(self.columns) != len(self.col_grades):
            raise InvalidMatrixError(
                f"{len(self.columns)} columns but {len(self.col_grades)} column grades"
            )
        m = len(self.row_grades)
        for j, col in enumerate(self.columns):
            if col and (col[0] < 0 or col[-1] >= m):
                raise InvalidMatrixError(f"column {j}: row index out of range [0, {m})")

    # -- shape -------------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.row_grades)

    @property
    def n(self) -> int:
        return len(self.col_grades)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.m, self.n)

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def entries(self) -> Iterator[Tuple[int, int]]:
        """Yield the nonzero positions (i, j), column by column."""
        for j, col in enumerate(self.columns):
            for i in col:
                yield i, j

    # -- predicates --------------------------------------------------------

    def is_valid(self) -> bool:
        rg, cg = self.row_grades, self.col_grades
        return all(leq(rg[i], cg[j]) for i, j in self.entries())

    def is_minimal(self) -> bool:
        rg, cg = self.row_grades, self.col_grades
        return all(leq(rg[i], cg[j]) and rg[i] != cg[j] for i, j in self.entries())

    def is_zero(self) -> bool:
        return not any(self.columns)

    # -- restructuring -----------------------------------------------------

    def restrict(self, rows: Sequence[int], cols: Sequence[int]) -> GradedMatrix:
        """Submatrix on the given rows and columns, in the given order.

        Entries on dropped rows are discarded.
        """
        new_index = {r: k for k, r in enumerate(rows)}
        columns = [
            sorted(new_index[i] for i in self.columns[j] if i in new_index) for j in cols
        ]
        return GradedMatrix(
            row_grades=[self.row_grades[r] for r in rows],
            col_grades=[self.col_grades[j] for j in cols],
            columns=columns,
        )

    def restrict_rows(self, rows: Sequence[int]) -> GradedMatrix:
        return self.restrict(rows, range(self.n))

    def restrict_cols(self, cols: Sequence[int]) -> GradedMatrix:
        return self.restrict(range(self.m), cols)

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> GradedMatrix:
        """New row k is old row row_perm[k]; new column k is old column col_perm[k]."""
        return self.restrict(row_perm, col_perm)

    def copy(self) -> GradedMatrix:
        return GradedMatrix(list(self.row_grades), list(self.col_grades),
                            [list(c) for c in self.columns])

    # -- dense views -------------------------------------------------------

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.m, self.n), dtype=np.uint8)
        for i, j in self.entries():
            dense[i, j] = 1
        return dense

    @classmethod
    def from_dense(
        cls, dense, row_grades: Sequence, col_grades: Sequence,
    ) -> GradedMatrix:
        arr = np.asarray(dense, dtype=np.uint8) % 2
        if arr.ndim != 2:
            arr = arr.reshape(len(row_grades), len(col_grades))
        columns = [np.flatnonzero(arr[:, j]).tolist() for j in range(arr.shape[1])]
        return cls(list(row_grades), list(col_grades), columns)

    @classmethod
    def empty(cls, row_grades: Sequence = (), col_grades: Sequence = ()) -> GradedMatrix:
        """Zero matrix with the given grades."""
        return cls(list(row_grades), list(col_grades), [[] for _ in col_grades])

    @classmethod
    def identity(cls, grades: Sequence) -> GradedMatrix:
        return cls(list(grades), list(grades), [[j] for j in range(len(grades))])


# ---------------------------------------------------------------------------
# Structural transforms
# ---------------------------------------------------------------------------


def validate(M: GradedMatrix) -> bool:
    """True iff every nonzero entry respects row grade ≤ column grade."""
    return M.is_valid()


def graded_transpose(M: GradedMatrix) -> GradedMatrix:
    """Anti-transpose with negated grades.

    (Mᵀ)[i][j] = M[m-1-j][n-1-i], rgᵀ[i] = -cg[n-1-i], cgᵀ[j] = -rg[m-1-j].
    """
    m, n = M.m, M.n
    cols_t: List[List[int]] = [[] for _ in range(m)]
    for c, col in enumerate(M.columns):
        for r in col:
            cols_t[m - 1 - r].append(n - 1 - c)
    for col in cols_t:
        col.reverse()
    return GradedMatrix(
        row_grades=[negated(M.col_grades[n - 1 - i]) for i in range(n)],
        col_grades=[negated(M.row_grades[m - 1 - j]) for j in range(m)],
        columns=cols_t,
    )


def shift(M: GradedMatrix, z: Grade) -> GradedMatrix:
    """Translate every row and column grade by +z."""
    return GradedMatrix(
        row_grades=[add(g, z) for g in M.row_grades],
        col_grades=[add(g, z) for g in M.col_grades],
        columns=[list(c) for c in M.columns],
    )


def with_minimal_col_grades(
    columns: Sequence[Sequence[int]], row_grades: Sequence[Grade],
) -> GradedMatrix:
    """[B]_r: give each column the join of the grades of its nonzero rows.

    Zero columns have no such grade; callers drop them first.
    """
    rg = [as_grade(g) for g in row_grades]
    normalized = [_normalize(c) for c in columns]
    col_grades: List[Grade] = []
    for j, col in enumerate(normalized):
        if not col:
            raise InvalidMatrixError(f"column {j} is zero; it has no minimal grade")
        col_grades.append(join_all(rg[i] for i in col))
    return GradedMatrix(rg, col_grades, normalized)


def pivot(column: Sequence[int], row_grades: Sequence[Grade], kind: PivotKind = "index") -> Optional[int]:
    """Pivot row of a static column, or None for a zero column.

    index: largest nonzero row index. lex / colex: smallest index among the
    nonzero rows whose grade is maximal in that order.
    """
    if kind not in VALID_PIVOT_KINDS:
        raise MfrError(f"Invalid pivot kind: {kind!r}")
    col = _normalize(column)
    if not col:
        return None
    if kind == "index":
        return col[-1]
    key = lex_key if kind == "lex" else colex_key
    return max(col, key=lambda i: (key(row_grades[i]), -i))


def matmul(A: GradedMatrix, B: GradedMatrix) -> GradedMatrix:
    """GF(2) product A·B, graded by A's rows and B's columns."""
    if A.n != B.m:
        raise InvalidMatrixError(f"cannot multiply {A.shape} by {B.shape}")
    columns = []
    for col in B.columns:
        acc: Counter = Counter()
        for k in col:
            acc.update(A.columns[k])
        columns.append([i for i, c in acc.items() if c % 2])
    return GradedMatrix(list(A.row_grades), list(B.col_grades), columns)


def composes_to_zero(A: GradedMatrix, B: GradedMatrix) -> bool:
    """True iff A·B = 0 and the shapes chain."""
    if A.n != B.m:
        return False
    return matmul(A, B).is_zero()
