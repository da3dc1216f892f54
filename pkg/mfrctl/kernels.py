"""
Kernels, Minimal Generating Systems, Factorization

The grade-queue reduction family. Columns are processed at grades popped
from a priority queue ordered by (lex grade, column index). A column
owns the pivot row it reaches first; when the owner only exists at a
grade not below the current one, the owner is evicted and re-queued at
the join of both grades.

- ker_basis: basis of the kernel of a graded matrix.
- mgs_with_ker: minimal generating system of the image, and a basis of
  the kernel in the coordinates of that system.
- factorize: solve B = A·N for N given a basis A.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from joblib import Parallel, delayed

from mfrctl.columns import Column, index_order, make_column, make_columns
from mfrctl.grades import Grade, join, leq
from mfrctl.matrix import GradedMatrix
from mfrctl.types import ColumnBackend, InvalidMatrixError, NotInSpanError, RunStats

logger = logging.getLogger(__name__)


@dataclass
class _GradeQueue:
    """Min-queue of (grade, column) pairs in (lex grade, index) order."""

    _heap: List[Tuple[int, int, int]] = field(default_factory=list)

    def push(self, z: Grade, j: int) -> None:
        heapq.heappush(self._heap, (z[0], z[1], j))

    def pop(self) -> Tuple[Grade, int]:
        x, y, j = heapq.heappop(self._heap)
        return Grade(x, y), j

    def __bool__(self) -> bool:
        return bool(self._heap)


def _check(M: GradedMatrix) -> None:
    if not M.is_valid():
        raise InvalidMatrixError("input matrix is not valid")


def _reduce_by_grade(
    M: GradedMatrix,
    backend: ColumnBackend,
    *,
    track_image: bool,
    stats: Optional[RunStats] = None,
) -> Tuple[List[Tuple[Grade, List[int]]], List[int], List[List[int]]]:
    """Shared grade-queue reduction.

    Returns the kernel columns as (grade, coefficients), the admission
    order of image generators and their reduced content. With
    track_image=False every column starts its own coefficient vector and
    no column is ever discarded (ker_basis); with track_image=True the
    coefficients are taken relative to admitted generators (mgs_with_ker).
    """
    cg = M.col_grades
    R = make_columns(backend, M.columns, index_order(M.m))
    coeff_order = index_order(M.n)
    V: List[Optional[Column]] = [None] * M.n
    if not track_image:
        V = [make_column(backend, [j], coeff_order) for j in range(M.n)]

    queue = _GradeQueue()
    for j in range(M.n):
        queue.push(cg[j], j)

    owner: Dict[int, int] = {}
    active: Dict[int, Grade] = {}
    admitted: List[int] = []
    slot: Dict[int, int] = {}
    snapshots: List[List[int]] = []
    kernel: List[Tuple[Grade, List[int]]] = []
    additions = 0

    def _claim(i: int, j: int, z: Grade) -> None:
        owner[i] = j
        active[j] = z
        if track_image and j not in slot:
            slot[j] = len(admitted)
            admitted.append(j)
            snapshots.append(R[j].entries())
            V[j] = make_column(backend, [slot[j]], coeff_order)

    while queue:
        z, j = queue.pop()
        # V[j] is None while an image column is still being reduced at its own grade
        while True:
            i = R[j].pivot()
            if i is None:
                if V[j] is not None:
                    kernel.append((z, V[j].entries()))
                break
            o = owner.get(i)
            if o is None:
                _claim(i, j, z)
                break
            if not leq(active[o], z):
                queue.push(join(active[o], z), o)
                del active[o]
                _claim(i, j, z)
                break
            R[j].add(R[o])
            if V[j] is not None:
                V[j].add(V[o])
            additions += 1

    if stats is not None:
        stats.kernel_additions += additions
        stats.see_columns(M.n)
    return kernel, admitted, snapshots


def ker_basis(
    M: GradedMatrix, *, backend: ColumnBackend = "heap", stats: Optional[RunStats] = None,
) -> GradedMatrix:
    """Basis of ker M as a graded matrix with rows graded by M's columns.

    Columns come out in non-decreasing lex order of their grades.
    """
    _check(M)
    kernel, _, _ = _reduce_by_grade(M, backend, track_image=False, stats=stats)
    logger.debug("ker_basis %s: %d kernel columns", M.shape, len(kernel))
    return GradedMatrix(
        row_grades=list(M.col_grades),
        col_grades=[z for z, _ in kernel],
        columns=[c for _, c in kernel],
    )


def mgs_with_ker(
    M: GradedMatrix, *, backend: ColumnBackend = "heap", stats: Optional[RunStats] = None,
) -> Tuple[GradedMatrix, GradedMatrix]:
    """Minimal generating system M′ of im M and a kernel basis K′ of M′.

    A column enters M′ iff it does not reduce to zero at its own grade; it
    enters with its reduced content. K′ is expressed in M′ coordinates, so
    its row grades are the column grades of M′.
    """
    _check(M)
    kernel, admitted, snapshots = _reduce_by_grade(M, backend, track_image=True, stats=stats)
    mgs = GradedMatrix(
        row_grades=list(M.row_grades),
        col_grades=[M.col_grades[j] for j in admitted],
        columns=snapshots,
    )
    ker = GradedMatrix(
        row_grades=list(mgs.col_grades),
        col_grades=[z for z, _ in kernel],
        columns=[c for _, c in kernel],
    )
    logger.debug("mgs_with_ker %s: %d generators, %d relations", M.shape, mgs.n, ker.n)
    return mgs, ker


# ---------------------------------------------------------------------------
# Factorization
# ---------------------------------------------------------------------------


def _echelon(
    A: GradedMatrix, backend: ColumnBackend,
) -> Tuple[Dict[int, int], List[List[int]], List[List[int]]]:
    """Column-echelonize A ungraded: pivot table, reduced columns, transforms."""
    R = make_columns(backend, A.columns, index_order(A.m))
    T = [make_column(backend, [k], index_order(A.n)) for k in range(A.n)]
    table: Dict[int, int] = {}
    for k in range(A.n):
        while True:
            i = R[k].pivot()
            if i is None:
                break
            o = table.get(i)
            if o is None:
                table[i] = k
                break
            R[k].add(R[o])
            T[k].add(T[o])
    return table, [c.entries() for c in R], [t.entries() for t in T]


def factorize(
    B: GradedMatrix,
    A: GradedMatrix,
    *,
    backend: ColumnBackend = "heap",
    n_jobs: int = 1,
) -> GradedMatrix:
    """Solve B = A·N over GF(2).

    A is a basis (independent columns). If its index pivots are not
    pairwise distinct it is echelonized first and the coefficients are
    mapped back. N is graded by rg = cg^A and cg = cg^B.

    Raises:
        NotInSpanError: A column of B is not in the span of A.
    """
    if A.m != B.m:
        raise InvalidMatrixError(f"row counts differ: {A.m} vs {B.m}")
    table, reduced, transforms = _echelon(A, backend)
    if any(transforms[k] != [k] for k in range(A.n)):
        logger.debug("factorize: basis pivots not distinct, using echelon form")
    row_order = index_order(A.m)
    coeff_order = index_order(A.n)

    def _solve(j: int) -> List[int]:
        b = make_column(backend, B.columns[j], row_order)
        y = make_column(backend, [], coeff_order)
        while True:
            i = b.pivot()
            if i is None:
                break
            k = table.get(i)
            if k is None:
                raise NotInSpanError(f"column {j} of the target is not in the span of the basis")
            b.add(make_column(backend, reduced[k], row_order))
            y.add(make_column(backend, transforms[k], coeff_order))
        return y.entries()

    if n_jobs == 1 or B.n < 2:
        columns = [_solve(j) for j in range(B.n)]
    else:
        columns = Parallel(n_jobs=n_jobs, backend="threading")(
            delayed(_solve)(j) for j in range(B.n)
        )
    return GradedMatrix(list(A.col_grades), list(B.col_grades), columns)
