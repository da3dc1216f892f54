"""
Bigraded Reduction and Row Sparsification

bireduce turns a set of columns over a free module F(r) into a basis of
the pullback of their span: the elements of F(r) whose image in the
colimit lies in the span. It runs two column reductions. The first
makes the colex pivots pairwise distinct; the second makes the lex
pivots distinct as well, swapping a column with the pivot owner whenever
that keeps colex pivots fixed. The result carries the least column
grades compatible with its entries.

sparsify removes entries by row operations with single-entry rows,
without changing the represented map up to a basis change of the rows.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from mfrctl.columns import colex_order, lex_order, make_columns
from mfrctl.grades import Grade, as_grade, leq
from mfrctl.matrix import GradedMatrix, with_minimal_col_grades
from mfrctl.types import (
    VALID_PHASE_ORDERS,
    ColumnBackend,
    MfrError,
    OrderError,
    PhaseOrder,
    RunStats,
)

logger = logging.getLogger(__name__)


def bireduce(
    columns: Sequence[Sequence[int]],
    row_grades: Sequence[Grade],
    *,
    backend: ColumnBackend = "heap",
    phase_order: PhaseOrder = "colex-lex",
    stats: Optional[RunStats] = None,
) -> GradedMatrix:
    """Basis of the pullback of span(columns) in F(row_grades).

    Args:
        columns: Column supports (row indices) over GF(2).
        row_grades: Grades of the ambient basis. Their order only breaks ties
            between equal grades; rows are ranked by grade internally.
        backend: Column store.
        phase_order: "colex-lex" (default) or "lex-colex".
        stats: Receives phase-1/phase-2 addition counts.

    Returns:
        The nonzero reduced columns, in input order, with least column grades.

    Both phases rank rows with RowOrder keys (grade key, then index), and
    the swap test of the second phase compares first-order ranks. Unlike
    sparsify, no OrderError is raised for rows given out of colex order.
    """
    if phase_order not in VALID_PHASE_ORDERS:
        raise MfrError(f"Invalid phase order: {phase_order!r}")
    rg = [as_grade(g) for g in row_grades]
    first, second = (colex_order(rg), lex_order(rg))
    if phase_order == "lex-colex":
        first, second = second, first

    # Phase 1: distinct pivots in the first order
    cols = make_columns(backend, columns, first)
    owner: Dict[int, int] = {}
    entered = 0
    additions1 = 0
    for j, col in enumerate(cols):
        i = col.pivot()
        if i is not None:
            entered += 1
        while i is not None:
            o = owner.get(i)
            if o is None:
                owner[i] = j
                break
            col.add(cols[o])
            additions1 += 1
            i = col.pivot()

    survivors = [j for j, col in enumerate(cols) if not col.is_zero()]
    guard = {j: first.rank[cols[j].pivot()] for j in survivors}

    # Phase 2: distinct pivots in the second order, first-order pivots unchanged
    cols2 = {j: c for j, c in zip(survivors, make_columns(
        backend, [cols[j].entries() for j in survivors], second))}
    owner2: Dict[int, int] = {}
    additions2 = 0
    for start in survivors:
        j = start
        while True:
            i = cols2[j].pivot()
            if i is None:
                raise MfrError("column vanished in the second reduction phase")
            o = owner2.get(i)
            if o is None:
                owner2[i] = j
                break
            if guard[j] < guard[o]:
                owner2[i] = j
                j, o = o, j
            cols2[j].add(cols2[o])
            additions2 += 1

    if stats is not None:
        stats.phase1_columns += entered
        stats.phase1_additions += additions1
        stats.phase2_additions += additions2
        stats.see_columns(len(cols))
    logger.debug(
        "bireduce %dx%d (%s): %d survivors, %d + %d additions",
        len(rg), len(cols), phase_order, len(survivors), additions1, additions2,
    )
    return with_minimal_col_grades([cols2[j].entries() for j in survivors], rg)


def colex_pivots(M: GradedMatrix) -> List[int]:
    """Colex pivot row of every nonzero column."""
    order = colex_order(M.row_grades)
    return [max(col, key=order.rank.__getitem__) for col in M.columns if col]


# ---------------------------------------------------------------------------
# Sparsification
# ---------------------------------------------------------------------------


def _check_no_descent(row_grades: Sequence[Grade]) -> None:
    G = np.asarray(row_grades, dtype=np.int64).reshape(-1, 2)
    for i in range(len(G) - 1):
        later = G[i + 1:]
        below = np.all(later <= G[i], axis=1) & np.any(later < G[i], axis=1)
        if below.any():
            k = i + 1 + int(np.flatnonzero(below)[0])
            raise OrderError(f"row {k} has a grade strictly below earlier row {i}")


def sparsify(M: GradedMatrix) -> GradedMatrix:
    """Eliminate entries using rows that hold a single entry.

    Rows are scanned from last to first. An entry (i, j) is removed by
    adding a later single-entry row h of column j whenever rg_i ≤ rg_h;
    afterwards row i is recorded if it has one entry left. The row
    operations form an upper triangular, invertible, valid matrix.

    Raises:
        OrderError: Some row is strictly below an earlier one.
    """
    _check_no_descent(M.row_grades)
    rg = M.row_grades
    rows: List[set] = [set() for _ in range(M.m)]
    for i, j in M.entries():
        rows[i].add(j)
    singles: Dict[int, List[int]] = {}
    removed = 0
    for i in range(M.m - 1, -1, -1):
        for j in sorted(rows[i]):
            if any(leq(rg[i], rg[h]) for h in singles.get(j, ())):
                rows[i].discard(j)
                removed += 1
        if len(rows[i]) == 1:
            singles.setdefault(next(iter(rows[i])), []).append(i)

    columns: List[List[int]] = [[] for _ in range(M.n)]
    for i, row in enumerate(rows):
        for j in row:
            columns[j].append(i)
    if removed:
        logger.debug("sparsify %s: %d entries removed", M.shape, removed)
    return GradedMatrix(list(M.row_grades), list(M.col_grades), columns)
