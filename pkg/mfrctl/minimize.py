"""
Splitting Off Balls

A ball is a pair (row i, column j) of a differential with an entry at
rg_i = cg_j: the summand F(z) → F(z) it spans is contractible and can be
removed without changing homology. minimize_map removes all of them from
one matrix; minimize_chain and minimize_cochain do it across a complex,
restricting the neighbouring matrices so compositions stay zero.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Sequence, Tuple

from joblib import Parallel, delayed

from mfrctl.columns import index_order, make_column, make_columns
from mfrctl.matrix import GradedMatrix, composes_to_zero
from mfrctl.types import ColumnBackend, InvalidMatrixError, MfrError

logger = logging.getLogger(__name__)


def minimize_map(
    D: GradedMatrix,
    *,
    backend: ColumnBackend = "heap",
    n_jobs: int = 1,
) -> Tuple[GradedMatrix, List[int], List[int]]:
    """Remove every ball from D.

    Returns:
        (D′, rows, cols): D′ is the remainder on the unpaired rows and the
        surviving columns, both listed in ascending order. Every entry of
        D′ has rg < cg strictly.

    Raises:
        InvalidMatrixError: D is not valid.
    """
    if not D.is_valid():
        raise InvalidMatrixError("cannot minimize an invalid matrix")
    rg, cg = D.row_grades, D.col_grades
    order = index_order(D.m)
    cols = make_columns(backend, D.columns, order)

    # Loop 1: pair local pivots, one pass over the columns
    paired: Dict[int, int] = {}
    survivors: List[int] = []
    for j in range(D.n):
        while True:
            i = cols[j].pivot()
            if i is None or rg[i] != cg[j]:
                survivors.append(j)
                break
            o = paired.get(i)
            if o is None:
                paired[i] = j
                break
            cols[j].add(cols[o])

    # Loop 2: clear the paired rows out of the survivors
    frozen = {i: cols[o].entries() for i, o in paired.items()}

    def _clear(j: int) -> List[int]:
        col = make_column(backend, cols[j].entries(), order)
        while True:
            hits = [i for i in col.entries() if i in frozen]
            if not hits:
                return col.entries()
            col.add(make_column(backend, frozen[max(hits)], order))

    if n_jobs == 1 or len(survivors) < 2:
        cleared = [_clear(j) for j in survivors]
    else:
        cleared = Parallel(n_jobs=n_jobs, backend="threading")(
            delayed(_clear)(j) for j in survivors
        )

    rows = [i for i in range(D.m) if i not in paired]
    reduced = GradedMatrix(list(rg), [cg[j] for j in survivors], cleared).restrict_rows(rows)
    logger.debug("minimize %s: %d balls removed", D.shape, len(paired))
    return reduced, rows, survivors


def _check_chain(matrices: Sequence[GradedMatrix], transposed: bool) -> None:
    for k in range(len(matrices) - 1):
        A, B = matrices[k], matrices[k + 1]
        ok = composes_to_zero(B, A) if transposed else composes_to_zero(A, B)
        if not ok:
            raise MfrError(f"matrices {k} and {k + 1} do not compose to zero")


def minimize_chain(
    matrices: Sequence[GradedMatrix],
    *,
    backend: ColumnBackend = "heap",
    n_jobs: int = 1,
) -> List[GradedMatrix]:
    """Minimize a chain complex given as [D₁, D₂, ...] with D_k · D_{k+1} = 0.

    The columns of D_k index the rows of D_{k+1}.

    Raises:
        MfrError: Some composition is nonzero.
    """
    _check_chain(matrices, transposed=False)
    out: List[GradedMatrix] = [M.copy() for M in matrices]
    for k in range(len(out)):
        reduced, rows, cols = minimize_map(out[k], backend=backend, n_jobs=n_jobs)
        out[k] = reduced
        if k + 1 < len(out):
            out[k + 1] = out[k + 1].restrict_rows(cols)
        if k > 0:
            out[k - 1] = out[k - 1].restrict_cols(rows)
    logger.debug("minimize_chain: %s", [M.shape for M in out])
    return out


def minimize_cochain(
    matrices: Sequence[GradedMatrix],
    *,
    backend: ColumnBackend = "heap",
    n_jobs: int = 1,
) -> List[GradedMatrix]:
    """Minimize a cochain complex [δ¹, δ², ...] with δ^{k+1} · δ^k = 0.

    The rows of δ^k index the columns of δ^{k+1}.

    Raises:
        MfrError: Some composition is nonzero.
    """
    _check_chain(matrices, transposed=True)
    out: List[GradedMatrix] = [M.copy() for M in matrices]
    for k in range(len(out)):
        reduced, rows, cols = minimize_map(out[k], backend=backend, n_jobs=n_jobs)
        out[k] = reduced
        if k + 1 < len(out):
            out[k + 1] = out[k + 1].restrict_cols(rows)
        if k > 0:
            out[k - 1] = out[k - 1].restrict_rows(cols)
    logger.debug("minimize_cochain: %s", [M.shape for M in out])
    return out
