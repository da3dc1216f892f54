"""
One-Parameter Persistence — Clearing and Representatives

Two reductions over filtrations indexed by a single integer:

- barcode_clearing: left-to-right reduction of coboundary matrices, one
  degree after the other, skipping the columns already known to be
  pivots of the previous degree (clearing).
- homology_reps: homological reduction that also records the chains
  needed to kill each bar (used by coning).

Both take FilteredMatrix inputs whose rows and columns are sorted by
value. Zero-length pairs are kept in Barcode.pairs for bookkeeping and
never appear in Barcode.bars.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from mfrctl.columns import index_order, make_column, make_columns
from mfrctl.matrix import GradedMatrix
from mfrctl.types import ColumnBackend, MfrError, OrderError

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------


@dataclass
class FilteredMatrix:
    """Sparse GF(2) matrix whose rows and columns carry one integer value each."""

    row_values: List[int] = field(default_factory=list)
    col_values: List[int] = field(default_factory=list)
    columns: List[List[int]] = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.row_values)

    @property
    def n(self) -> int:
        return len(self.col_values)

    def check_sorted(self) -> None:
        for name, values in (("row", self.row_values), ("column", self.col_values)):
            for k in range(1, len(values)):
                if values[k - 1] > values[k]:
                    raise OrderError(f"{name} values not ascending at position {k}")

    def dual(self) -> FilteredMatrix:
        """Anti-transpose with negated values (homology ↔ cohomology indexing)."""
        m, n = self.m, self.n
        cols_t: List[List[int]] = [[] for _ in range(m)]
        for c, col in enumerate(self.columns):
            for r in col:
                cols_t[m - 1 - r].append(n - 1 - c)
        return FilteredMatrix(
            row_values=[-self.col_values[n - 1 - i] for i in range(n)],
            col_values=[-self.row_values[m - 1 - j] for j in range(m)],
            columns=[sorted(c) for c in cols_t],
        )

    @classmethod
    def from_graded(cls, M: GradedMatrix, coordinate: int) -> FilteredMatrix:
        """Keep one coordinate of every grade (0 = x, 1 = y)."""
        return cls(
            row_values=[g[coordinate] for g in M.row_grades],
            col_values=[g[coordinate] for g in M.col_grades],
            columns=[list(c) for c in M.columns],
        )


@dataclass
class Bar:
    """A persistence interval [birth, death) in one degree.

    death is math.inf for essential classes. representative is a cycle
    alive from birth on; chain, for finite bars, is a chain one degree up
    whose boundary is the representative.
    """

    degree: int
    birth: int
    death: float
    representative: Optional[List[int]] = None
    chain: Optional[List[int]] = None

    @property
    def finite(self) -> bool:
        return not math.isinf(self.death)

    def interval(self) -> Tuple[int, int, float]:
        return (self.degree, self.birth, self.death)


@dataclass
class Barcode:
    """Bars of nonzero length plus the bookkeeping of the reduction."""

    bars: List[Bar] = field(default_factory=list)
    pairs: Dict[int, List[Tuple[int, int]]] = field(default_factory=dict)
    additions: int = 0
    cleared: int = 0

    def intervals(self) -> List[Tuple[int, int, float]]:
        """Sorted (degree, birth, death) triples."""
        return sorted(b.interval() for b in self.bars)

    def in_degree(self, degree: int) -> List[Bar]:
        return [b for b in self.bars if b.degree == degree]


# ---------------------------------------------------------------------------
# Cohomological reduction with clearing
# ---------------------------------------------------------------------------


def barcode_clearing(
    coboundaries: Sequence[FilteredMatrix],
    *,
    clearing: bool = True,
    start_degree: int = 0,
    backend: ColumnBackend = "heap",
) -> Barcode:
    """Barcode of consecutive coboundary matrices.

    coboundaries[k] is the coboundary out of degree start_degree + k; its
    columns are indexed like the rows of coboundaries[k - 1]. A pair (i, j)
    of coboundaries[k] yields the bar (row_values[i], col_values[j]) in
    that degree. With clearing=False this is the plain standard algorithm.
    """
    result = Barcode()
    previous_pivots: Set[int] = set()
    for k, M in enumerate(coboundaries):
        M.check_sorted()
        degree = start_degree + k
        cols = make_columns(backend, M.columns, index_order(M.m))
        owner: Dict[int, int] = {}
        zero_columns: List[int] = []
        for j in range(M.n):
            if clearing and j in previous_pivots:
                cols[j].clear()
                result.cleared += 1
                continue
            while True:
                i = cols[j].pivot()
                if i is None:
                    zero_columns.append(j)
                    break
                o = owner.get(i)
                if o is None:
                    owner[i] = j
                    break
                cols[j].add(cols[o])
                result.additions += 1

        pairs = sorted((i, j) for i, j in owner.items())
        result.pairs[degree] = pairs
        for i, j in pairs:
            if M.row_values[i] != M.col_values[j]:
                result.bars.append(Bar(degree, M.row_values[i], M.col_values[j]))
        for j in zero_columns:
            if j not in previous_pivots:
                result.bars.append(Bar(degree, M.col_values[j], math.inf))
        logger.debug(
            "degree %d: %d pairs, %d additions so far", degree, len(pairs), result.additions,
        )
        previous_pivots = set(owner)
    return result


# ---------------------------------------------------------------------------
# Homological reduction with representatives
# ---------------------------------------------------------------------------


def homology_reps(
    boundaries: Mapping[int, FilteredMatrix],
    skip: Optional[Mapping[int, Iterable[int]]] = None,
    *,
    backend: ColumnBackend = "heap",
) -> Barcode:
    """Bars with representative cycles.

    boundaries[d] maps degree-d cells (columns) to degree-(d-1) cells
    (rows); every degree must appear as the columns of some entry, the
    lowest one as a matrix with no rows. skip[d] lists degree-d cells known
    to be paired with a (d+1)-cell, typically read off a barcode_clearing
    run; when omitted, the pivots of the degree above are used.
    """
    result = Barcode()
    above: Set[int] = set()
    have_above = False
    for d in sorted(boundaries, reverse=True):
        B = boundaries[d]
        B.check_sorted()
        known = above if have_above and (d + 1) in boundaries else set()
        if skip is not None:
            skip_d = set(skip.get(d, ()))
            if not skip_d <= known:
                raise MfrError(
                    f"degree {d}: {len(skip_d - known)} skipped cells are not paired above"
                )
        else:
            skip_d = known

        R = make_columns(backend, B.columns, index_order(B.m))
        chain_order = index_order(B.n)
        V = [make_column(backend, [j], chain_order) for j in range(B.n)]
        owner: Dict[int, int] = {}
        cycles: List[int] = []
        for j in range(B.n):
            if j in skip_d:
                continue
            while True:
                i = R[j].pivot()
                if i is None:
                    cycles.append(j)
                    break
                o = owner.get(i)
                if o is None:
                    owner[i] = j
                    break
                R[j].add(R[o])
                V[j].add(V[o])
                result.additions += 1

        result.pairs[d - 1] = sorted(owner.items())
        for i, j in sorted(owner.items()):
            if B.row_values[i] != B.col_values[j]:
                result.bars.append(Bar(
                    d - 1, B.row_values[i], B.col_values[j],
                    representative=R[j].entries(), chain=V[j].entries(),
                ))
        for j in cycles:
            if j not in known:
                result.bars.append(Bar(d, B.col_values[j], math.inf,
                                       representative=V[j].entries()))
        above = set(owner)
        have_above = True
    return result
