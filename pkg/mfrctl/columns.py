"""
Column Stores — Heap and Vector Backends over GF(2)

Every reduction in mfrctl works on mutable columns that answer two
questions: "what is your pivot?" and "add that other column to you".
The pivot is the nonzero row that is maximal in a RowOrder, a total
order on row indices fixed for the duration of one reduction.

Two backends implement the same behavior:

- HeapColumn: lazy binary max-heap of row positions. Additions push
  entries without merging; a position present an even number of times
  is absent. Cancellations are resolved when the pivot is queried.
- VectorColumn: sorted list of distinct row positions; additions are
  symmetric differences.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from mfrctl.grades import Grade, colex_key, lex_key
from mfrctl.types import VALID_BACKENDS, VALID_PIVOT_KINDS, ColumnBackend, MfrError, PivotKind

# Heap compaction kicks in once the raw heap is this much longer than its last compacted size
_COMPACT_SLACK = 64


# ---------------------------------------------------------------------------
# Row orders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RowOrder:
    """A total order on row indices 0..m-1.

    rows[p] is the row at position p; rank[i] is the position of row i.
    The pivot of a column is its entry of highest position.
    """

    rows: Tuple[int, ...]
    rank: Tuple[int, ...]

    @classmethod
    def from_keys(cls, keys: Sequence) -> RowOrder:
        rows = tuple(sorted(range(len(keys)), key=keys.__getitem__))
        rank = [0] * len(rows)
        for pos, row in enumerate(rows):
            rank[row] = pos
        return cls(rows=rows, rank=tuple(rank))

    @classmethod
    def identity(cls, m: int) -> RowOrder:
        ids = tuple(range(m))
        return cls(rows=ids, rank=ids)

    def __len__(self) -> int:
        return len(self.rows)


def index_order(m: int) -> RowOrder:
    """Pivot = largest row index."""
    return RowOrder.identity(m)


def lex_order(grades: Sequence[Grade]) -> RowOrder:
    """Pivot = smallest index among the rows of lex-maximal grade."""
    return RowOrder.from_keys([(lex_key(g), -i) for i, g in enumerate(grades)])


def colex_order(grades: Sequence[Grade]) -> RowOrder:
    """Pivot = smallest index among the rows of colex-maximal grade."""
    return RowOrder.from_keys([(colex_key(g), -i) for i, g in enumerate(grades)])


def pivot_order(grades: Sequence[Grade], kind: PivotKind) -> RowOrder:
    """Build the RowOrder realizing a pivot kind on rows with the given grades."""
    if kind not in VALID_PIVOT_KINDS:
        raise MfrError(f"Invalid pivot kind: {kind!r}")
    if kind == "index":
        return index_order(len(grades))
    if kind == "lex":
        return lex_order(grades)
    return colex_order(grades)


# ---------------------------------------------------------------------------
# Heap backend
# ---------------------------------------------------------------------------


class HeapColumn:
    """Lazy max-heap column. Stores negated positions in a heapq min-heap."""

    __slots__ = ("_heap", "_order", "_compacted")

    def __init__(self, rows: Iterable[int], order: RowOrder) -> None:
        self._order = order
        self._heap: List[int] = [-order.rank[r] for r in rows]
        heapq.heapify(self._heap)
        self._compacted = len(self._heap)

    def pivot(self) -> Optional[int]:
        heap = self._heap
        while heap:
            top = heapq.heappop(heap)
            if heap and heap[0] == top:
                heapq.heappop(heap)
                continue
            heapq.heappush(heap, top)
            return self._order.rows[-top]
        return None

    def add(self, other: Column) -> None:
        heap = self._heap
        for neg in other._raw():
            heapq.heappush(heap, neg)
        if len(heap) > 2 * self._compacted + _COMPACT_SLACK:
            self._compact()

    def _raw(self) -> List[int]:
        return self._heap

    def _compact(self) -> None:
        counts = Counter(self._heap)
        self._heap = [v for v, c in counts.items() if c % 2]
        heapq.heapify(self._heap)
        self._compacted = len(self._heap)

    def entries(self) -> List[int]:
        counts = Counter(self._heap)
        rows = self._order.rows
        return sorted(rows[-v] for v, c in counts.items() if c % 2)

    def is_zero(self) -> bool:
        return self.pivot() is None

    def clear(self) -> None:
        self._heap = []
        self._compacted = 0


# ---------------------------------------------------------------------------
# Vector backend
# ---------------------------------------------------------------------------


class VectorColumn:
    """Sorted array of distinct row positions."""

    __slots__ = ("_pos", "_order")

    def __init__(self, rows: Iterable[int], order: RowOrder) -> None:
        self._order = order
        counts = Counter(order.rank[r] for r in rows)
        self._pos: List[int] = sorted(p for p, c in counts.items() if c % 2)

    def pivot(self) -> Optional[int]:
        if not self._pos:
            return None
        return self._order.rows[self._pos[-1]]

    def add(self, other: Column) -> None:
        if isinstance(other, VectorColumn):
            theirs = other._pos
        else:
            counts = Counter(-v for v in other._raw())
            theirs = [p for p, c in counts.items() if c % 2]
        self._pos = sorted(set(self._pos).symmetric_difference(theirs))

    def _raw(self) -> List[int]:
        return [-p for p in self._pos]

    def entries(self) -> List[int]:
        rows = self._order.rows
        return sorted(rows[p] for p in self._pos)

    def is_zero(self) -> bool:
        return not self._pos

    def clear(self) -> None:
        self._pos = []


Column = Union[HeapColumn, VectorColumn]


def make_column(backend: ColumnBackend, rows: Iterable[int], order: RowOrder) -> Column:
    """Column factory for the configured backend."""
    if backend == "heap":
        return HeapColumn(rows, order)
    if backend == "vector":
        return VectorColumn(rows, order)
    raise MfrError(f"Invalid column backend: {backend!r} (expected one of {sorted(VALID_BACKENDS)})")


def make_columns(
    backend: ColumnBackend, columns: Sequence[Sequence[int]], order: RowOrder,
) -> List[Column]:
    return [make_column(backend, col, order) for col in columns]
