"""
Free Resolutions, Betti Diagrams, Hilbert Grids

A FreeResolution of a bigraded module M is a two-step sequence of free
modules 0 → F₂ → F₁ → F₀ → M → 0, stored as the graded matrices
U₁: F₁ → F₀ and U₂: F₂ → F₁.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from mfrctl.grades import EPSILON, Grade, colex_key, leq
from mfrctl.matrix import GradedMatrix, composes_to_zero, graded_transpose, shift
from mfrctl.types import MfrError, NotMinimalError

logger = logging.getLogger(__name__)

Box = Tuple[int, int, int, int]


# ---------------------------------------------------------------------------
# Resolutions
# ---------------------------------------------------------------------------


@dataclass
class FreeResolution:
    """Resolution of the degree-`degree` homology module."""

    degree: int
    u1: GradedMatrix
    u2: GradedMatrix

    def __post_init__(self) -> None:
        if self.u1.n != self.u2.m or self.u1.col_grades != self.u2.row_grades:
            raise MfrError(
                f"F1 mismatch: U1 has {self.u1.n} columns, U2 has {self.u2.m} rows"
            )

    @classmethod
    def empty(cls, degree: int) -> FreeResolution:
        return cls(degree, GradedMatrix.empty(), GradedMatrix.empty())

    @property
    def gen_grades(self) -> Tuple[List[Grade], List[Grade], List[Grade]]:
        """Generator grades of F₀, F₁, F₂."""
        return (list(self.u1.row_grades), list(self.u1.col_grades), list(self.u2.col_grades))

    @property
    def ranks(self) -> Tuple[int, int, int]:
        return (self.u1.m, self.u1.n, self.u2.n)

    def is_empty(self) -> bool:
        return self.ranks == (0, 0, 0)

    def is_valid(self) -> bool:
        return self.u1.is_valid() and self.u2.is_valid() and composes_to_zero(self.u1, self.u2)

    def is_minimal(self) -> bool:
        return self.is_valid() and self.u1.is_minimal() and self.u2.is_minimal()

    def canonical(self) -> FreeResolution:
        """Sort every F_q colex by grade, ties by index."""
        f0, f1, f2 = self.gen_grades
        p0, p1, p2 = (
            sorted(range(len(g)), key=lambda k, g=g: (colex_key(g[k]), k)) for g in (f0, f1, f2)
        )
        return FreeResolution(
            self.degree, self.u1.permuted(p0, p1), self.u2.permuted(p1, p2),
        )

    def to_dict(self) -> Dict[str, Any]:
        f0, f1, f2 = self.gen_grades
        return {
            "degree": self.degree,
            "F0": [list(g) for g in f0],
            "F1": [[list(g), col] for g, col in zip(f1, self.u1.columns)],
            "F2": [[list(g), col] for g, col in zip(f2, self.u2.columns)],
        }


def dualize_resolution(R: FreeResolution) -> FreeResolution:
    """Resolution of the dual module: reverse, transpose, shift by ε.

    The new U₁ is the shifted transpose of the old U₂ and the new U₂ the
    shifted transpose of the old U₁. Applying it twice is the identity.
    """
    u1 = shift(graded_transpose(R.u2), EPSILON)
    u2 = shift(graded_transpose(R.u1), EPSILON)
    if u1.n != u2.m:
        raise MfrError(f"internal: dualized shapes {u1.shape} and {u2.shape} do not chain")
    return FreeResolution(R.degree, u1, u2)


# ---------------------------------------------------------------------------
# Normal form
# ---------------------------------------------------------------------------

_NORMAL_FORM_ROUNDS = 8


def _pivot(column: Set[int]) -> int:
    return max(column) if column else -1


def _owner(
    owners: Dict[int, List[int]], i: int, grades: Sequence[Grade], g: Grade,
) -> Optional[int]:
    return next((o for o in owners.get(i, ()) if leq(grades[o], g)), None)


def _reduce_columns(
    columns: List[Set[int]], grades: Sequence[Grade],
) -> List[Tuple[int, int]]:
    """Graded reduced echelon form, in place; rows are ranked by index.

    A column absorbs an earlier one of grade ≤ its own whose pivot is one
    of its entries: at its own pivot until that pivot is new, then below
    it. Returns the operations as pairs (j, o) for column j += column o.
    """
    order = sorted(range(len(columns)), key=lambda j: (colex_key(grades[j]), j))
    owners: Dict[int, List[int]] = {}
    ops: List[Tuple[int, int]] = []
    for j in order:
        while columns[j]:
            p = _pivot(columns[j])
            o = _owner(owners, p, grades, grades[j])
            if o is None:
                owners.setdefault(p, []).append(j)
                break
            columns[j] ^= columns[o]
            ops.append((j, o))

    for j in order:
        bound = _pivot(columns[j])
        while True:
            hit = None
            for i in sorted((i for i in columns[j] if i < bound), reverse=True):
                o = _owner(owners, i, grades, grades[j])
                if o is not None:
                    hit = (i, o)
                    break
            if hit is None:
                break
            bound, o = hit
            columns[j] ^= columns[o]
            ops.append((j, o))
    return ops


def _reduce_rows(columns: List[Set[int]], row_grades: Sequence[Grade]) -> None:
    """Clear entries beside each pivot by changing basis in the target.

    Row i absorbs pivot row k (row_i += row_k) when row_grades[i] ≤
    row_grades[k]. Columns are visited by ascending pivot, so a later
    change never touches a column already visited.
    """
    done: Set[int] = set()
    for j in sorted(range(len(columns)), key=lambda j: (_pivot(columns[j]), j)):
        k = _pivot(columns[j])
        if k < 0 or k in done:
            continue
        done.add(k)
        for i in [i for i in columns[j] if i != k and leq(row_grades[i], row_grades[k])]:
            for col in columns:
                if k in col:
                    col ^= {i}


def _order(columns: List[Set[int]], grades: Sequence[Grade]) -> List[int]:
    return sorted(range(len(columns)), key=lambda j: (colex_key(grades[j]), _pivot(columns[j]), j))


def normal_form(R: FreeResolution) -> FreeResolution:
    """Deterministic presentation of R up to isomorphism of resolutions.

    F0 keeps the canonical order. U1 is brought to graded reduced echelon
    form by basis changes in F1 (mirrored on the rows of U2) and in F0,
    alternately, until neither changes anything. F1 and F2 are then sorted
    by (colex grade, pivot) and U2 is reduced the same way. Resolutions of
    the same module computed along different routes usually agree byte for
    byte afterwards; no normal form is unique in general.
    """
    R = R.canonical()
    f0, f1, f2 = R.gen_grades
    u1 = [set(c) for c in R.u1.columns]
    u2 = [set(c) for c in R.u2.columns]

    for _ in range(_NORMAL_FORM_ROUNDS):
        before = [frozenset(c) for c in u1]
        for j, o in _reduce_columns(u1, f1):
            for col in u2:
                if j in col:
                    col ^= {o}
        _reduce_rows(u1, f0)
        if [frozenset(c) for c in u1] == before:
            break
    else:
        logger.debug("normal_form: degree %d not settled after %d rounds",
                     R.degree, _NORMAL_FORM_ROUNDS)

    p1 = _order(u1, f1)
    position = {old: new for new, old in enumerate(p1)}
    f1 = [f1[j] for j in p1]
    u1 = [u1[j] for j in p1]
    u2 = [{position[r] for r in col} for col in u2]
    _reduce_columns(u2, f2)
    p2 = _order(u2, f2)
    return FreeResolution(
        R.degree,
        GradedMatrix(f0, f1, [sorted(c) for c in u1]),
        GradedMatrix(f1, [f2[j] for j in p2], [sorted(u2[j]) for j in p2]),
    )


# ---------------------------------------------------------------------------
# Betti numbers
# ---------------------------------------------------------------------------


@dataclass
class BettiDiagram:
    """Graded Betti numbers as sorted grade lists."""

    b0: List[Grade] = field(default_factory=list)
    b1: List[Grade] = field(default_factory=list)
    b2: List[Grade] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.b0 = sorted(Grade(*g) for g in self.b0)
        self.b1 = sorted(Grade(*g) for g in self.b1)
        self.b2 = sorted(Grade(*g) for g in self.b2)

    @property
    def sizes(self) -> Tuple[int, int, int]:
        return (len(self.b0), len(self.b1), len(self.b2))

    def euler(self, z: Grade) -> int:
        """Σ_q (-1)^q |{g ∈ β_q : g ≤ z}|."""
        return sum(
            sign * sum(1 for g in b if g[0] <= z[0] and g[1] <= z[1])
            for sign, b in ((1, self.b0), (-1, self.b1), (1, self.b2))
        )

    def summary(self) -> str:
        return "β0={} β1={} β2={}".format(*self.sizes)

    def to_dict(self) -> Dict[str, List[List[int]]]:
        return {name: [list(g) for g in b]
                for name, b in (("b0", self.b0), ("b1", self.b1), ("b2", self.b2))}


def betti(R: FreeResolution) -> BettiDiagram:
    """Betti diagram of a minimal resolution.

    Raises:
        NotMinimalError: R has an entry with rg = cg, or is not a resolution.
    """
    if not R.is_minimal():
        raise NotMinimalError(f"degree {R.degree}: resolution is not minimal")
    return BettiDiagram(*R.gen_grades)


# ---------------------------------------------------------------------------
# Hilbert functions
# ---------------------------------------------------------------------------


@dataclass
class HilbertGrid:
    """dim M_z for every z in the box [x0, x1] × [y0, y1].

    values[x - x0, y - y0] holds the dimension at (x, y).
    """

    box: Box
    values: np.ndarray

    @classmethod
    def zeros(cls, box: Box) -> HilbertGrid:
        x0, y0, x1, y1 = check_box(box)
        return cls((x0, y0, x1, y1), np.zeros((x1 - x0 + 1, y1 - y0 + 1), dtype=np.int64))

    def at(self, z: Sequence[int]) -> int:
        x0, y0, x1, y1 = self.box
        x, y = z
        if not (x0 <= x <= x1 and y0 <= y <= y1):
            raise MfrError(f"grade ({x}, {y}) outside the box {self.box}")
        return int(self.values[x - x0, y - y0])

    def grades(self) -> List[Grade]:
        x0, y0, x1, y1 = self.box
        return [Grade(x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1)]

    def mismatches(self, other: HilbertGrid) -> List[Grade]:
        if self.box != other.box:
            raise MfrError(f"boxes differ: {self.box} vs {other.box}")
        x0, y0 = self.box[0], self.box[1]
        return [Grade(int(x) + x0, int(y) + y0)
                for x, y in np.argwhere(self.values != other.values)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HilbertGrid):
            return NotImplemented
        return self.box == other.box and np.array_equal(self.values, other.values)

    def render(self) -> str:
        """Rows from y1 down to y0, columns x0..x1."""
        x0, y0, x1, y1 = self.box
        width = max(2, len(str(int(self.values.max(initial=0)))) + 1)
        lines = []
        for y in range(y1, y0 - 1, -1):
            cells = "".join(f"{int(v):>{width}}" for v in self.values[:, y - y0])
            lines.append(f"{y:>4} |{cells}")
        lines.append("     +" + "-" * (width * (x1 - x0 + 1)))
        lines.append("      " + "".join(f"{x:>{width}}" for x in range(x0, x1 + 1)))
        return "\n".join(lines)


def check_box(box: Sequence[int]) -> Box:
    if len(box) != 4:
        raise MfrError(f"box needs 4 integers x0 y0 x1 y1, got {len(box)}")
    x0, y0, x1, y1 = (int(v) for v in box)
    if x1 < x0 or y1 < y0:
        raise MfrError(f"empty box ({x0}, {y0}, {x1}, {y1})")
    return (x0, y0, x1, y1)


def _count_below(grades: Sequence[Grade], box: Box) -> np.ndarray:
    x0, y0, x1, y1 = box
    xs = np.arange(x0, x1 + 1)
    ys = np.arange(y0, y1 + 1)
    counts = np.zeros((xs.size, ys.size), dtype=np.int64)
    for gx, gy in grades:
        counts += np.outer(xs >= gx, ys >= gy)
    return counts


def hilbert_from_resolution(R: FreeResolution, box: Sequence[int]) -> HilbertGrid:
    """Hilbert function as the alternating sum of free ranks.

    Raises:
        MfrError: A value comes out negative.
    """
    b = check_box(box)
    f0, f1, f2 = R.gen_grades
    values = _count_below(f0, b) - _count_below(f1, b) + _count_below(f2, b)
    if (values < 0).any():
        x, y = np.argwhere(values < 0)[0]
        raise MfrError(
            f"degree {R.degree}: negative dimension at ({b[0] + x}, {b[1] + y}); corrupt resolution"
        )
    return HilbertGrid(b, values)


def grade_box(grades: Sequence[Grade], margin: int = 1) -> Box:
    """Bounding box of the given grades, grown by margin on every side."""
    if not grades:
        return (0, 0, margin, margin)
    G = np.asarray(grades, dtype=np.int64).reshape(-1, 2)
    lo, hi = G.min(axis=0) - margin, G.max(axis=0) + margin
    return (int(lo[0]), int(lo[1]), int(hi[0]), int(hi[1]))
