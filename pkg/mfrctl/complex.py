"""
Chain Complexes and Function-Rips Bifiltrations

Builds the one-critical function-Rips bifiltration of a finite metric
space with integer vertex values: a simplex σ enters at
(max_{v∈σ} f(v), scale index of diam σ). The full simplex is built up to
one dimension above the top homology degree of interest.

A ChainComplex holds, per degree, the cell grades and the faces of each
cell. Within each degree the cells are sorted colexicographically by
grade; every reduction downstream relies on that row order.

Also here: coning off (adding cells that kill all homology once the
collapsed coordinate reaches a dominating value), the Gaussian density
used as vertex function, and value discretization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import squareform

from mfrctl.grades import EPSILON, Grade, colex_key
from mfrctl.matrix import GradedMatrix, composes_to_zero, graded_transpose, shift
from mfrctl.one_param import Barcode, FilteredMatrix, barcode_clearing, homology_reps
from mfrctl.types import ColumnBackend, ComplexError, ConeAxis, MfrError

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Chain complexes
# ---------------------------------------------------------------------------


@dataclass
class ChainComplex:
    """Free chain complex of Z²-graded modules.

    grades[d][k] is the grade of the k-th cell of degree d. faces[d][k]
    lists the degree-(d-1) cells in the boundary of that cell; the lowest
    degree has empty faces.
    """

    min_degree: int
    grades: Dict[int, List[Grade]] = field(default_factory=dict)
    faces: Dict[int, List[List[int]]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for d in self.degrees:
            self.grades.setdefault(d, [])
            self.faces.setdefault(d, [[] for _ in self.grades[d]])
            if len(self.faces[d]) != len(self.grades[d]):
                raise ComplexError(f"degree {d}: {len(self.faces[d])} face lists "
                                   f"for {len(self.grades[d])} cells")

    @property
    def max_degree(self) -> int:
        return max(self.grades) if self.grades else self.min_degree

    @property
    def degrees(self) -> range:
        return range(self.min_degree, self.max_degree + 1)

    def size(self, d: int) -> int:
        return len(self.grades.get(d, ()))

    @property
    def n_cells(self) -> int:
        return sum(len(g) for g in self.grades.values())

    def all_grades(self) -> List[Grade]:
        return [g for d in self.degrees for g in self.grades[d]]

    # -- matrices ----------------------------------------------------------

    def boundary(self, d: int) -> GradedMatrix:
        """∂_d: C_d → C_{d-1}, defined for min_degree ≤ d ≤ max_degree + 1."""
        if d < self.min_degree or d > self.max_degree + 1:
            raise ComplexError(
                f"boundary degree {d} outside [{self.min_degree}, {self.max_degree + 1}]"
            )
        if d == self.min_degree:
            return GradedMatrix.empty([], self.grades[d])
        if d == self.max_degree + 1:
            return GradedMatrix.empty(self.grades[d - 1], [])
        return GradedMatrix(list(self.grades[d - 1]), list(self.grades[d]),
                            [list(f) for f in self.faces[d]])

    def coboundary(self, d: int) -> GradedMatrix:
        """Coboundary out of degree d: cell σ carries grade ε - g(σ)."""
        return shift(graded_transpose(self.boundary(d + 1)), EPSILON)

    def boundaries(self) -> List[GradedMatrix]:
        """[∂_{min+1}, ..., ∂_{max}]."""
        return [self.boundary(d) for d in range(self.min_degree + 1, self.max_degree + 1)]

    # -- checks ------------------------------------------------------------

    def is_chain_complex(self) -> bool:
        """∂_{d} ∘ ∂_{d+1} = 0 in every degree."""
        return all(
            composes_to_zero(self.boundary(d), self.boundary(d + 1))
            for d in range(self.min_degree + 1, self.max_degree)
        )

    def is_valid(self) -> bool:
        return all(self.boundary(d).is_valid() for d in self.degrees)

    # -- reordering --------------------------------------------------------

    def sorted(self) -> ChainComplex:
        """Stable colex re-sort of the cells of every degree."""
        perm = {
            d: sorted(range(self.size(d)), key=lambda k, d=d: colex_key(self.grades[d][k]))
            for d in self.degrees
        }
        inverse = {}
        for d, p in perm.items():
            inv = [0] * len(p)
            for new, old in enumerate(p):
                inv[old] = new
            inverse[d] = inv
        grades = {d: [self.grades[d][k] for k in perm[d]] for d in self.degrees}
        faces: Dict[int, List[List[int]]] = {}
        for d in self.degrees:
            below = inverse.get(d - 1)
            faces[d] = [
                sorted(below[i] for i in self.faces[d][k]) if below else []
                for k in perm[d]
            ]
        return ChainComplex(self.min_degree, grades, faces)

    @classmethod
    def from_boundaries(
        cls,
        min_degree: int,
        boundaries: Sequence[GradedMatrix],
        bottom: Optional[Sequence[Grade]] = None,
    ) -> ChainComplex:
        """Rebuild a complex from [∂_{min+1}, ..., ∂_{max}].

        bottom gives the lowest-degree grades when there is no matrix.
        """
        if boundaries:
            grades = {min_degree: list(boundaries[0].row_grades)}
        else:
            grades = {min_degree: list(bottom or [])}
        faces: Dict[int, List[List[int]]] = {min_degree: [[] for _ in grades[min_degree]]}
        for k, B in enumerate(boundaries):
            d = min_degree + k + 1
            if B.row_grades != grades[d - 1]:
                raise ComplexError(f"degree {d}: boundary rows do not match degree {d - 1} cells")
            grades[d] = list(B.col_grades)
            faces[d] = [list(c) for c in B.columns]
        return cls(min_degree, grades, faces)


# ---------------------------------------------------------------------------
# Scale discretization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaleMap:
    """Distinct positive distances r_1 < ... < r_k mapped to 1..k; 0 maps to 0."""

    values: Tuple[float, ...] = ()

    @classmethod
    def from_distances(cls, dist: np.ndarray) -> ScaleMap:
        if dist.shape[0] < 2:
            return cls(())
        flat = squareform(dist, checks=False)
        return cls(tuple(float(v) for v in np.unique(flat[flat > 0])))

    def __len__(self) -> int:
        return len(self.values)

    def index(self, r: float) -> int:
        if r == 0:
            return 0
        k = int(np.searchsorted(self.values, r))
        if k >= len(self.values) or self.values[k] != r:
            raise ComplexError(f"distance {r!r} is not on the scale")
        return k + 1

    def index_matrix(self, dist: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(np.asarray(self.values, dtype=float), dist) + 1
        idx[dist == 0] = 0
        return idx.astype(np.int64)


# ---------------------------------------------------------------------------
# Function-Rips bifiltration
# ---------------------------------------------------------------------------


@dataclass
class Bifiltration:
    """One-critical simplicial bifiltration, cells colex-sorted per dimension."""

    maxdim: int
    reduced: bool
    simplices: Dict[int, List[Simplex]]
    grades: Dict[int, List[Grade]]
    scale: ScaleMap = field(default_factory=ScaleMap)
    _complex: Optional[ChainComplex] = field(default=None, repr=False, compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.simplices.get(0, ()))

    @property
    def n_simplices(self) -> int:
        return sum(len(s) for s in self.simplices.values())

    def chain_complex(self) -> ChainComplex:
        if self._complex is None:
            lo = -1 if self.reduced else 0
            index = {d: {s: k for k, s in enumerate(self.simplices[d])} for d in self.simplices}
            faces: Dict[int, List[List[int]]] = {}
            for d in range(lo, self.maxdim + 2):
                cells = self.simplices[d]
                if d == lo:
                    faces[d] = [[] for _ in cells]
                    continue
                below = index[d - 1]
                faces[d] = [
                    sorted(below[s[:k] + s[k + 1:]] for k in range(len(s))) for s in cells
                ]
            grades = {d: list(self.grades[d]) for d in range(lo, self.maxdim + 2)}
            self._complex = ChainComplex(lo, grades, faces)
        return self._complex

    def boundary_matrix(self, d: int) -> GradedMatrix:
        if d < 0 or d > self.maxdim + 1:
            raise ComplexError(f"dimension {d} outside [0, {self.maxdim + 1}]")
        return self.chain_complex().boundary(d)

    def coboundary_matrix(self, d: int) -> GradedMatrix:
        if d < -1 or d > self.maxdim:
            raise ComplexError(f"coboundary dimension {d} outside [-1, {self.maxdim}]")
        return self.chain_complex().coboundary(d)


def _as_square(dist) -> np.ndarray:
    arr = np.asarray(dist, dtype=float)
    if arr.ndim == 1:
        arr = squareform(arr, checks=False)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ComplexError(f"distance matrix must be square, got shape {arr.shape}")
    return arr


def build_function_rips(
    dist, values: Sequence[int], maxdim: int = 1, reduced: bool = True,
) -> Bifiltration:
    """Full function-Rips bifiltration up to simplex dimension maxdim + 1.

    Args:
        dist: Square distance matrix (only the lower triangle is read) or a
            condensed distance vector.
        values: Integer vertex values f.
        maxdim: Top homology degree of interest.
        reduced: Add the empty simplex at (min f, 0).

    Raises:
        ComplexError: Empty point set, bad distances, or bad maxdim.
    """
    f = [int(v) for v in values]
    n = len(f)
    if n == 0:
        raise ComplexError("empty point set")
    if maxdim < 0:
        raise ComplexError(f"maxdim must be >= 0, got {maxdim}")
    D = _as_square(dist) if n > 1 else np.zeros((1, 1))
    if D.shape[0] != n:
        raise ComplexError(f"{n} values but {D.shape[0]} points in the distance matrix")
    D = np.tril(D, -1) + np.tril(D, -1).T
    if not np.all(np.isfinite(D)):
        raise ComplexError("non-finite distance")
    if np.any(D < 0):
        raise ComplexError("negative distance")

    scale = ScaleMap.from_distances(D)
    S = scale.index_matrix(D).tolist()

    simplices: Dict[int, List[Simplex]] = {}
    grades: Dict[int, List[Grade]] = {}
    if reduced:
        simplices[-1] = [()]
        grades[-1] = [Grade(min(f), 0)]

    level: List[Tuple[Simplex, int, int]] = [((v,), f[v], 0) for v in range(n)]
    for d in range(0, maxdim + 2):
        if d > 0:
            grown: List[Tuple[Simplex, int, int]] = []
            for s, x, y in level:
                for v in range(s[-1] + 1, n):
                    row = S[v]
                    grown.append((s + (v,), max(x, f[v]), max(y, max(row[u] for u in s))))
            level = grown
        level.sort(key=lambda t: (t[2], t[1], t[0]))
        simplices[d] = [s for s, _, _ in level]
        grades[d] = [Grade(x, y) for _, x, y in level]
        logger.debug("dimension %d: %d simplices", d, len(level))

    return Bifiltration(maxdim=maxdim, reduced=reduced, simplices=simplices,
                        grades=grades, scale=scale)


def boundary_matrix(K: Union[Bifiltration, ChainComplex], d: int) -> GradedMatrix:
    """Boundary matrix ∂_d of a bifiltration or chain complex."""
    if isinstance(K, Bifiltration):
        return K.boundary_matrix(d)
    return K.boundary(d)


def coboundary_matrix(K: Union[Bifiltration, ChainComplex], d: int) -> GradedMatrix:
    """Coboundary out of degree d, generators at ε - g(σ)."""
    if isinstance(K, Bifiltration):
        return K.coboundary_matrix(d)
    return K.coboundary(d)


# ---------------------------------------------------------------------------
# Coning off
# ---------------------------------------------------------------------------


def _line_filtration(
    C: ChainComplex, kept: int,
) -> Tuple[Dict[int, List[int]], Dict[int, FilteredMatrix]]:
    """Collapse C onto one coordinate.

    Returns, per degree, the permutation sorting the cells by the kept
    coordinate and the permuted boundary matrices as filtered matrices,
    from min_degree up to max_degree + 1.
    """
    top = C.max_degree + 1
    perm = {
        d: sorted(range(C.size(d)), key=lambda k, d=d: C.grades[d][k][kept])
        for d in range(C.min_degree, top + 1)
    }
    filtered: Dict[int, FilteredMatrix] = {}
    for d in range(C.min_degree, top + 1):
        M = C.boundary(d).permuted(perm.get(d - 1, []), perm[d])
        filtered[d] = FilteredMatrix.from_graded(M, kept)
    return perm, filtered


def line_barcode(C: ChainComplex, kept: int, *, backend: ColumnBackend = "heap") -> Barcode:
    """Cohomology barcode of C filtered by a single coordinate (0 = x, 1 = y).

    Every cell takes part, so this is the restriction of the bifiltration to
    the line where the other coordinate is at its maximum. Bar values are
    negated, as for any coboundary reduction.
    """
    lo, hi = C.min_degree, C.max_degree
    _, filtered = _line_filtration(C, kept)
    coboundaries = [filtered[d + 1].dual() for d in range(lo, hi + 1)]
    return barcode_clearing(coboundaries, start_degree=lo, backend=backend)


def cone_off(
    C: ChainComplex,
    axis: ConeAxis = "x",
    z0: Optional[int] = None,
    *,
    backend: ColumnBackend = "heap",
) -> ChainComplex:
    """Kill all homology once the collapsed coordinate reaches z0.

    The complex is collapsed along `axis` to a one-parameter filtration by
    the other coordinate. For every bar of nonzero length in degree
    q < max_degree with representative c, a cell in degree q+1 with boundary
    c is added at (z0 on the collapsed axis, birth on the kept one). Finite
    bars with q+2 ≤ max_degree also get a cell in degree q+2 at the death,
    bounding the chain that killed c plus the new cell.
    """
    if axis == "none":
        return C
    if axis not in ("x", "y"):
        raise MfrError(f"Invalid cone axis: {axis!r}")
    if C.n_cells == 0:
        return C
    collapsed = 0 if axis == "x" else 1
    kept = 1 - collapsed
    if z0 is None:
        z0 = max(g[collapsed] for g in C.all_grades()) + 1

    lo, hi = C.min_degree, C.max_degree
    perm, filtered = _line_filtration(C, kept)
    del filtered[hi + 1]

    coboundaries = [filtered[d + 1].dual() for d in range(lo, hi)]
    cohomology = barcode_clearing(coboundaries, start_degree=lo, backend=backend)
    skip = {
        d: {filtered[d + 1].m - 1 - j for _, j in cohomology.pairs.get(d, ())}
        for d in range(lo, hi)
    }
    barcode = homology_reps(filtered, skip, backend=backend)

    grades = {d: list(C.grades[d]) for d in C.degrees}
    faces = {d: [list(f) for f in C.faces[d]] for d in C.degrees}

    def _grade(value: int) -> Grade:
        return Grade(z0, value) if collapsed == 0 else Grade(value, z0)

    added = 0
    for bar in sorted(barcode.bars, key=lambda b: (b.degree, b.birth, b.death)):
        q = bar.degree
        if q >= hi or bar.representative is None:
            continue
        grades[q + 1].append(_grade(bar.birth))
        faces[q + 1].append(sorted(perm[q][k] for k in bar.representative))
        cone_cell = len(grades[q + 1]) - 1
        added += 1
        if bar.finite and q + 2 <= hi:
            grades[q + 2].append(_grade(int(bar.death)))
            faces[q + 2].append(sorted([perm[q + 1][k] for k in bar.chain] + [cone_cell]))
            added += 1

    if not added:
        logger.info("cone_off: complex already acyclic in the colimit")
        return C
    logger.debug("cone_off(axis=%s, z0=%d): %d cells added", axis, z0, added)
    return ChainComplex(lo, grades, faces).sorted()


# ---------------------------------------------------------------------------
# Vertex functions
# ---------------------------------------------------------------------------


def gaussian_density(dist, sigma: float) -> np.ndarray:
    """ρ(p) = Σ_{q≠p} exp(-d(p,q)² / 2σ²)."""
    if not sigma > 0:
        raise MfrError(f"sigma must be positive, got {sigma}")
    D = np.asarray(dist, dtype=float)
    if D.ndim == 1:
        D = squareform(D, checks=False)
    kernel = np.exp(-(D ** 2) / (2.0 * sigma ** 2))
    np.fill_diagonal(kernel, 0.0)
    return kernel.sum(axis=1)


def discretize_values(values, mode: str = "rank_desc", q: Optional[float] = None) -> List[int]:
    """Map real values to integers.

    rank_desc: 0 for the largest value, ties share a rank.
    rank_asc: 0 for the smallest value.
    scale: floor(v / q); also accepted as "scale:<q>".
    """
    v = np.asarray(values, dtype=float).ravel()
    if mode.startswith("scale:"):
        mode, q = "scale", float(mode.split(":", 1)[1])
    if mode == "scale":
        if q is None or not q > 0:
            raise MfrError(f"scale discretization needs a positive step, got {q}")
        return [int(k) for k in np.floor(v / q)]
    if v.size == 0:
        return []
    uniq = np.unique(v)
    pos = np.searchsorted(uniq, v)
    if mode == "rank_asc":
        return [int(k) for k in pos]
    if mode == "rank_desc":
        return [int(k) for k in (len(uniq) - 1 - pos)]
    raise MfrError(f"Invalid discretization mode: {mode!r}")
