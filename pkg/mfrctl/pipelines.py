"""
Minimal Free Resolution Pipelines

Two routes to the minimal free resolution of H_d of a bifiltered complex:

- homology_mfr: kernel of ∂_d, minimal generators of im ∂_{d+1},
  factorization of the latter through the former, then minimization.
- cohomology_mfr: one bigraded reduction per coboundary matrix with
  clearing between degrees, a kernel of the transposed result, and
  dualization. Needs homology of finite total dimension (coning).

hilbert_oracle gives an independent brute-force Hilbert function for
verification, and run() strings everything together for the CLI.
"""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional, Sequence, Set, Union

import numpy as np

from mfrctl.bireduce import bireduce, colex_pivots, sparsify
from mfrctl.complex import (
    Bifiltration,
    ChainComplex,
    build_function_rips,
    cone_off,
    line_barcode,
)
from mfrctl.gf2 import gf2_rank
from mfrctl.grades import EPSILON, leq
from mfrctl.kernels import factorize, ker_basis, mgs_with_ker
from mfrctl.matrix import GradedMatrix, graded_transpose, shift
from mfrctl.minimize import minimize_chain, minimize_cochain
from mfrctl.resolution import (
    FreeResolution,
    HilbertGrid,
    check_box,
    dualize_resolution,
    normal_form,
)
from mfrctl.types import (
    DEFAULT_CHUNKS,
    VALID_CHUNKS,
    ChunkMode,
    ColumnBackend,
    ComplexError,
    ConeAxis,
    InfiniteSupportError,
    MfrError,
    PhaseOrder,
    RunStats,
)

logger = logging.getLogger(__name__)

Complex = Union[Bifiltration, ChainComplex]


@contextmanager
def _timed(stats: Optional[RunStats], name: str) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    finally:
        if stats is not None:
            setattr(stats, name, getattr(stats, name) + time.perf_counter() - start)


def _as_complex(K: Complex) -> ChainComplex:
    return K.chain_complex() if isinstance(K, Bifiltration) else K


def _check_degree(C: ChainComplex, d: int) -> None:
    if d < C.min_degree or d > C.max_degree:
        raise ComplexError(f"degree {d} outside [{C.min_degree}, {C.max_degree}]")


def _finish(R: FreeResolution, sparsify_output: bool) -> FreeResolution:
    R = R.canonical()
    if sparsify_output and R.u1.n:
        R = FreeResolution(R.degree, sparsify(R.u1), R.u2)
    return normal_form(R)


# ---------------------------------------------------------------------------
# Chunk preprocessing
# ---------------------------------------------------------------------------


def chunk_complex(
    C: ChainComplex,
    mode: ChunkMode,
    *,
    backend: ColumnBackend = "heap",
    n_jobs: int = 1,
) -> ChainComplex:
    """Split balls off the whole complex, through boundaries or coboundaries."""
    if mode not in VALID_CHUNKS:
        raise MfrError(f"Invalid chunk mode: {mode!r}")
    if mode == "none" or C.max_degree == C.min_degree:
        return C
    lo = C.min_degree
    if mode == "chain":
        boundaries = minimize_chain(C.boundaries(), backend=backend, n_jobs=n_jobs)
    else:
        coboundaries = [C.coboundary(d) for d in range(lo, C.max_degree)]
        reduced = minimize_cochain(coboundaries, backend=backend, n_jobs=n_jobs)
        boundaries = [shift(graded_transpose(M), EPSILON) for M in reduced]
    out = ChainComplex.from_boundaries(lo, boundaries)
    logger.debug("chunk(%s): %d -> %d cells", mode, C.n_cells, out.n_cells)
    return out


# ---------------------------------------------------------------------------
# Homology route
# ---------------------------------------------------------------------------


def homology_mfr(
    K: Complex,
    d: int,
    *,
    chunk: ChunkMode = "chain",
    minimize: bool = True,
    sparsify_output: bool = True,
    backend: ColumnBackend = "heap",
    n_jobs: int = 1,
    stats: Optional[RunStats] = None,
) -> FreeResolution:
    """Minimal free resolution of H_d(K) through ker ∂_d and im ∂_{d+1}."""
    C = _as_complex(K)
    _check_degree(C, d)
    with _timed(stats, "chunk_s"):
        C = chunk_complex(C, chunk, backend=backend, n_jobs=n_jobs)
    with _timed(stats, "reduce_s"):
        cycles = ker_basis(C.boundary(d), backend=backend, stats=stats)
        gens, relations = mgs_with_ker(C.boundary(d + 1), backend=backend, stats=stats)
        presentation = factorize(gens, cycles, backend=backend, n_jobs=n_jobs)
    R = FreeResolution(d, presentation, relations)
    if minimize:
        with _timed(stats, "minimize_s"):
            u1, u2 = minimize_chain([R.u1, R.u2], backend=backend, n_jobs=n_jobs)
            R = FreeResolution(d, u1, u2)
    logger.debug("homology_mfr d=%d: ranks %s", d, R.ranks)
    return _finish(R, sparsify_output)


# ---------------------------------------------------------------------------
# Cohomology route
# ---------------------------------------------------------------------------


def _clear_columns(M: GradedMatrix, pivots: Set[int]) -> GradedMatrix:
    return GradedMatrix(
        list(M.row_grades), list(M.col_grades),
        [[] if j in pivots else list(c) for j, c in enumerate(M.columns)],
    )


def check_finite_support(
    K: Complex, dmax: int, *, backend: ColumnBackend = "heap",
) -> None:
    """Raise unless H_0, ..., H_dmax vanish far out along both axes.

    H_d is nonzero at some (x, y) with x past every grade iff the complex
    filtered by y alone has a bar in degree d, and symmetrically for y.

    Raises:
        InfiniteSupportError: Some degree has a class that never dies.
    """
    C = _as_complex(K)
    if C.n_cells == 0:
        return
    for kept, grows, cone in ((1, "x", "x"), (0, "y", "y")):
        barcode = line_barcode(C, kept, backend=backend)
        alive = [b for b in barcode.bars if 0 <= b.degree <= dmax]
        if alive:
            bar = min(alive, key=lambda b: b.degree)
            raise InfiniteSupportError(
                f"H_{bar.degree} does not vanish as {grows} grows "
                f"({len(alive)} classes); cone the complex off (--cone {cone})"
            )


def cohomology_mfr(
    K: Complex,
    dmax: int,
    *,
    clearing: bool = True,
    sparsify_output: bool = True,
    minimize: bool = True,
    chunk: ChunkMode = "none",
    phase_order: PhaseOrder = "colex-lex",
    backend: ColumnBackend = "heap",
    n_jobs: int = 1,
    stats: Optional[RunStats] = None,
) -> List[FreeResolution]:
    """Minimal free resolutions of H_0, ..., H_dmax through the dual complex.

    Degree d reads only the coboundary out of degree d. With clearing, the
    columns at the colex pivots of the previous degree's reduced matrix
    are zeroed before reduction.

    Raises:
        InfiniteSupportError: Some H_d does not vanish far out.
    """
    C = _as_complex(K)
    if dmax < 0:
        return []
    _check_degree(C, dmax)
    check_finite_support(C, dmax, backend=backend)
    with _timed(stats, "chunk_s"):
        C = chunk_complex(C, chunk, backend=backend, n_jobs=n_jobs)

    results: List[FreeResolution] = []
    previous: Set[int] = set()
    for d in range(0, dmax + 1):
        with _timed(stats, "reduce_s"):
            delta = C.coboundary(d)
            if clearing and previous:
                delta = _clear_columns(delta, previous)
                if stats is not None:
                    stats.cleared_columns += len(previous)
            image = bireduce(delta.columns, delta.row_grades, backend=backend,
                             phase_order=phase_order, stats=stats)
            previous = set(colex_pivots(image))
            if sparsify_output and image.n:
                image = sparsify(image)
            gens, relations = mgs_with_ker(graded_transpose(image), backend=backend, stats=stats)
        R = FreeResolution(d, graded_transpose(relations), graded_transpose(gens))
        if minimize:
            with _timed(stats, "minimize_s"):
                u1, u2 = minimize_chain([R.u1, R.u2], backend=backend, n_jobs=n_jobs)
                R = FreeResolution(d, u1, u2)
        with _timed(stats, "dualize_s"):
            R = dualize_resolution(R)
        logger.debug("cohomology_mfr d=%d: ranks %s, %d pivots", d, R.ranks, len(previous))
        results.append(_finish(R, sparsify_output))
    return results


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------


def hilbert_oracle(K: Complex, d: int, box: Sequence[int]) -> HilbertGrid:
    """dim H_d(K_z) on a box, by GF(2) ranks of restricted boundaries."""
    C = _as_complex(K)
    _check_degree(C, d)
    grid = HilbertGrid.zeros(check_box(box))
    lower = C.boundary(d)
    upper = C.boundary(d + 1)
    dense_lower = lower.to_dense()
    dense_upper = upper.to_dense()
    for z in grid.grades():
        cells = [k for k, g in enumerate(C.grades[d]) if leq(g, z)]
        if not cells:
            continue
        faces = [k for k, g in enumerate(lower.row_grades) if leq(g, z)]
        cofaces = [k for k, g in enumerate(upper.col_grades) if leq(g, z)]
        rank_lower = gf2_rank(dense_lower[np.ix_(faces, cells)]) if faces else 0
        rank_upper = gf2_rank(dense_upper[np.ix_(cells, cofaces)]) if cofaces else 0
        x0, y0 = grid.box[0], grid.box[1]
        grid.values[z[0] - x0, z[1] - y0] = len(cells) - rank_lower - rank_upper
    return grid


# ---------------------------------------------------------------------------
# End to end
# ---------------------------------------------------------------------------


def prepare_complex(
    distances,
    values: Sequence[int],
    *,
    max_dim: int = 1,
    reduced: bool = True,
    cone: ConeAxis = "x",
    backend: ColumnBackend = "heap",
    stats: Optional[RunStats] = None,
) -> ChainComplex:
    """Function-Rips complex up to max_dim + 1, coned off along `cone`."""
    with _timed(stats, "build_s"):
        K = build_function_rips(distances, values, maxdim=max_dim, reduced=reduced)
        C = K.chain_complex()
    with _timed(stats, "cone_s"):
        C = cone_off(C, cone, backend=backend)
    if stats is not None:
        stats.n_points = K.n_vertices
        stats.n_cells = C.n_cells
    return C


def run(
    C: ChainComplex,
    degrees: Sequence[int],
    *,
    algorithm: str = "cohomology",
    chunk: Optional[ChunkMode] = None,
    clearing: bool = True,
    sparsify_output: bool = True,
    minimize: bool = True,
    phase_order: PhaseOrder = "colex-lex",
    backend: ColumnBackend = "heap",
    n_jobs: int = 1,
    stats: Optional[RunStats] = None,
) -> Dict[int, FreeResolution]:
    """Resolutions for the requested degrees with either algorithm.

    chunk=None picks the algorithm's default: none for cohomology, chain
    for homology.
    """
    if not degrees:
        return {}
    start = time.perf_counter()
    if algorithm == "cohomology":
        mode = chunk or DEFAULT_CHUNKS[algorithm]
        all_degrees = cohomology_mfr(
            C, max(degrees), clearing=clearing, sparsify_output=sparsify_output,
            minimize=minimize, chunk=mode, phase_order=phase_order, backend=backend,
            n_jobs=n_jobs, stats=stats,
        )
        out = {d: all_degrees[d] for d in degrees}
    elif algorithm == "homology":
        mode = chunk or DEFAULT_CHUNKS[algorithm]
        with _timed(stats, "chunk_s"):
            chunked = chunk_complex(C, mode, backend=backend, n_jobs=n_jobs)
        out = {
            d: homology_mfr(chunked, d, chunk="none", minimize=minimize,
                            sparsify_output=sparsify_output, backend=backend,
                            n_jobs=n_jobs, stats=stats)
            for d in degrees
        }
    else:
        raise MfrError(f"Invalid algorithm: {algorithm!r}")
    if stats is not None:
        stats.algorithm = algorithm
        stats.degrees = ",".join(str(d) for d in degrees)
        stats.betti = ["{}:{}/{}/{}".format(d, *out[d].ranks) for d in degrees]
        stats.total_s += time.perf_counter() - start
    return out
