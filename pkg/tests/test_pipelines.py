"""
Tests for mfrctl.pipelines — both resolution routes against brute force and each other.

Instances are small seeded point clouds, coned off along x so that the
cohomology route applies.
"""

import numpy as np
import pytest

from mfrctl import pipelines
from mfrctl.complex import build_function_rips
from mfrctl.grades import Grade
from mfrctl.pipelines import (
    check_finite_support,
    chunk_complex,
    cohomology_mfr,
    hilbert_oracle,
    homology_mfr,
    prepare_complex,
    run,
)
from mfrctl.resolution import betti, grade_box, hilbert_from_resolution
from mfrctl.types import DEFAULT_CHUNKS, ComplexError, InfiniteSupportError, MfrError, RunStats

TRIANGLE_DIST = [[0, 1, 3], [1, 0, 2], [3, 2, 0]]
TRIANGLE_VALUES = [0, 1, 2]
SEEDS = range(6)
WIDE_SEEDS = range(50)


def _instance(seed: int, n: int = 6, cone: str = "x", max_dim: int = 1):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    values = rng.integers(0, 3, size=n).tolist()
    return prepare_complex(dist, values, max_dim=max_dim, cone=cone)


def _triangle():
    return build_function_rips(TRIANGLE_DIST, TRIANGLE_VALUES, maxdim=1)


class TestHilbertOracle:
    def test_triangle(self):
        grid = hilbert_oracle(_triangle(), 0, (0, 0, 3, 3))
        assert grid.at((1, 0)) == 1
        assert grid.at((2, 0)) == 2
        assert grid.at((2, 3)) == 0
        assert grid.at((0, 0)) == 0

    def test_bad_degree(self):
        with pytest.raises(ComplexError):
            hilbert_oracle(_triangle(), 7, (0, 0, 1, 1))

    @pytest.mark.parametrize("axis", ["x", "y"])
    def test_zero_at_cone_value(self, axis):
        k = "xy".index(axis)
        for seed in range(5):
            C = _instance(seed, cone=axis)
            z0 = max(g[k] for g in C.all_grades())
            box = grade_box(C.all_grades(), 1)
            for d in (0, 1):
                grid = hilbert_oracle(C, d, box)
                assert all(grid.at(z) == 0 for z in grid.grades() if z[k] >= z0)


class TestHomologyRoute:
    def test_triangle(self):
        R = homology_mfr(_triangle(), 0)
        B = betti(R)
        assert B.b0 == [Grade(1, 0), Grade(2, 0)]
        assert B.b1 == [Grade(1, 1), Grade(2, 2)]
        assert B.b2 == []
        assert R.u1.columns == [[0], [1]]

    def test_triangle_h1_is_zero(self):
        assert homology_mfr(_triangle(), 1).is_empty()

    def test_bad_degree(self):
        with pytest.raises(ComplexError):
            homology_mfr(_triangle(), 9)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_matches_oracle(self, seed):
        C = _instance(seed)
        box = grade_box(C.all_grades(), 1)
        for d in (0, 1):
            R = homology_mfr(C, d)
            assert R.is_minimal()
            assert hilbert_from_resolution(R, box) == hilbert_oracle(C, d, box)

    def test_unconed_matches_oracle(self):
        C = _instance(1, cone="none")
        box = grade_box(C.all_grades(), 1)
        for d in (0, 1):
            assert hilbert_from_resolution(homology_mfr(C, d), box) == hilbert_oracle(C, d, box)

    @pytest.mark.parametrize("chunk", ["none", "chain", "cochain"])
    def test_chunk_invariant(self, chunk):
        C = _instance(2)
        reference = betti(homology_mfr(C, 1, chunk="none"))
        assert betti(homology_mfr(C, 1, chunk=chunk)) == reference


class TestCohomologyRoute:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_matches_homology(self, seed):
        C = _instance(seed)
        results = cohomology_mfr(C, 1)
        assert [R.degree for R in results] == [0, 1]
        for R in results:
            assert R.is_minimal()
            assert betti(R) == betti(homology_mfr(C, R.degree))

    @pytest.mark.parametrize("seed", SEEDS)
    def test_matches_oracle(self, seed):
        C = _instance(seed)
        box = grade_box(C.all_grades(), 1)
        for R in cohomology_mfr(C, 1):
            assert hilbert_from_resolution(R, box) == hilbert_oracle(C, R.degree, box)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_clearing_invariant(self, seed):
        C = _instance(seed)
        cleared, plain = RunStats(), RunStats()
        with_clearing = cohomology_mfr(C, 1, clearing=True, stats=cleared)
        without = cohomology_mfr(C, 1, clearing=False, stats=plain)
        assert [betti(R) for R in with_clearing] == [betti(R) for R in without]
        assert cleared.phase1_additions <= plain.phase1_additions
        assert plain.cleared_columns == 0
        assert cleared.cleared_columns >= 1

    @pytest.mark.parametrize("chunk", ["chain", "cochain"])
    def test_chunk_invariant(self, chunk):
        C = _instance(3)
        reference = [betti(R) for R in cohomology_mfr(C, 1)]
        assert [betti(R) for R in cohomology_mfr(C, 1, chunk=chunk)] == reference

    @pytest.mark.parametrize("phase_order", ["colex-lex", "lex-colex"])
    @pytest.mark.parametrize("backend", ["heap", "vector"])
    def test_variants_invariant(self, phase_order, backend):
        C = _instance(4)
        reference = [betti(R) for R in cohomology_mfr(C, 1)]
        results = cohomology_mfr(C, 1, phase_order=phase_order, backend=backend, n_jobs=2)
        assert [betti(R) for R in results] == reference

    def test_no_sparsify_same_betti(self):
        C = _instance(5)
        sparse = cohomology_mfr(C, 1)
        dense = cohomology_mfr(C, 1, sparsify_output=False)
        assert [betti(R) for R in sparse] == [betti(R) for R in dense]

    def test_negative_dmax(self):
        assert cohomology_mfr(_instance(0), -1) == []


class TestCrossRoutes:
    @pytest.mark.parametrize("seed", WIDE_SEEDS)
    def test_agree_up_to_degree_two(self, seed):
        C = _instance(seed, max_dim=2)
        box = grade_box(C.all_grades(), 1)
        for R in cohomology_mfr(C, 2):
            H = homology_mfr(C, R.degree)
            assert betti(R) == betti(H)
            oracle = hilbert_oracle(C, R.degree, box)
            assert hilbert_from_resolution(R, box) == oracle
            assert hilbert_from_resolution(H, box) == oracle

    def test_coned_triangle_identical(self):
        C = prepare_complex(TRIANGLE_DIST, TRIANGLE_VALUES)
        for R in cohomology_mfr(C, 1):
            assert R.to_dict() == homology_mfr(C, R.degree, chunk="chain").to_dict()


class TestFiniteSupport:
    @pytest.mark.parametrize("cone", ["y", "none"])
    def test_triangle_rejected(self, cone):
        C = prepare_complex(TRIANGLE_DIST, TRIANGLE_VALUES, cone=cone)
        with pytest.raises(InfiniteSupportError, match="--cone x"):
            cohomology_mfr(C, 1)

    def test_triangle_coned_along_x(self):
        C = prepare_complex(TRIANGLE_DIST, TRIANGLE_VALUES, cone="x")
        check_finite_support(C, 1)
        assert [R.degree for R in cohomology_mfr(C, 1)] == [0, 1]

    @pytest.mark.parametrize("seed", range(5))
    def test_unconed_rejected(self, seed):
        with pytest.raises(InfiniteSupportError):
            cohomology_mfr(_instance(seed, cone="none"), 1)

    @pytest.mark.parametrize("seed", range(10))
    def test_coned_accepted(self, seed):
        check_finite_support(_instance(seed), 1)

    def test_homology_route_unaffected(self):
        C = prepare_complex(TRIANGLE_DIST, TRIANGLE_VALUES, cone="none")
        assert betti(homology_mfr(C, 0)).b0 == [Grade(1, 0), Grade(2, 0)]


class TestChunk:
    def test_preserves_homology(self):
        C = _instance(0)
        box = grade_box(C.all_grades(), 1)
        for mode in ("chain", "cochain"):
            chunked = chunk_complex(C, mode)
            assert chunked.n_cells <= C.n_cells
            assert chunked.is_chain_complex()
            for d in (0, 1):
                assert hilbert_oracle(chunked, d, box) == hilbert_oracle(C, d, box)

    def test_bad_mode(self):
        with pytest.raises(MfrError):
            chunk_complex(_instance(0), "partial")


class TestRun:
    def test_stats_filled(self):
        stats = RunStats()
        rng = np.random.default_rng(0)
        pts = rng.random((5, 2))
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        C = prepare_complex(dist, [0, 1, 0, 2, 1], stats=stats)
        assert stats.n_points == 5
        assert stats.n_cells == C.n_cells
        out = run(C, [0, 1], algorithm="cohomology", stats=stats)
        assert sorted(out) == [0, 1]
        assert stats.algorithm == "cohomology"
        assert stats.degrees == "0,1"
        assert stats.betti == ["{}:{}/{}/{}".format(d, *out[d].ranks) for d in (0, 1)]
        assert stats.total_s >= 0.0

    def test_algorithms_agree(self):
        C = _instance(1)
        coh = run(C, [1], algorithm="cohomology")
        hom = run(C, [1], algorithm="homology")
        assert betti(coh[1]) == betti(hom[1])

    def test_default_chunks(self, monkeypatch):
        seen = []
        real = pipelines.chunk_complex

        def spy(C, mode, **kwargs):
            seen.append(mode)
            return real(C, mode, **kwargs)

        monkeypatch.setattr(pipelines, "chunk_complex", spy)
        C = _instance(0)
        run(C, [0], algorithm="cohomology")
        run(C, [0], algorithm="homology")
        assert seen[0] == DEFAULT_CHUNKS["cohomology"]
        assert seen[1] == DEFAULT_CHUNKS["homology"]
        seen.clear()
        run(C, [0], algorithm="cohomology", chunk="cochain")
        assert seen == ["cochain"]

    def test_empty_degrees(self):
        assert run(_instance(0), []) == {}

    def test_bad_algorithm(self):
        with pytest.raises(MfrError):
            run(_instance(0), [0], algorithm="magic")
