"""
Tests for mfrctl.export_import — resolution files and stats CSV.
"""

import pytest

from mfrctl.complex import build_function_rips
from mfrctl.export_import import (
    MAGIC,
    format_resolution,
    parse_resolutions,
    read_resolution,
    read_stats,
    write_resolution,
    write_stats,
)
from mfrctl.matrix import GradedMatrix
from mfrctl.pipelines import homology_mfr
from mfrctl.resolution import FreeResolution
from mfrctl.types import CSV_HEADER, ParseError, RunStats


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _make_worked() -> FreeResolution:
    u1 = GradedMatrix.from_dense(
        [[1, 1, 0], [0, 1, 1]],
        row_grades=[(1, 4), (4, 1)],
        col_grades=[(1, 7), (4, 4), (7, 1)],
    )
    u2 = GradedMatrix([(1, 7), (4, 4), (7, 1)], [(7, 7)], [[0, 1, 2]])
    return FreeResolution(0, u1, u2)


@pytest.fixture
def triangle_resolution():
    K = build_function_rips([[0, 1, 3], [1, 0, 2], [3, 2, 0]], [0, 1, 2], maxdim=1)
    return homology_mfr(K, 0)


# ---------------------------------------------------------------------------
# Resolution files
# ---------------------------------------------------------------------------


class TestFormat:
    def test_triangle_block(self, triangle_resolution):
        assert format_resolution(triangle_resolution).splitlines() == [
            MAGIC,
            "degree 0",
            "F0 2",
            "1 0",
            "2 0",
            "F1 2",
            "1 1 : 0",
            "2 2 : 1",
            "F2 0",
        ]

    def test_f2_line(self):
        lines = format_resolution(_make_worked()).splitlines()
        assert lines[-1] == "7 7 : 0 1 2"
        assert lines[lines.index("F0 2") + 1] == "4 1"

    def test_empty(self):
        text = format_resolution(FreeResolution.empty(2))
        assert text.splitlines() == [MAGIC, "degree 2", "F0 0", "F1 0", "F2 0"]

    def test_deterministic(self):
        assert format_resolution(_make_worked()) == format_resolution(_make_worked().canonical())


class TestReadWrite:
    def test_round_trip(self, tmp_path, triangle_resolution):
        path = tmp_path / "out.mfr"
        blocks = [triangle_resolution, _make_worked()]
        assert write_resolution(blocks, path) == 2
        back = read_resolution(path)
        assert [R.canonical() for R in blocks] == back
        assert path.read_text(encoding="utf-8").endswith("F2 1\n7 7 : 0 1 2\n")

    def test_single(self, tmp_path):
        path = tmp_path / "one.mfr"
        assert write_resolution(_make_worked(), path) == 1
        assert len(read_resolution(path)) == 1

    def test_bad_magic(self):
        with pytest.raises(ParseError) as exc:
            parse_resolutions("mfr 3\ndegree 0\nF0 0\nF1 0\nF2 0\n")
        assert exc.value.line == 1

    def test_index_out_of_range(self):
        text = "mfr 2\ndegree 0\nF0 1\n0 0\nF1 1\n1 1 : 1\nF2 0\n"
        with pytest.raises(ParseError) as exc:
            parse_resolutions(text)
        assert exc.value.line == 6

    def test_missing_colon(self):
        with pytest.raises(ParseError):
            parse_resolutions("mfr 2\ndegree 0\nF0 1\n0 0\nF1 1\n1 1 0\nF2 0\n")

    def test_truncated(self):
        with pytest.raises(ParseError, match="unexpected end"):
            parse_resolutions("mfr 2\ndegree 0\nF0 2\n0 0\n")

    def test_not_an_integer(self):
        with pytest.raises(ParseError):
            parse_resolutions("mfr 2\ndegree zero\nF0 0\nF1 0\nF2 0\n")


# ---------------------------------------------------------------------------
# Stats
# ---------------------------------------------------------------------------


class TestStats:
    def test_append_with_single_header(self, tmp_path):
        path = tmp_path / "stats.csv"
        first = RunStats(algorithm="cohomology", input="a.txt", n_points=5,
                         betti=["0:1/2/1", "1:0/0/0"])
        write_stats([first], path)
        write_stats([RunStats(algorithm="homology", input="a.txt")], path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0].split(",") == CSV_HEADER
        assert len(lines) == 3
        rows = read_stats(path)
        assert rows[0]["algorithm"] == "cohomology"
        assert rows[0]["n_points"] == "5"
        assert rows[0]["betti"] == "0:1/2/1;1:0/0/0"
        assert rows[1]["algorithm"] == "homology"
