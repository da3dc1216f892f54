"""
Export/Import — Resolution Files and Run Statistics

Resolution file (one block per degree, blocks separated by a blank line):

    mfr 2
    degree <d>
    F0 <k0>
    x y                      (k0 lines)
    F1 <k1>
    x y : i i ...            (k1 lines, row indices into F0, ascending)
    F2 <k2>
    x y : i i ...            (k2 lines, row indices into F1)

Every block is written in canonical order (each F_q sorted colex by
grade, then index), so identical resolutions give identical bytes.

Statistics are appended as CSV rows under a fixed header.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

from mfrctl.grades import Grade
from mfrctl.matrix import GradedMatrix
from mfrctl.resolution import FreeResolution
from mfrctl.types import CSV_HEADER, ParseError, RunStats

logger = logging.getLogger(__name__)

MAGIC = "mfr 2"


# ---------------------------------------------------------------------------
# Resolutions
# ---------------------------------------------------------------------------


def format_resolution(R: FreeResolution) -> str:
    """One block of the resolution file format, without trailing newline."""
    R = R.canonical()
    f0, f1, f2 = R.gen_grades
    lines = [MAGIC, f"degree {R.degree}", f"F0 {len(f0)}"]
    lines += [f"{g.x} {g.y}" for g in f0]
    for name, grades, M in (("F1", f1, R.u1), ("F2", f2, R.u2)):
        lines.append(f"{name} {len(grades)}")
        for g, col in zip(grades, M.columns):
            lines.append(" ".join([f"{g.x} {g.y} :"] + [str(i) for i in col]))
    return "\n".join(lines)


def write_resolution(
    resolutions: Union[FreeResolution, Iterable[FreeResolution]],
    path: Union[str, Path],
) -> int:
    """Write one or more resolutions; returns the number of blocks."""
    if isinstance(resolutions, FreeResolution):
        resolutions = [resolutions]
    blocks = [format_resolution(R) for R in resolutions]
    Path(path).write_text("\n\n".join(blocks) + "\n", encoding="utf-8")
    logger.debug("wrote %d resolution block(s) to %s", len(blocks), path)
    return len(blocks)


class _Lines:
    """Cursor over non-blank lines with their 1-based numbers."""

    def __init__(self, text: str) -> None:
        self._items = [(k, s.strip()) for k, s in enumerate(text.splitlines(), start=1)
                       if s.strip()]
        self._pos = 0

    def __bool__(self) -> bool:
        return self._pos < len(self._items)

    def next(self, what: str) -> Tuple[int, str]:
        if not self:
            last = self._items[-1][0] + 1 if self._items else 1
            raise ParseError(f"unexpected end of file, expected {what}", last)
        item = self._items[self._pos]
        self._pos += 1
        return item


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{token!r} is not an integer", lineno) from None


def _keyword(lines: _Lines, key: str) -> int:
    lineno, text = lines.next(f"'{key} <value>'")
    parts = text.split()
    if len(parts) != 2 or parts[0] != key:
        raise ParseError(f"expected '{key} <value>', got {text!r}", lineno)
    return _int(parts[1], lineno)


def _generators(lines: _Lines, key: str, bound: int) -> Tuple[List[Grade], List[List[int]]]:
    count = _keyword(lines, key)
    grades: List[Grade] = []
    columns: List[List[int]] = []
    for _ in range(count):
        lineno, text = lines.next(f"a {key} generator")
        head, sep, tail = text.partition(":")
        xy = head.split()
        if len(xy) != 2 or (bound >= 0 and not sep):
            raise ParseError(f"malformed {key} generator {text!r}", lineno)
        grades.append(Grade(_int(xy[0], lineno), _int(xy[1], lineno)))
        col = [_int(t, lineno) for t in tail.split()]
        if any(i < 0 or i >= bound for i in col):
            raise ParseError(f"row index out of range [0, {bound})", lineno)
        columns.append(col)
    return grades, columns


def parse_resolutions(text: str) -> List[FreeResolution]:
    """Parse every block of a resolution file."""
    lines = _Lines(text)
    out: List[FreeResolution] = []
    while lines:
        lineno, magic = lines.next(MAGIC)
        if magic != MAGIC:
            raise ParseError(f"expected {MAGIC!r}, got {magic!r}", lineno)
        degree = _keyword(lines, "degree")
        f0, _ = _generators(lines, "F0", -1)
        f1, c1 = _generators(lines, "F1", len(f0))
        f2, c2 = _generators(lines, "F2", len(f1))
        out.append(FreeResolution(degree, GradedMatrix(f0, f1, c1), GradedMatrix(f1, f2, c2)))
    return out


def read_resolution(path: Union[str, Path]) -> List[FreeResolution]:
    """Read a resolution file written by write_resolution."""
    return parse_resolutions(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Run statistics
# ---------------------------------------------------------------------------


def write_stats(rows: Sequence[RunStats], path: Union[str, Path]) -> int:
    """Append rows to a CSV file, writing the header when the file is new."""
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with path.open("a", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(CSV_HEADER)
        for stats in rows:
            writer.writerow(stats.to_row())
    return len(rows)


def read_stats(path: Union[str, Path]) -> List[dict]:
    """Read a stats CSV back as dictionaries keyed by header field."""
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
