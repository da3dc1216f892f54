"""
Datasets — Function-Rips Input Files and Generated Samples

Input format (text, line oriented; blank lines and lines starting with
'#' are ignored):

    function-rips
    <n>
    <n values>
    <row 2: 1 distance>
    <row 3: 2 distances>
    ...
    <row n: n-1 distances>

Values are integers unless a discretization mode is given, in which case
they may be reals. Distances are written with repr precision, so a
written dataset parses back to the same floats.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, List, Optional, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

from mfrctl.complex import discretize_values, gaussian_density
from mfrctl.types import VALID_SHAPES, MfrError, ParseError, Shape

logger = logging.getLogger(__name__)

HEADER = "function-rips"


@dataclass
class InputDataset:
    """n points with integer values and a symmetric distance matrix."""

    values: List[int] = field(default_factory=list)
    distances: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.values)

    def __post_init__(self) -> None:
        D = np.asarray(self.distances, dtype=float)
        if D.ndim == 1:
            D = squareform(D, checks=False)
        if self.n == 1 and D.size == 0:
            D = np.zeros((1, 1))
        if D.shape != (self.n, self.n):
            raise MfrError(f"{self.n} values but a distance matrix of shape {D.shape}")
        self.distances = D

    def lower_rows(self) -> List[List[float]]:
        return [[float(v) for v in self.distances[i, :i]] for i in range(1, self.n)]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _content_lines(stream: IO[str]):
    for lineno, raw in enumerate(stream, start=1):
        text = raw.strip()
        if text and not text.startswith("#"):
            yield lineno, text.split()


def _floats(tokens: List[str], lineno: int) -> List[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise ParseError(f"not a number in {' '.join(tokens)!r}", lineno) from None


def parse_input(
    path: Union[str, Path], discretize: Optional[str] = None,
) -> InputDataset:
    """Read a function-Rips input file.

    Args:
        path: File to read.
        discretize: rank_desc, rank_asc or scale:<q> to accept real values.

    Raises:
        ParseError: Bad header, counts, values or row lengths (with line number).
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        lines = list(_content_lines(fh))
    if not lines or lines[0][1] != [HEADER]:
        raise ParseError(f"expected header {HEADER!r}", lines[0][0] if lines else 1)
    if len(lines) < 2 or len(lines[1][1]) != 1:
        raise ParseError("expected the point count", lines[1][0] if len(lines) > 1 else 2)
    lineno, tokens = lines[1]
    try:
        n = int(tokens[0])
    except ValueError:
        raise ParseError(f"point count {tokens[0]!r} is not an integer", lineno) from None
    if n < 1:
        raise ParseError(f"point count must be >= 1, got {n}", lineno)
    if len(lines) < 3:
        raise ParseError("missing the value line", lineno + 1)

    lineno, tokens = lines[2]
    if len(tokens) != n:
        raise ParseError(f"expected {n} values, got {len(tokens)}", lineno)
    if discretize is None:
        try:
            values = [int(t) for t in tokens]
        except ValueError:
            raise ParseError("values must be integers (use --discretize for reals)",
                             lineno) from None
    else:
        values = discretize_values(_floats(tokens, lineno), discretize)

    rows = lines[3:]
    if len(rows) != n - 1:
        where = rows[n - 1][0] if len(rows) > n - 1 else (rows[-1][0] + 1 if rows else lineno + 1)
        raise ParseError(f"expected {n - 1} distance rows, got {len(rows)}", where)
    D = np.zeros((n, n))
    for i, (lineno, tokens) in enumerate(rows, start=1):
        if len(tokens) != i:
            raise ParseError(f"distance row {i + 1} needs {i} entries, got {len(tokens)}", lineno)
        D[i, :i] = _floats(tokens, lineno)
    D = D + D.T
    logger.debug("parsed %s: %d points", path, n)
    return InputDataset(values=values, distances=D, name=path.name)


def write_dataset(dataset: InputDataset, path: Union[str, Path]) -> None:
    """Write a dataset in the input format."""
    lines = [HEADER, str(dataset.n), " ".join(str(int(v)) for v in dataset.values)]
    lines += [" ".join(repr(v) for v in row) for row in dataset.lower_rows()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


def _unit(points: np.ndarray) -> np.ndarray:
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def sample_points(shape: Shape, n: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded sample of n points on the named shape."""
    if shape == "circle":
        t = rng.uniform(0.0, 2.0 * np.pi, n)
        return np.column_stack([np.cos(t), np.sin(t)])
    if shape == "sphere":
        return _unit(rng.standard_normal((n, 3)))
    if shape == "torus":
        a = rng.uniform(0.0, 2.0 * np.pi, n)
        b = rng.uniform(0.0, 2.0 * np.pi, n)
        return np.column_stack([np.cos(a), np.sin(a), np.cos(b), np.sin(b)])
    if shape == "o3":
        out = np.empty((n, 9))
        for k in range(n):
            q, r = np.linalg.qr(rng.standard_normal((3, 3)))
            out[k] = (q * np.sign(np.diag(r))).ravel()
        return out
    if shape == "random":
        return rng.uniform(0.0, 1.0, (n, 3))
    raise MfrError(f"Invalid shape: {shape!r} (choose from {sorted(VALID_SHAPES)})")


def generate_dataset(shape: Shape, n: int, sigma: float, seed: int = 0) -> InputDataset:
    """Sample a shape and attach rank-discretized Gaussian densities.

    The densest point gets value 0.

    Raises:
        MfrError: Unknown shape, n < 1 or sigma <= 0.
    """
    if n < 1:
        raise MfrError(f"n must be >= 1, got {n}")
    if not sigma > 0:
        raise MfrError(f"sigma must be positive, got {sigma}")
    points = sample_points(shape, n, np.random.default_rng(seed))
    D = squareform(pdist(points)) if n > 1 else np.zeros((1, 1))
    values = discretize_values(gaussian_density(D, sigma), "rank_desc")
    return InputDataset(values=values, distances=D, name=f"{shape}-n{n}-s{seed}")
