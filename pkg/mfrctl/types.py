"""
Shared Vocabulary — Literal Aliases, Errors, Run Statistics

Literal unions for every option the pipelines accept, the exception
hierarchy raised by the library, and the RunStats record filled in by
the pipelines and written by the bench / --stats surfaces.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Literal

# ---------------------------------------------------------------------------
# Type aliases (Literal unions for validation)
# ---------------------------------------------------------------------------

Order = Literal["product", "lex", "colex"]
Comparison = Literal["less", "equal", "greater", "incomparable"]
PivotKind = Literal["index", "lex", "colex"]
ColumnBackend = Literal["heap", "vector"]
Algorithm = Literal["cohomology", "homology"]
ChunkMode = Literal["none", "chain", "cochain"]
ConeAxis = Literal["x", "y", "none"]
PhaseOrder = Literal["colex-lex", "lex-colex"]
Shape = Literal["circle", "sphere", "torus", "o3", "random"]

# Valid values for runtime checks
VALID_ORDERS: set = {"product", "lex", "colex"}
VALID_PIVOT_KINDS: set = {"index", "lex", "colex"}
VALID_BACKENDS: set = {"heap", "vector"}
VALID_ALGORITHMS: set = {"cohomology", "homology"}
VALID_CHUNKS: set = {"none", "chain", "cochain"}
VALID_CONE_AXES: set = {"x", "y", "none"}
VALID_PHASE_ORDERS: set = {"colex-lex", "lex-colex"}
VALID_SHAPES: set = {"circle", "sphere", "torus", "o3", "random"}

# Chunk preprocessing each algorithm runs when none is requested
DEFAULT_CHUNKS: Dict[str, str] = {"cohomology": "none", "homology": "chain"}


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class MfrError(ValueError):
    """Base class of every error raised by mfrctl computations."""


class InvalidMatrixError(MfrError):
    """A graded matrix violates validity or has inconsistent shape."""


class OrderError(MfrError):
    """Rows or columns are not sorted the way an algorithm requires."""


class ComplexError(MfrError):
    """Bad point set, bad dimension, or a boundary that does not square to zero."""


class NotInSpanError(MfrError):
    """A target column cannot be written in the given basis."""


class InfiniteSupportError(MfrError):
    """The cohomology route met homology that does not vanish far out."""


class NotMinimalError(MfrError):
    """Betti numbers requested from a resolution that is not minimal."""


class ParseError(MfrError):
    """Malformed input or resolution file."""

    def __init__(self, message: str, line: int = 0) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


# ---------------------------------------------------------------------------
# Run statistics
# ---------------------------------------------------------------------------


@dataclass
class RunStats:
    """Per-run timings and counters.

    Timings are wall-clock seconds and informational only. Counters only
    grow during a run.
    """

    algorithm: str = ""
    input: str = ""
    n_points: int = 0
    n_cells: int = 0
    degrees: str = ""
    build_s: float = 0.0
    cone_s: float = 0.0
    chunk_s: float = 0.0
    reduce_s: float = 0.0
    minimize_s: float = 0.0
    dualize_s: float = 0.0
    total_s: float = 0.0
    phase1_columns: int = 0
    phase1_additions: int = 0
    phase2_additions: int = 0
    cleared_columns: int = 0
    kernel_additions: int = 0
    peak_columns: int = 0
    betti: List[str] = field(default_factory=list)

    def see_columns(self, n: int) -> None:
        """Record a matrix width for the peak column count."""
        if n > self.peak_columns:
            self.peak_columns = n

    def to_dict(self) -> Dict[str, Any]:
        """Serialize to a plain dictionary."""
        return asdict(self)

    def to_row(self) -> List[str]:
        """One CSV row in CSV_HEADER order."""
        row: List[str] = []
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "betti":
                row.append(";".join(value))
            elif isinstance(value, float):
                row.append(f"{value:.6f}")
            else:
                row.append(str(value))
        return row


CSV_HEADER: List[str] = [f.name for f in fields(RunStats)]
