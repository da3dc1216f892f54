"""
Run Configuration

Configuration dataclasses for mfrctl: the compute pipeline, dataset
generation and benchmarking. Includes load_config() for reading a JSON
config file with silent fallback to compiled defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from mfrctl.types import (
    DEFAULT_CHUNKS,
    VALID_ALGORITHMS,
    VALID_BACKENDS,
    VALID_CHUNKS,
    VALID_CONE_AXES,
    VALID_PHASE_ORDERS,
    VALID_SHAPES,
    Algorithm,
    ChunkMode,
    ColumnBackend,
    ConeAxis,
    PhaseOrder,
    Shape,
)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


class ValidationError(ValueError):
    """Raised when config values are out of valid range."""

    pass


def _check_range(
    errors: List[str], name: str, value, lo, hi, typ=None,
) -> None:
    """Append an error message if value is out of [lo, hi] or wrong type."""
    if typ is not None and (not isinstance(value, typ) or isinstance(value, bool)):
        names = " or ".join(t.__name__ for t in (typ if isinstance(typ, tuple) else (typ,)))
        errors.append(f"{name}: expected {names}, got {type(value).__name__}")
        return
    if value < lo or value > hi:
        errors.append(f"{name}: {value} not in [{lo}, {hi}]")


def _check_choice(errors: List[str], name: str, value, choices) -> None:
    """Append an error message if value is not one of choices."""
    if value not in choices:
        errors.append(f"{name}: {value!r} not in {sorted(choices)}")


@dataclass
class ComputeConfig:
    """Pipeline options shared by compute, verify, hilbert and bench."""
    algorithm: Algorithm = "cohomology"
    chunk: Optional[ChunkMode] = None
    columns: ColumnBackend = "heap"
    clearing: bool = True
    sparsify: bool = True
    minimize: bool = True
    cone: ConeAxis = "x"
    reduced: bool = True
    max_dim: int = 1
    threads: int = 1
    phase_order: PhaseOrder = "colex-lex"

    def validate(self) -> List[str]:
        """Return list of validation error messages (empty = valid)."""
        errors: List[str] = []
        _check_choice(errors, "compute.algorithm", self.algorithm, VALID_ALGORITHMS)
        if self.chunk is not None:
            _check_choice(errors, "compute.chunk", self.chunk, VALID_CHUNKS)
        _check_choice(errors, "compute.columns", self.columns, VALID_BACKENDS)
        _check_choice(errors, "compute.cone", self.cone, VALID_CONE_AXES)
        _check_choice(errors, "compute.phase_order", self.phase_order, VALID_PHASE_ORDERS)
        _check_range(errors, "compute.max_dim", self.max_dim, 0, 8, int)
        _check_range(errors, "compute.threads", self.threads, 1, 256, int)
        return errors

    def chunk_mode(self) -> ChunkMode:
        """Explicit chunk mode, or the algorithm's default."""
        if self.chunk is not None:
            return self.chunk
        return DEFAULT_CHUNKS[self.algorithm]


@dataclass
class GenerateConfig:
    """Sample generation defaults."""
    shape: Shape = "circle"
    n: int = 50
    sigma: float = 0.15
    seed: int = 0

    def validate(self) -> List[str]:
        """Return list of validation error messages (empty = valid)."""
        errors: List[str] = []
        _check_choice(errors, "generate.shape", self.shape, VALID_SHAPES)
        _check_range(errors, "generate.n", self.n, 1, 100000, int)
        _check_range(errors, "generate.sigma", self.sigma, 1e-9, 1e9, (int, float))
        return errors


@dataclass
class BenchConfig:
    """Benchmark defaults."""
    repeats: int = 1
    algorithms: List[str] = field(default_factory=lambda: ["cohomology", "homology"])

    def validate(self) -> List[str]:
        """Return list of validation error messages (empty = valid)."""
        errors: List[str] = []
        _check_range(errors, "bench.repeats", self.repeats, 1, 100, int)
        for a in self.algorithms:
            _check_choice(errors, "bench.algorithms", a, VALID_ALGORITHMS)
        return errors


@dataclass
class MfrConfig:
    """Top-level mfrctl configuration."""
    compute: ComputeConfig = field(default_factory=ComputeConfig)
    generate: GenerateConfig = field(default_factory=GenerateConfig)
    bench: BenchConfig = field(default_factory=BenchConfig)

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> MfrConfig:
        """Build config from a nested dict (e.g. JSON)."""
        kwargs: Dict[str, Any] = {}
        if "compute" in d:
            kwargs["compute"] = ComputeConfig(**d["compute"])
        if "generate" in d:
            kwargs["generate"] = GenerateConfig(**d["generate"])
        if "bench" in d:
            kwargs["bench"] = BenchConfig(**d["bench"])
        return cls(**kwargs)

    def validate(self) -> List[str]:
        """Validate all config sections. Returns list of error messages."""
        errors: List[str] = []
        errors.extend(self.compute.validate())
        errors.extend(self.generate.validate())
        errors.extend(self.bench.validate())
        return errors


def load_config(
    path: Optional[str] = None, *, strict: bool = False,
) -> MfrConfig:
    """Load config from a JSON file. Returns defaults if file missing/invalid.

    Args:
        path: Path to config.json. If None, returns compiled defaults.
        strict: If True, raise ValidationError on invalid config values.

    Raises:
        ValidationError: If strict=True and config values are out of range.
    """
    if path is None:
        cfg = MfrConfig()
    else:
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
            cfg = MfrConfig.from_dict(data)
        except (OSError, json.JSONDecodeError, TypeError, KeyError, AttributeError):
            cfg = MfrConfig()

    if strict:
        errors = cfg.validate()
        if errors:
            raise ValidationError(
                f"Config validation failed: {'; '.join(errors)}"
            )

    return cfg
