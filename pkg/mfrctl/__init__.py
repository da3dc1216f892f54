"""
mfrctl — Minimal free resolutions of two-parameter persistent homology.

Builds function-Rips bifiltrations from a distance matrix and vertex
values and computes minimal free resolutions (and graded Betti numbers)
of their homology, either directly or through the dual cochain complex
with clearing.
"""

__version__ = "0.1.0"

from mfrctl.grades import Grade
from mfrctl.matrix import GradedMatrix
from mfrctl.complex import Bifiltration, ChainComplex, build_function_rips, cone_off
from mfrctl.resolution import BettiDiagram, FreeResolution, HilbertGrid, betti
from mfrctl.pipelines import cohomology_mfr, hilbert_oracle, homology_mfr
from mfrctl.config import MfrConfig
from mfrctl.types import MfrError, RunStats

__all__ = [
    "__version__",
    "Grade",
    "GradedMatrix",
    "Bifiltration",
    "ChainComplex",
    "build_function_rips",
    "cone_off",
    "FreeResolution",
    "BettiDiagram",
    "HilbertGrid",
    "betti",
    "homology_mfr",
    "cohomology_mfr",
    "hilbert_oracle",
    "MfrConfig",
    "MfrError",
    "RunStats",
]
