"""
Tests for mfrctl.config — defaults, validation, and JSON loading.
"""

import json

import pytest

from mfrctl.config import (
    BenchConfig,
    ComputeConfig,
    GenerateConfig,
    MfrConfig,
    ValidationError,
    load_config,
)
from mfrctl.types import DEFAULT_CHUNKS


# ---------------------------------------------------------------------------
# ComputeConfig
# ---------------------------------------------------------------------------


class TestComputeConfig:
    def test_defaults_valid(self):
        cfg = ComputeConfig()
        assert cfg.validate() == []
        assert cfg.algorithm == "cohomology"
        assert cfg.clearing and cfg.sparsify and cfg.minimize
        assert cfg.cone == "x"

    def test_chunk_mode_follows_algorithm(self):
        assert ComputeConfig().chunk_mode() == "none"
        assert ComputeConfig(algorithm="homology").chunk_mode() == "chain"
        assert ComputeConfig(algorithm="homology", chunk="none").chunk_mode() == "none"

    def test_chunk_defaults_shared_with_pipelines(self):
        for algorithm, mode in DEFAULT_CHUNKS.items():
            assert ComputeConfig(algorithm=algorithm).chunk_mode() == mode

    def test_bad_algorithm(self):
        errors = ComputeConfig(algorithm="spectral").validate()
        assert any("compute.algorithm" in e for e in errors)

    def test_bad_chunk(self):
        errors = ComputeConfig(chunk="half").validate()
        assert any("compute.chunk" in e for e in errors)

    def test_bad_columns(self):
        errors = ComputeConfig(columns="bitset").validate()
        assert any("compute.columns" in e for e in errors)

    def test_max_dim_range(self):
        assert any("max_dim" in e for e in ComputeConfig(max_dim=-1).validate())
        assert any("max_dim" in e for e in ComputeConfig(max_dim=9).validate())

    def test_threads_type(self):
        assert any("threads" in e for e in ComputeConfig(threads=True).validate())
        assert any("threads" in e for e in ComputeConfig(threads=0).validate())

    def test_bad_phase_order(self):
        errors = ComputeConfig(phase_order="lex-lex").validate()
        assert any("phase_order" in e for e in errors)


# ---------------------------------------------------------------------------
# GenerateConfig / BenchConfig
# ---------------------------------------------------------------------------


class TestGenerateConfig:
    def test_defaults_valid(self):
        assert GenerateConfig().validate() == []

    def test_bad_shape(self):
        assert any("shape" in e for e in GenerateConfig(shape="klein").validate())

    def test_n_range(self):
        assert any("generate.n" in e for e in GenerateConfig(n=0).validate())

    def test_sigma_positive(self):
        assert any("sigma" in e for e in GenerateConfig(sigma=0.0).validate())

    def test_integer_sigma_accepted(self):
        assert GenerateConfig(sigma=1).validate() == []

    def test_sigma_type(self):
        errors = GenerateConfig(sigma="wide").validate()
        assert errors == ["generate.sigma: expected int or float, got str"]


class TestBenchConfig:
    def test_defaults_valid(self):
        assert BenchConfig().validate() == []
        assert BenchConfig().algorithms == ["cohomology", "homology"]

    def test_bad_algorithm(self):
        assert BenchConfig(algorithms=["magic"]).validate()

    def test_repeats_range(self):
        assert BenchConfig(repeats=0).validate()


# ---------------------------------------------------------------------------
# load_config
# ---------------------------------------------------------------------------


class TestLoadConfig:
    def test_none_gives_defaults(self):
        assert load_config(None) == MfrConfig()

    def test_missing_file(self, tmp_path):
        assert load_config(str(tmp_path / "nope.json")) == MfrConfig()

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        assert load_config(str(path)) == MfrConfig()

    def test_unknown_key_falls_back(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"compute": {"speed": "fast"}}), encoding="utf-8")
        assert load_config(str(path)) == MfrConfig()

    def test_partial(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({
            "compute": {"algorithm": "homology", "threads": 2},
            "generate": {"shape": "torus"},
        }), encoding="utf-8")
        cfg = load_config(str(path))
        assert cfg.compute.algorithm == "homology"
        assert cfg.compute.threads == 2
        assert cfg.compute.columns == "heap"
        assert cfg.generate.shape == "torus"
        assert cfg.bench == BenchConfig()

    def test_integer_sigma_from_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"generate": {"sigma": 1}}), encoding="utf-8")
        assert load_config(str(path), strict=True).generate.sigma == 1

    def test_strict_rejects(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"compute": {"max_dim": 20}}), encoding="utf-8")
        assert load_config(str(path)).compute.max_dim == 20
        with pytest.raises(ValidationError, match="max_dim"):
            load_config(str(path), strict=True)
