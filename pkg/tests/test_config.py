"""Tests for the layered run configuration."""

from pathlib import Path

import pytest

from novikov_eta.config import (
    CACHE_DIR_ENV,
    RunConfig,
    get_config,
    load_config,
    parse_config_file,
    set_config,
)
from novikov_eta.ext import Region


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# bounds\n"
        "max_u = 12\n"
        "max_s=3   # trailing comment\n"
        "\n"
        "contexts = sphere, motivic\n",
        encoding="utf-8",
    )
    return path


class TestParse:
    def test_key_values(self, config_file):
        assert parse_config_file(config_file) == {"max_u": "12", "max_s": "3", "contexts": ["sphere", "motivic"]}

    def test_missing_equals(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("max_u 12\n", encoding="utf-8")
        with pytest.raises(ValueError, match="key=value"):
            parse_config_file(path)


class TestLoad:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv(CACHE_DIR_ENV, raising=False)
        config = load_config()
        assert config.max_u == 24
        assert config.cache_dir == Path(".novikov_eta_cache")
        assert config.contexts == ["sphere", "mod2", "motivic"]

    def test_file_then_overrides(self, config_file):
        config = load_config(config_file, max_s=5, max_t=None)
        assert config.max_u == 12
        assert config.max_s == 5
        assert config.max_t == 8
        assert config.contexts == ["sphere", "motivic"]

    def test_environment_cache_dir(self, monkeypatch, tmp_path):
        monkeypatch.setenv(CACHE_DIR_ENV, str(tmp_path / "elsewhere"))
        assert load_config(cache_dir=tmp_path / "flag").cache_dir == tmp_path / "elsewhere"

    def test_unknown_context(self):
        with pytest.raises(ValueError):
            load_config(contexts=["sphere", "tmf"])

    def test_invalid_value(self):
        with pytest.raises(ValueError):
            load_config(workers=0)


class TestRunConfig:
    def test_hash_tracks_bounds(self):
        base = RunConfig()
        assert len(base.config_hash()) == 32
        assert base.config_hash() != RunConfig(max_u=12).config_hash()

    def test_hash_ignores_presentation(self, tmp_path):
        base = RunConfig()
        other = RunConfig(workers=4, output_dir=tmp_path, multiplicity_threshold=3)
        assert base.config_hash() == other.config_hash()

    def test_active_config(self):
        config = RunConfig(max_u=6)
        set_config(config)
        assert get_config() is config
        set_config(None)
        assert get_config().max_u == 24

    def test_region(self):
        region = Region.from_config(RunConfig(max_u=10, max_s=2, max_t=1))
        assert (region.max_s, region.max_u, region.max_t) == (2, 10, 1)
