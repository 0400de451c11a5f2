"""Shared fixtures: every test starts from the default configuration and an empty block cache."""

import pytest

from novikov_eta.cobar import clear_block_cache
from novikov_eta.config import RunConfig, set_config
from novikov_eta.utils import get_cache_engine


@pytest.fixture(autouse=True)
def default_config():
    set_config(None)
    clear_block_cache()
    yield
    set_config(None)
    clear_block_cache()


@pytest.fixture
def small_config(tmp_path):
    """A config small enough for unit tests, with cache and artifacts under tmp_path."""
    config = RunConfig(
        max_u=12,
        max_s=3,
        max_t=3,
        cache_dir=tmp_path / "cache",
        output_dir=tmp_path / "out",
    )
    set_config(config)
    return config


@pytest.fixture
def cache_engine(tmp_path):
    return get_cache_engine(tmp_path / "cache", force_new=True)
