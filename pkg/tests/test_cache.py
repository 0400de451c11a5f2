"""Tests for the ANKV1 record format and the SQLite block store."""

import hashlib
from unittest.mock import MagicMock

import pytest
from sqlalchemy import select
from sqlalchemy.orm import Session

from novikov_eta.cache import MAGIC, BlockStore, cache_roundtrip, decode_record, encode_record
from novikov_eta.cobar import AMOT, P_Q
from novikov_eta.config import RunConfig
from novikov_eta.exceptions import CacheError
from novikov_eta.ext import Region, cohomology, compute_ext_block
from novikov_eta.grading import MultiDegree
from novikov_eta.models import CacheEntry

DEGREE = MultiDegree(2, 0, 4)


@pytest.fixture
def h0_squared():
    return compute_ext_block(P_Q, DEGREE)


@pytest.fixture
def config(tmp_path):
    return RunConfig(max_u=8, max_s=2, max_t=0, cache_dir=tmp_path / "cache")


@pytest.fixture
def store(cache_engine, config):
    return BlockStore(cache_engine, config)


class TestRecord:
    def test_decode(self, h0_squared, config):
        record = decode_record(encode_record(h0_squared, config.config_hash()))
        assert record.context_id == "P;Q"
        assert record.degree == DEGREE
        assert record.representatives == h0_squared.representatives
        assert record.basis_count == len(h0_squared.block)
        assert record.config_hash == config.config_hash()

    def test_weight_survives(self, config):
        ext_block = compute_ext_block(AMOT, MultiDegree(1, 0, 2, 1))
        record = decode_record(encode_record(ext_block, config.config_hash()))
        assert record.degree.w == 1

    def test_checksum(self, h0_squared, config):
        data = bytearray(encode_record(h0_squared, config.config_hash()))
        data[10] ^= 0xFF
        with pytest.raises(CacheError):
            decode_record(bytes(data))

    def test_magic(self, h0_squared, config):
        data = encode_record(h0_squared, config.config_hash())
        payload = b"XXXXX" + data[len(MAGIC) : -32]
        with pytest.raises(CacheError, match="magic"):
            decode_record(payload + hashlib.sha256(payload).digest())

    def test_truncated(self):
        with pytest.raises(CacheError):
            decode_record(b"ANKV1")

    def test_config_hash_length(self, h0_squared):
        with pytest.raises(ValueError):
            encode_record(h0_squared, b"short")


class TestBlockStore:
    def test_miss(self, store):
        assert store.load(P_Q, DEGREE) is None
        assert store.misses == 1

    def test_roundtrip(self, store, h0_squared):
        loaded = cache_roundtrip(h0_squared, store)
        assert loaded.representatives == h0_squared.representatives
        assert store.hits == 1
        assert store.count() == 1

    def test_save_replaces(self, store, h0_squared):
        store.save(h0_squared)
        store.save(h0_squared)
        assert store.count() == 1

    def test_corrupt_row_is_discarded(self, cache_engine, config, h0_squared):
        job = MagicMock()
        store = BlockStore(cache_engine, config, job=job)
        store.save(h0_squared)
        with Session(cache_engine) as session, session.begin():
            entry = session.scalars(select(CacheEntry)).one()
            data = bytearray(entry.record)
            data[-1] ^= 0x01
            entry.record = bytes(data)
        assert store.load(P_Q, DEGREE) is None
        assert store.count() == 0
        job.logger.warning.assert_called_once()

    def test_config_hash_separates_runs(self, cache_engine, store, h0_squared):
        store.save(h0_squared)
        other = BlockStore(cache_engine, RunConfig(max_u=10, max_s=2, max_t=0))
        assert other.load(P_Q, DEGREE) is None
        assert other.count() == 0

    def test_workers_share_a_hash(self, cache_engine, config, store, h0_squared):
        store.save(h0_squared)
        other = BlockStore(cache_engine, config.model_copy(update={"workers": 4}))
        assert other.load(P_Q, DEGREE) is not None

    def test_engine_reads_back(self, store):
        region = Region(max_s=2, max_u=8)
        first = cohomology(P_Q, region, store=store)
        saved = store.count()
        assert saved == len(first.blocks)
        second = cohomology(P_Q, region, store=store)
        assert store.hits == saved
        assert {d: b.dimension for d, b in second.blocks.items()} == {
            d: b.dimension for d, b in first.blocks.items()
        }
