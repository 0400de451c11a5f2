"""Persistent cache of computed Ext blocks.

Records use the ANKV1 layout (all integers little-endian):

    magic      5 bytes   b"ANKV1"
    version    u16
    config     32 bytes  RunConfig.config_hash()
    context    u16 length + UTF-8 context id
    degree     i32 s, t, u, w   (w = -2**31 when the block has no weight)
    basis      u32 basis count of the complex block
    dimension  u32
    words      u32 64-bit words per representative row
    rows       dimension × words u64, bit i of the row = basis element i
    checksum   32 bytes  SHA-256 of everything above

Rows are stored in ``CacheEntry`` blobs; a save is one committed transaction, so a reader
sees either no row or a complete one.
"""

import hashlib
import logging
import struct
from dataclasses import dataclass
from typing import Optional

from sqlalchemy import delete, select
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session

from novikov_eta.cobar import CobarContext, get_context
from novikov_eta.config import RunConfig, get_config
from novikov_eta.exceptions import CacheError, CocycleError
from novikov_eta.ext import ExtBlock, rebuild_ext_block
from novikov_eta.grading import MultiDegree
from novikov_eta.models import NO_WEIGHT, CacheEntry

logger = logging.getLogger(__name__)

MAGIC = b"ANKV1"
VERSION = 1
CHECKSUM_SIZE = 32

_HEAD = struct.Struct("<5sH32s")
_LENGTH = struct.Struct("<H")
_BODY = struct.Struct("<iiiiIII")


@dataclass(frozen=True)
class CacheRecord:
    config_hash: bytes
    context_id: str
    degree: MultiDegree
    basis_count: int
    representatives: tuple


def _words(basis_count: int) -> int:
    return max(1, (basis_count + 63) // 64)


def encode_record(ext_block: ExtBlock, config_hash: bytes) -> bytes:
    """Serialize an ExtBlock's representatives to an ANKV1 record."""
    if len(config_hash) != 32:
        raise ValueError(f"config hash must be 32 bytes, got {len(config_hash)}")
    degree = ext_block.degree
    basis_count = len(ext_block.block)
    words = _words(basis_count)
    context_id = ext_block.context.id.encode("utf-8")
    parts = [
        _HEAD.pack(MAGIC, VERSION, config_hash),
        _LENGTH.pack(len(context_id)),
        context_id,
        _BODY.pack(
            degree.s,
            degree.t,
            degree.u,
            NO_WEIGHT if degree.w is None else degree.w,
            basis_count,
            ext_block.dimension,
            words,
        ),
    ]
    parts.extend(v.to_bytes(8 * words, "little") for v in ext_block.representatives)
    payload = b"".join(parts)
    return payload + hashlib.sha256(payload).digest()


def decode_record(data: bytes) -> CacheRecord:
    """Parse and checksum-verify an ANKV1 record.

    Raises:
        CacheError: On a bad magic, unknown version, truncation or checksum mismatch.
    """
    if len(data) < _HEAD.size + _LENGTH.size + _BODY.size + CHECKSUM_SIZE:
        raise CacheError(f"Record of {len(data)} bytes is truncated")
    payload, checksum = data[:-CHECKSUM_SIZE], data[-CHECKSUM_SIZE:]
    if hashlib.sha256(payload).digest() != checksum:
        raise CacheError("Record checksum mismatch")
    magic, version, config_hash = _HEAD.unpack_from(payload, 0)
    if magic != MAGIC:
        raise CacheError(f"Bad magic {magic!r}")
    if version != VERSION:
        raise CacheError(f"Unsupported record version {version}")
    offset = _HEAD.size
    (length,) = _LENGTH.unpack_from(payload, offset)
    offset += _LENGTH.size
    context_id = payload[offset : offset + length].decode("utf-8")
    offset += length
    s, t, u, w, basis_count, dimension, words = _BODY.unpack_from(payload, offset)
    offset += _BODY.size
    if words != _words(basis_count) or len(payload) - offset != dimension * words * 8:
        raise CacheError(f"Record body for {context_id} ({s}, {t}, {u}) has the wrong length")
    representatives = []
    for _ in range(dimension):
        row = int.from_bytes(payload[offset : offset + 8 * words], "little")
        if row >> basis_count:
            raise CacheError(f"Representative row at {context_id} ({s}, {t}, {u}) exceeds the basis")
        representatives.append(row)
        offset += 8 * words
    degree = MultiDegree(s, t, u, None if w == NO_WEIGHT else w)
    return CacheRecord(config_hash, context_id, degree, basis_count, tuple(representatives))


def _key(degree: MultiDegree) -> dict:
    return {"s": degree.s, "t": degree.t, "u": degree.u, "w": NO_WEIGHT if degree.w is None else degree.w}


class BlockStore:
    """Loads and saves ExtBlocks keyed by config hash, context and degree.

    Passed to ``ExtRegion`` as its ``store``. Every load rebuilds the block from the stored
    representatives and re-checks them, so a corrupt or stale row costs a recomputation
    and never a wrong answer.
    """

    def __init__(self, engine: Engine, config: Optional[RunConfig] = None, job=None):
        self.engine = engine
        self.config = config or get_config()
        self.hash = self.config.config_hash()
        self.job = job
        self.hits = 0
        self.misses = 0

    def _log(self, level: str, message: str) -> None:
        getattr(logger, level)(message)
        if self.job is not None:
            getattr(self.job.logger, level)(message)

    def _select(self, context: CobarContext, degree: MultiDegree):
        return select(CacheEntry).filter_by(config_hash=self.hash.hex(), context_id=context.id, **_key(degree))

    def load(self, context: CobarContext, degree: MultiDegree) -> Optional[ExtBlock]:
        """The cached block, or None on a miss or when the stored row fails verification."""
        with Session(self.engine) as session:
            entry = session.scalars(self._select(context, degree)).first()
            blob = entry.record if entry is not None else None
        if blob is None:
            self.misses += 1
            return None
        try:
            record = decode_record(blob)
            if record.config_hash != self.hash or record.context_id != context.id or record.degree != degree:
                raise CacheError(f"Record header does not match key {context.id} {degree}")
            ext_block = rebuild_ext_block(get_context(record.context_id), record.degree, record.representatives)
            if len(ext_block.block) != record.basis_count:
                raise CacheError(f"Basis count {record.basis_count} differs from {len(ext_block.block)}")
        except (CacheError, CocycleError) as exc:
            self._log("warning", f"Discarding cache record {context.id} {degree}: {exc}")
            self.discard(context, degree)
            self.misses += 1
            return None
        self.hits += 1
        return ext_block

    def save(self, ext_block: ExtBlock) -> None:
        record = encode_record(ext_block, self.hash)
        with Session(self.engine) as session, session.begin():
            session.execute(
                delete(CacheEntry).filter_by(
                    config_hash=self.hash.hex(), context_id=ext_block.context.id, **_key(ext_block.degree)
                )
            )
            session.add(
                CacheEntry(
                    config_hash=self.hash.hex(),
                    context_id=ext_block.context.id,
                    dimension=ext_block.dimension,
                    record=record,
                    **_key(ext_block.degree),
                )
            )
        logger.debug("Cached %s %s (dimension %d)", ext_block.context, ext_block.degree, ext_block.dimension)

    def discard(self, context: CobarContext, degree: MultiDegree) -> None:
        with Session(self.engine) as session, session.begin():
            session.execute(
                delete(CacheEntry).filter_by(config_hash=self.hash.hex(), context_id=context.id, **_key(degree))
            )

    def count(self) -> int:
        """Rows stored under this store's config hash."""
        with Session(self.engine) as session:
            return len(session.scalars(select(CacheEntry.id).filter_by(config_hash=self.hash.hex())).all())


def cache_roundtrip(ext_block: ExtBlock, store: BlockStore) -> ExtBlock:
    """Save then load ``ext_block``; the result equals the input.

    Raises:
        CacheError: If the record written cannot be read back.
    """
    store.save(ext_block)
    loaded = store.load(ext_block.context, ext_block.degree)
    if loaded is None:
        raise CacheError(f"Block {ext_block.context} {ext_block.degree} did not survive the cache roundtrip")
    return loaded
