"""SQLAlchemy models for the persistent block cache."""

from sqlalchemy import Integer, LargeBinary, String, UniqueConstraint
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column

# Stored in the ``w`` column for blocks without a motivic weight.
NO_WEIGHT = -(2**31)


class Base(DeclarativeBase):
    pass


class CacheEntry(Base):
    """One ANKV1 record per (config hash, context, degree).

    The key columns duplicate what the record header carries so that lookups never
    decode a blob; the blob stays the source of truth and is checked against them on load.
    """

    __tablename__ = "ext_blocks"
    __table_args__ = (UniqueConstraint("config_hash", "context_id", "s", "t", "u", "w", name="uq_block_key"),)

    id: Mapped[int] = mapped_column(Integer, primary_key=True)
    config_hash: Mapped[str] = mapped_column(String(64), index=True)
    context_id: Mapped[str] = mapped_column(String(32))
    s: Mapped[int] = mapped_column(Integer)
    t: Mapped[int] = mapped_column(Integer)
    u: Mapped[int] = mapped_column(Integer)
    w: Mapped[int] = mapped_column(Integer, default=NO_WEIGHT)
    dimension: Mapped[int] = mapped_column(Integer)
    record: Mapped[bytes] = mapped_column(LargeBinary)

    def __repr__(self) -> str:
        w = "" if self.w == NO_WEIGHT else f", {self.w}"
        return f"CacheEntry({self.context_id} ({self.s}, {self.t}, {self.u}{w}) dim={self.dimension})"
