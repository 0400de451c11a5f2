"""Utility functions for novikov-eta.

Provides:
- SQLAlchemy engine factory for the block cache
- Dimension tables and the text report printed by ``ext``
- Artifact writing for the CLI
"""

import logging
from pathlib import Path
from typing import Optional

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine

from novikov_eta.config import get_config
from novikov_eta.ext import ExtRegion, total_dimension
from novikov_eta.models import Base

logger = logging.getLogger(__name__)

CACHE_FILENAME = "cache.sqlite3"


# ---------------------------------------------------------------------------
# Engine factory
# ---------------------------------------------------------------------------

_engine_cache: Optional[Engine] = None


def get_cache_engine(cache_dir: Optional[Path] = None, force_new: bool = False) -> Engine:
    """Build (or return cached) SQLAlchemy engine for the block cache.

    The database lives at ``<cache_dir>/cache.sqlite3``; tables are created on first use.

    Args:
        cache_dir: Directory for the database. Defaults to the active config's ``cache_dir``.
        force_new: If True, discard any cached engine and create a fresh one. A cached engine
            for a different directory is always replaced.

    Returns:
        A SQLAlchemy Engine instance.

    Raises:
        RuntimeError: If the cache directory cannot be created.
    """
    global _engine_cache

    directory = Path(cache_dir if cache_dir is not None else get_config().cache_dir)
    url = f"sqlite:///{directory / CACHE_FILENAME}"
    if _engine_cache is not None and not force_new and str(_engine_cache.url) == url:
        return _engine_cache

    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise RuntimeError(f"Cannot create cache directory {directory}: {exc}") from exc

    logger.debug("Creating SQLAlchemy engine for %s", url)
    if _engine_cache is not None:
        _engine_cache.dispose()
    _engine_cache = create_engine(url, echo=False)
    Base.metadata.create_all(_engine_cache)
    return _engine_cache


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def dimension_table(engine: ExtRegion) -> dict[tuple[int, int], int]:
    """{(stem, s): Σ_t dim H^{s,u}} over the engine's computed blocks."""
    table: dict[tuple[int, int], int] = {}
    for degree in engine.blocks:
        key = (degree.stem, degree.s)
        if key not in table:
            table[key] = total_dimension(engine, degree.s, degree.u)
    return table


def format_dimension_report(engine: ExtRegion) -> str:
    """Format the engine's blocks as a stem × s grid followed by the per-t listing.

    Args:
        engine: A computed ExtRegion.

    Returns:
        A deterministic multi-line string (blank cells are zero).
    """
    table = dimension_table(engine)
    region = engine.region
    max_stem = max((stem for stem, _ in table), default=0)
    lines = []
    lines.append("=" * 70)
    lines.append(f"Ext of {engine.context} over {region}")
    lines.append("=" * 70)

    lines.append("\nTOTAL DIMENSIONS (rows s, columns stem)")
    lines.append("-" * 40)
    lines.append("s\\stem " + " ".join(f"{stem:>3}" for stem in range(max_stem + 1)))
    for s in range(region.max_s, -1, -1):
        cells = []
        for stem in range(max_stem + 1):
            value = table.get((stem, s), 0)
            cells.append(f"{value:>3}" if value else "  .")
        lines.append(f"{s:>6} " + " ".join(cells))

    lines.append("\n" + "=" * 70)
    lines.append("NONZERO BLOCKS")
    lines.append("-" * 40)
    for degree in sorted(engine.blocks, key=lambda d: (d.u, d.s, d.t, d.w or 0)):
        block = engine.blocks[degree]
        if not block.dimension:
            continue
        names = ", ".join(name or "·" for name in block.names)
        lines.append(f"  {degree}: {block.dimension}  [{names}]")

    return "\n".join(lines) + "\n"


def write_artifact(path: Path, data: bytes) -> Path:
    """Write ``data`` under the output directory, creating parents."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    logger.info("Wrote %s (%d bytes)", path, len(data))
    return path
