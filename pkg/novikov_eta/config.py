"""Run configuration for novikov-eta.

Settings are layered: ``DEFAULT_SETTINGS`` < key=value config file < CLI flags,
with the ``NOVIKOV_ETA_CACHE_DIR`` environment variable overriding the cache root.
"""

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, ValidationError, field_validator

logger = logging.getLogger(__name__)

CACHE_DIR_ENV = "NOVIKOV_ETA_CACHE_DIR"

CONTEXT_CHOICES = ("sphere", "mod2", "motivic")

DEFAULT_SETTINGS = {
    "max_u": 24,
    "max_s": 8,
    "max_t": 8,
    "block_budget": 2**24,
    "cache_dir": ".novikov_eta_cache",
    "contexts": ["sphere", "mod2", "motivic"],
    "output_dir": "out",
    "workers": 1,
    "multiplicity_threshold": 1,
    "stability_depth": 2,
    "use_cache": True,
}

# Fields that change mathematical output; everything else is presentation.
_HASHED_FIELDS = ("max_u", "max_s", "max_t")


class RunConfig(BaseModel):
    """Validated bounds and paths for one run."""

    max_u: int = Field(DEFAULT_SETTINGS["max_u"], ge=0)
    max_s: int = Field(DEFAULT_SETTINGS["max_s"], ge=0)
    max_t: int = Field(DEFAULT_SETTINGS["max_t"], ge=0)
    block_budget: int = Field(DEFAULT_SETTINGS["block_budget"], gt=0)
    cache_dir: Path = Path(DEFAULT_SETTINGS["cache_dir"])
    contexts: list[str] = Field(default_factory=lambda: list(DEFAULT_SETTINGS["contexts"]))
    output_dir: Path = Path(DEFAULT_SETTINGS["output_dir"])
    workers: int = Field(DEFAULT_SETTINGS["workers"], ge=1)
    multiplicity_threshold: int = Field(DEFAULT_SETTINGS["multiplicity_threshold"], ge=1)
    stability_depth: int = Field(DEFAULT_SETTINGS["stability_depth"], ge=1)
    use_cache: bool = DEFAULT_SETTINGS["use_cache"]

    @field_validator("contexts")
    @classmethod
    def _known_contexts(cls, value: list[str]) -> list[str]:
        unknown = sorted(set(value) - set(CONTEXT_CHOICES))
        if unknown:
            raise ValueError(f"unknown contexts {unknown}; expected a subset of {list(CONTEXT_CHOICES)}")
        return value

    def config_hash(self) -> bytes:
        """SHA-256 over the mathematically relevant fields."""
        payload = json.dumps({name: getattr(self, name) for name in _HASHED_FIELDS}, sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).digest()


def parse_config_file(path: Path) -> dict:
    """Read a plain-text ``key=value`` file; blank lines and ``#`` comments are ignored."""
    settings: dict = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "contexts":
            settings[key] = [item.strip() for item in value.split(",") if item.strip()]
        else:
            settings[key] = value
    return settings


def load_config(path: Optional[Path] = None, **overrides) -> RunConfig:
    """Build a RunConfig from defaults, an optional config file and explicit overrides.

    Raises:
        ValueError: If a setting fails validation.
    """
    settings = dict(DEFAULT_SETTINGS)
    if path is not None:
        settings.update(parse_config_file(path))
    settings.update({key: value for key, value in overrides.items() if value is not None})
    env_cache = os.environ.get(CACHE_DIR_ENV)
    if env_cache:
        logger.debug("Cache directory overridden by %s=%s", CACHE_DIR_ENV, env_cache)
        settings["cache_dir"] = env_cache
    try:
        return RunConfig(**settings)
    except ValidationError as exc:
        raise ValueError(f"Invalid run configuration: {exc}") from exc


_active_config: Optional[RunConfig] = None


def get_config() -> RunConfig:
    """Return the process-wide configuration, creating the default one on first use."""
    global _active_config
    if _active_config is None:
        _active_config = RunConfig()
    return _active_config


def set_config(config: Optional[RunConfig]) -> None:
    """Install ``config`` as the process-wide configuration (``None`` resets to defaults)."""
    global _active_config
    _active_config = config
