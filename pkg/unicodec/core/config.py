"""Configurations for unicodec, including runtime settings read from the environment."""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

WORKERS_ENV = "UNICODEC_WORKERS"
LOG_LEVEL_ENV = "UNICODEC_LOG_LEVEL"
OUTPUT_DIR_ENV = "UNICODEC_OUTPUT_DIR"


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


class Config(BaseModel):
    # System configure
    debug: bool = False
    log_level: str = "INFO"
    progress: bool = True

    # Simulation configure
    workers: int = Field(default=1, ge=1)
    output_dir: str = "results"

    # Numerics
    llr_saturation: float = 1e30
    bp_message_clip: float = 30.0

    @classmethod
    def from_env(cls, dotenv_path: Optional[str] = None, **overrides) -> "Config":
        """Build a Config from `.env` / process environment; explicit overrides win."""
        load_dotenv(dotenv_path)
        values = {
            "workers": _env_int(WORKERS_ENV, 1),
            "log_level": os.getenv(LOG_LEVEL_ENV, "INFO"),
            "output_dir": os.getenv(OUTPUT_DIR_ENV, "results"),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
