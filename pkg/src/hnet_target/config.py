from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, field_validator


DEFAULT_OUTPUT_DIR = "runs"
DEFAULT_ORACLE_SUBSTEPS = 1000

_LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


class HNetSettings(BaseModel):
    """
    Process-wide settings for experiment runs.

    Typical usage:

        HNetSettings(output_dir="runs/pendulum", oracle_substeps=1000)

    You can also load from environment via `from_env()`.
    """

    output_dir: Path = Field(
        default=Path(DEFAULT_OUTPUT_DIR),
        description="Default directory experiment artifacts are written to.",
    )
    oracle_substeps: int = Field(
        default=DEFAULT_ORACLE_SUBSTEPS,
        ge=1,
        description="RK4 substeps per data step used by the reference-flow oracle.",
    )
    log_level: str = Field(
        default="INFO",
        description="Logging level name used by the command-line front end.",
    )
    torch_threads: Optional[int] = Field(
        default=None,
        ge=1,
        description="Pin torch intra-op threads (bit-reproducible reductions).",
    )

    @field_validator("log_level")
    @classmethod
    def _check_log_level(cls, value: str) -> str:
        value = value.upper()
        if value not in _LOG_LEVELS:
            raise ValueError(f"log_level must be one of {_LOG_LEVELS}, got {value!r}")
        return value

    @property
    def logging_level(self) -> int:
        return getattr(logging, self.log_level)

    @classmethod
    def from_env(cls, **overrides: object) -> "HNetSettings":
        """
        Build settings from environment variables:

        - HNET_OUTPUT_DIR (optional, default ./runs)
        - HNET_ORACLE_SUBSTEPS (optional, default 1000)
        - HNET_LOG_LEVEL (optional, default INFO)
        - HNET_TORCH_THREADS (optional)

        Explicit keyword arguments override env values.
        """
        output_dir = _pick(overrides, "output_dir", "HNET_OUTPUT_DIR", DEFAULT_OUTPUT_DIR)
        substeps = _pick(
            overrides,
            "oracle_substeps",
            "HNET_ORACLE_SUBSTEPS",
            str(DEFAULT_ORACLE_SUBSTEPS),
        )
        log_level = _pick(overrides, "log_level", "HNET_LOG_LEVEL", "INFO")
        threads = _pick(overrides, "torch_threads", "HNET_TORCH_THREADS", None)

        return cls(
            output_dir=output_dir,
            oracle_substeps=int(substeps),
            log_level=log_level,
            torch_threads=int(threads) if threads not in (None, "") else None,
        )


def _pick(overrides: dict, key: str, env_var: str, default: Optional[str]) -> object:
    """An explicit override (including falsy values like 0) wins over the environment."""
    value = overrides.get(key)
    if value is not None:
        return value
    return os.getenv(env_var, default)

