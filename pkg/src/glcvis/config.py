"""Service and CLI configuration with flag > env > file > default precedence."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

ENV_PREFIX = "GLCVIS_"


@dataclass(frozen=True)
class Config:
    host: str = "127.0.0.1"
    port: int = 8000
    sessions_dir: str = "./glcvis-sessions"
    row_cap: int = 1_000_000
    default_seed: int = 0
    cors_origins: tuple[str, ...] = ("*",)


def load_config(
    path: str | Path | None = None, overrides: dict | None = None
) -> Config:
    """Resolve each field as: explicit override > env var > file > default."""
    file_values: dict = {}
    if path is not None:
        file_values = json.loads(Path(path).read_text())
    values: dict = {}
    for f in fields(Config):
        default = getattr(Config, f.name)
        value = file_values.get(f.name, default)
        env = os.environ.get(ENV_PREFIX + f.name.upper())
        if env is not None:
            value = env
        if overrides and overrides.get(f.name) is not None:
            value = overrides[f.name]
        if f.name in ("port", "row_cap", "default_seed"):
            value = int(value)
        elif f.name == "cors_origins" and not isinstance(value, tuple):
            if isinstance(value, str):
                value = tuple(v.strip() for v in value.split(",") if v.strip())
            else:
                value = tuple(value)
        values[f.name] = value
    return Config(**values)
