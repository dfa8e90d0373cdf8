"""Service settings from an optional JSON file with environment overrides.

Precedence is environment variable, then config file, then built-in default.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

from .headline import (
    DEFAULT_BODY_CAP,
    DEFAULT_REDIRECT_CAP,
    DEFAULT_TIMEOUT,
    DEFAULT_USER_AGENT,
    FetchLimits,
)
from .similarity import DEFAULT_THRESHOLD

DEFAULT_PORT = 8080
DEFAULT_DATA_DIR = "data"
DEFAULT_HEADLINE_THRESHOLD = 0.5

# Environment variable -> settings field.
ENV_VARS = {
    "PORT": "port",
    "DATA_DIR": "data_dir",
    "MODEL_PATH": "model_path",
    "CORPUS_PATH": "corpus_path",
    "SCORER_URL": "scorer_url",
    "SIMILARITY_THRESHOLD": "similarity_threshold",
    "HEADLINE_CHECKWORTHY_THRESHOLD": "headline_checkworthy_threshold",
}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Settings:
    port: int = DEFAULT_PORT
    data_dir: str = DEFAULT_DATA_DIR
    model_path: str | None = None
    corpus_path: str | None = None
    scorer_url: str | None = None
    similarity_threshold: int = DEFAULT_THRESHOLD
    headline_checkworthy_threshold: float = DEFAULT_HEADLINE_THRESHOLD
    fetch_timeout: float = DEFAULT_TIMEOUT
    fetch_body_cap: int = DEFAULT_BODY_CAP
    fetch_redirect_cap: int = DEFAULT_REDIRECT_CAP
    user_agent: str = DEFAULT_USER_AGENT

    def __post_init__(self):
        if not (1 <= self.port <= 65535):
            raise ConfigError(f"port must be in 1..65535, got {self.port}")
        if not (0 <= self.similarity_threshold <= 100):
            raise ConfigError(
                f"similarity_threshold must be in 0..100, got {self.similarity_threshold}"
            )
        if not (0.0 <= self.headline_checkworthy_threshold <= 1.0):
            raise ConfigError(
                "headline_checkworthy_threshold must be in [0, 1], "
                f"got {self.headline_checkworthy_threshold}"
            )

    @property
    def fetch_limits(self) -> FetchLimits:
        return FetchLimits(
            timeout=self.fetch_timeout,
            body_cap=self.fetch_body_cap,
            redirect_cap=self.fetch_redirect_cap,
            user_agent=self.user_agent,
        )


_INT_FIELDS = {"port", "similarity_threshold", "fetch_body_cap", "fetch_redirect_cap"}
_FLOAT_FIELDS = {"headline_checkworthy_threshold", "fetch_timeout"}


def _convert(field_name: str, raw, source: str):
    try:
        if field_name in _INT_FIELDS:
            if isinstance(raw, bool):
                raise ValueError("boolean is not an integer")
            return int(raw)
        if field_name in _FLOAT_FIELDS:
            return float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {field_name} must be numeric, got {raw!r}") from exc
    if raw is not None and not isinstance(raw, str):
        raise ConfigError(f"{source}: {field_name} must be a string, got {raw!r}")
    return raw


def load_settings(
    config_file: str | Path | None = None,
    env: Mapping[str, str] | None = None,
) -> Settings:
    """Build Settings from defaults, then the config file, then env vars."""
    env = os.environ if env is None else env
    known = {f.name for f in fields(Settings)}
    values: dict = {}

    if config_file is not None:
        path = Path(config_file)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        for key, raw in data.items():
            if key not in known:
                raise ConfigError(f"config file {path}: unknown setting {key!r}")
            values[key] = _convert(key, raw, f"config file {path}")

    for var, field_name in ENV_VARS.items():
        raw = env.get(var)
        if raw is not None and raw != "":
            values[field_name] = _convert(field_name, raw, f"environment {var}")

    return Settings(**values)
