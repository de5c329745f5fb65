"""Runtime configuration: defaults, DDELTA_CONFIG file, flag overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Tuple

from .errors import SchemaViolationError

ENV_VAR = "DDELTA_CONFIG"


@dataclass(frozen=True)
class Config:
    tol: float = 1e-9
    rect: Tuple[float, float, float, float] = (-1.0, 1.0, -20.0, 20.0)
    lambda_schedule: Tuple[float, ...] = (0.1, 0.05, 0.025, 0.0125)
    grid: int = 512
    format: str = "json"
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0:
            raise SchemaViolationError("tol must be positive", "tol")
        if self.grid < 16:
            raise SchemaViolationError("grid must be at least 16", "grid")
        if self.format not in ("json", "text", "csv"):
            raise SchemaViolationError("format must be json, text, or csv", "format")


def load_config(env: Optional[dict] = None) -> Config:
    """Defaults, overridden by the JSON file named in DDELTA_CONFIG."""
    env = os.environ if env is None else env
    path = env.get(ENV_VAR)
    cfg = Config()
    if not path:
        return cfg
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as err:
        raise SchemaViolationError(f"cannot read config file: {err}", ENV_VAR)
    except json.JSONDecodeError as err:
        raise SchemaViolationError(f"config file is not JSON: {err}", ENV_VAR)
    if not isinstance(data, dict):
        raise SchemaViolationError("config must be a JSON object", ENV_VAR)
    known = {f.name for f in fields(Config)}
    overrides = {}
    for key, value in data.items():
        if key not in known:
            raise SchemaViolationError(f"unknown config key '{key}'", ENV_VAR)
        if key in ("rect", "lambda_schedule"):
            value = tuple(value)
        overrides[key] = value
    return replace(cfg, **overrides)
