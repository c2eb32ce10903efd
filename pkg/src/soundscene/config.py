"""Service configuration: JSON file plus environment overrides.

Precedence, lowest to highest: defaults, config file, SOUNDSCENE_* env
vars, explicit CLI flags.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

ENV_PREFIX = "SOUNDSCENE_"


@dataclass
class ServiceConfig:
    addr: str = "127.0.0.1:8080"
    store: str = "./store"
    backend: str = "mock"  # mock | http
    describe_url: Optional[str] = None
    generate_url: Optional[str] = None
    auth_token: Optional[str] = None


def load_config(path: Optional[Path | str] = None) -> ServiceConfig:
    config = ServiceConfig()
    if path is not None:
        data = json.loads(Path(path).read_text())
        for key, value in data.items():
            if not hasattr(config, key):
                raise ValueError(f"unknown config key {key!r}")
            setattr(config, key, value)
    for key in ("addr", "store", "backend", "describe_url", "generate_url", "auth_token"):
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            setattr(config, key, env)
    return config
