"""Deployment configuration.

Loaded from a JSON file of nested sections; every key has a default so a
partial (or missing) file works. See README for the full key list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .images import DegradeParams
from .scheme import ChallengeConfig, GridSpec


@dataclass(frozen=True)
class AppConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    password_length: int = 5
    images_dir: str | None = None
    image_width: int = 96
    image_height: int = 96
    degrade: DegradeParams = field(default_factory=DegradeParams)
    ttl_seconds: float = 120.0
    max_length_override: int | None = None
    debug_reasons: bool = False
    listen_addr: str = "127.0.0.1:8000"
    storage_dir: str = "var"
    static_dir: str | None = None

    @property
    def challenge_config(self) -> ChallengeConfig:
        return ChallengeConfig(
            ttl_seconds=self.ttl_seconds,
            max_len_override=self.max_length_override,
            degrade=self.degrade,
        )

    @property
    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen_addr.rpartition(":")
        return host or "127.0.0.1", int(port)


def _section(raw: dict[str, Any], name: str) -> dict[str, Any]:
    value = raw.get(name, {})
    if not isinstance(value, dict):
        raise ValueError(f"config section {name!r} must be an object")
    return value


def config_from_dict(raw: dict[str, Any]) -> AppConfig:
    grid = _section(raw, "grid")
    password = _section(raw, "password")
    images = _section(raw, "images")
    degrade = _section(raw, "degrade")
    challenge = _section(raw, "challenge")
    trace = _section(raw, "trace")
    service = _section(raw, "service")
    storage = _section(raw, "storage")
    defaults = AppConfig()
    return AppConfig(
        grid=GridSpec(
            cols=int(grid.get("cols", defaults.grid.cols)),
            rows=int(grid.get("rows", defaults.grid.rows)),
        ),
        password_length=int(password.get("length", defaults.password_length)),
        images_dir=images.get("dir", defaults.images_dir),
        image_width=int(images.get("width", defaults.image_width)),
        image_height=int(images.get("height", defaults.image_height)),
        degrade=DegradeParams(
            alpha=float(degrade.get("alpha", defaults.degrade.alpha)),
            beta=float(degrade.get("beta", defaults.degrade.beta)),
        ),
        ttl_seconds=float(challenge.get("ttl_seconds", defaults.ttl_seconds)),
        max_length_override=trace.get("max_length_override", defaults.max_length_override),
        debug_reasons=bool(service.get("debug_reasons", defaults.debug_reasons)),
        listen_addr=str(service.get("listen_addr", defaults.listen_addr)),
        storage_dir=str(storage.get("dir", defaults.storage_dir)),
        static_dir=service.get("static_dir", defaults.static_dir),
    )


def load_config(path: str | Path) -> AppConfig:
    with Path(path).open() as fh:
        return config_from_dict(json.load(fh))
