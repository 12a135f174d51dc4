"""Configuration from ``slidecast.toml`` (or JSON), overridden by environment variables."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ValidationError
from .render import RenderPreset
from .tools import Toolchain

CONFIG_NAMES = ("slidecast.toml", "slidecast.json")
ENV_PREFIX = "SLIDECAST_"


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "slidecast"


@dataclass
class Config:
    ffmpeg_path: str | None = None
    probe_path: str | None = None
    soffice_path: str | None = None
    pdftoppm_path: str | None = None
    polly_endpoint: str | None = None
    polly_region: str | None = None
    credentials_file: str | None = None
    gslides_base_url: str = "https://docs.google.com"
    cache_dir: str | None = None
    renderer: str | None = None
    engine: str | None = None
    voice: str | None = None
    preset: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def toolchain(self) -> Toolchain:
        return Toolchain(self.ffmpeg_path, self.probe_path, self.soffice_path, self.pdftoppm_path)

    def render_preset(self, **overrides) -> RenderPreset:
        values = {**self.preset, **{k: v for k, v in overrides.items() if v is not None}}
        known = {f.name for f in fields(RenderPreset)}
        unknown = set(values) - known
        if unknown:
            raise ValidationError(f"unknown preset keys: {', '.join(sorted(unknown))}")
        if "bitrate" in values and "quality" not in values:
            values["quality"] = None
        return RenderPreset(**values)

    def resolved_cache_dir(self) -> Path:
        return Path(self.cache_dir).expanduser() if self.cache_dir else default_cache_dir()

    def engine_settings(self) -> dict:
        return {"endpoint": self.polly_endpoint, "region": self.polly_region,
                "credentials_file": self.credentials_file, "tools": self.toolchain()}


def _read(path: Path) -> dict:
    try:
        if path.suffix == ".json":
            return json.loads(path.read_text(encoding="utf-8"))
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except (OSError, ValueError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc


def load_config(path=None, env: Mapping[str, str] | None = None, cwd=None) -> Config:
    """File values first, then ``SLIDECAST_<KEY>`` environment overrides."""
    env = os.environ if env is None else env
    if path is None:
        path = env.get(ENV_PREFIX + "CONFIG")
    if path is None:
        here = Path(cwd or Path.cwd())
        path = next((here / n for n in CONFIG_NAMES if (here / n).is_file()), None)
    data = _read(Path(path)) if path else {}

    known = {f.name for f in fields(Config)}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for name in known - {"preset", "options"}:
        value = env.get(ENV_PREFIX + name.upper())
        if value:
            data[name] = value
    return Config(**data)
