"""Built-in world fixtures.

`default` ships as a complete document; the seven modified worlds ship as
partial documents overriding only the sections they change, applied on top
of the default at load time.
"""

from __future__ import annotations

from importlib import resources

from ..items import WORLD_NAMES
from .loader import parse_config, parse_overlay
from .model import WorldConfig

_cache: dict[str, WorldConfig] = {}


def world_names() -> tuple[str, ...]:
    return WORLD_NAMES


def fixture_text(name: str) -> str:
    """Raw document text for a built-in world (the default full document
    or the per-world override fragment)."""
    if name == "default":
        ref = resources.files("wildgrid.config") / "worlds" / "default.yaml"
    else:
        ref = resources.files("wildgrid.config") / "patches" / f"{name}.yaml"
    return ref.read_text(encoding="utf-8")


def builtin_world(name: str) -> WorldConfig:
    if name not in WORLD_NAMES:
        raise KeyError(f"unknown world {name!r}; known: {', '.join(WORLD_NAMES)}")
    if name not in _cache:
        default = _cache.get("default")
        if default is None:
            default = parse_config(fixture_text("default"))
            _cache["default"] = default
        if name == "default":
            return default
        _cache[name] = parse_overlay(fixture_text(name), default)
    return _cache[name]
