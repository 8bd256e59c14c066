"""World-rule data model, document parser/serializer, fixtures, and diffs."""

from .diff import RuleDelta, diff_configs
from .loader import parse_config, parse_fragment, parse_overlay, serialize_config
from .model import (
    CollectRule,
    ConfigError,
    DrinkSpec,
    Leaves,
    MakeRule,
    NpcSpec,
    PlaceRule,
    TerrainEffect,
    WorldConfig,
    Yield,
    normalize_config,
    validate_config,
)
from .worlds import builtin_world, fixture_text, world_names

__all__ = [
    "CollectRule",
    "ConfigError",
    "DrinkSpec",
    "Leaves",
    "MakeRule",
    "NpcSpec",
    "PlaceRule",
    "RuleDelta",
    "TerrainEffect",
    "WorldConfig",
    "Yield",
    "builtin_world",
    "diff_configs",
    "fixture_text",
    "normalize_config",
    "parse_config",
    "parse_fragment",
    "parse_overlay",
    "serialize_config",
    "validate_config",
    "world_names",
]
