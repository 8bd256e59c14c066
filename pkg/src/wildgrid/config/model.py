"""Typed world-configuration model.

A WorldConfig is a complete, validated description of one world's mechanics:
terrain adjacency for map generation, walkability effects, creature specs,
drink effects, flammability, and the three rule tables (collect, place,
make).  Instances are plain dataclasses with value equality so parse and
serialize can round-trip them structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..items import (
    CREATURES,
    IGNITABLE_KEYS,
    ITEMS,
    LIQUIDS,
    MATERIALS,
    NEIGHBOUR_KEYS,
    PLACEABLE,
    TOOLS,
)


@dataclass(frozen=True)
class TerrainEffect:
    """What happens when the agent stands on a material."""

    walkable: bool = False
    walk_health: int = 0  # health delta applied on entering the cell
    dieable: bool = False  # entering kills outright

    def normalized(self) -> "TerrainEffect":
        # Non-walkable cells can never apply their walk effects.
        if not self.walkable and (self.walk_health != 0 or self.dieable):
            return TerrainEffect(False, 0, False)
        return self


@dataclass(frozen=True)
class NpcSpec:
    """Behaviour flags and stat deltas for one creature kind.

    The damage/effect fields only matter when their gate flag is set;
    normalization zeroes the inert ones so configs that differ only in
    unused numbers compare equal.
    """

    eatable: bool = False
    arrowable: bool = False
    closable: bool = False
    can_walk: bool = False
    attackable: bool = True
    defeatable: bool = True
    closable_health_damage_func: int = 0
    eat_health_damage_func: int = 0
    arrow_damage_func: int = 0
    inc_food_func: int = 0
    inc_thirst_func: int = 0

    def normalized(self) -> "NpcSpec":
        spec = self
        if not spec.eatable and (
            spec.eat_health_damage_func or spec.inc_food_func or spec.inc_thirst_func
        ):
            spec = replace(
                spec, eat_health_damage_func=0, inc_food_func=0, inc_thirst_func=0
            )
        if not spec.arrowable and spec.arrow_damage_func:
            spec = replace(spec, arrow_damage_func=0)
        if not spec.closable and spec.closable_health_damage_func:
            spec = replace(spec, closable_health_damage_func=0)
        return spec


@dataclass(frozen=True)
class DrinkSpec:
    """Stat deltas applied per successful drink from a liquid."""

    inc_drink_func: int = 0
    inc_health_func: int = 0
    inc_food_func: int = 0


@dataclass(frozen=True)
class Yield:
    """One collect outcome: gain `amount` with probability `probability`."""

    amount: int = 1
    probability: float = 1.0


@dataclass(frozen=True)
class Leaves:
    """What a collected cell turns into, and an optional creature spawn."""

    material: str
    objects: tuple[tuple[str, float], ...] = ()  # (creature, probability)


@dataclass(frozen=True)
class CollectRule:
    """Rule for `do` on a material: tool gate, yields, and the leftover cell."""

    target: str
    require: tuple[tuple[str, int], ...] = ()  # non-consumed tool check
    receive: tuple[tuple[str, Yield], ...] = ()
    leaves: Leaves | None = None  # None means the cell is unchanged

    def leaves_material(self) -> str:
        return self.leaves.material if self.leaves else self.target


@dataclass(frozen=True)
class PlaceRule:
    """Rule for a place action: consumed items, host materials, and whether
    the result is written into the material layer or the object layer."""

    name: str
    uses: tuple[tuple[str, int], ...] = ()
    where: tuple[str, ...] = ()
    kind: str = "material"  # serialized under the `type` key


@dataclass(frozen=True)
class MakeRule:
    """Rule for a craft action: consumed items and required nearby stations."""

    name: str
    uses: tuple[tuple[str, int], ...] = ()
    nearby: tuple[str, ...] = ()
    gives: int = 1


@dataclass(frozen=True)
class WorldConfig:
    terrain_neighbour: tuple[tuple[str, str], ...] = ()
    terrain_effect: tuple[tuple[str, TerrainEffect], ...] = ()
    npc: tuple[tuple[str, NpcSpec], ...] = ()
    drink: tuple[tuple[str, DrinkSpec], ...] = ()
    ignitability: tuple[tuple[str, bool], ...] = ()
    collect: tuple[CollectRule, ...] = ()
    place: tuple[PlaceRule, ...] = ()
    make: tuple[MakeRule, ...] = ()

    # --- mapping-style accessors (sections keep insertion order) ---
    def neighbour(self, key: str) -> str:
        return dict(self.terrain_neighbour)[key]

    def effect(self, material: str) -> TerrainEffect:
        return dict(self.terrain_effect)[material]

    def npc_spec(self, kind: str) -> NpcSpec:
        return dict(self.npc)[kind]

    def drink_spec(self, liquid: str) -> DrinkSpec | None:
        return dict(self.drink).get(liquid)

    def ignitable(self, item: str) -> bool:
        return dict(self.ignitability).get(item, False)

    def collect_rule(self, material: str) -> CollectRule | None:
        for rule in self.collect:
            if rule.target == material:
                return rule
        return None

    def place_rule(self, name: str) -> PlaceRule | None:
        for rule in self.place:
            if rule.name == name:
                return rule
        return None

    def make_rule(self, name: str) -> MakeRule | None:
        for rule in self.make:
            if rule.name == name:
                return rule
        return None

    def spawn_material(self) -> str:
        return self.neighbour("player")


class ConfigError(ValueError):
    """Raised on malformed config documents; carries the failing key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


SECTION_NAMES = (
    "terrain_neighbour",
    "terrain_effect",
    "npc",
    "drink",
    "ignitability",
    "collect",
    "place",
    "make",
)

# Alternate spellings accepted on input and folded onto the canonical names.
SECTION_ALIASES = {
    "walkable_effect": "terrain_effect",
    "npc_objects": "npc",
}

NPC_FIELD_ALIASES = {
    "inc_damage_func": "inc_health_func",
}


def _check_member(path: str, value: str, allowed: tuple[str, ...], what: str) -> None:
    if value not in allowed:
        raise ConfigError(path, f"unknown {what} {value!r}")


def validate_config(cfg: WorldConfig) -> None:
    """Raise ConfigError when cross-section constraints do not hold."""
    neighbour = dict(cfg.terrain_neighbour)
    for key in NEIGHBOUR_KEYS:
        if key not in neighbour:
            raise ConfigError("terrain_neighbour", f"missing key {key!r}")
    for key, host in cfg.terrain_neighbour:
        _check_member("terrain_neighbour", key, NEIGHBOUR_KEYS, "key")
        _check_member(f"terrain_neighbour.{key}", host, MATERIALS, "material")
    effects = dict(cfg.terrain_effect)
    for material in MATERIALS:
        if material not in effects:
            raise ConfigError("terrain_effect", f"missing material {material!r}")
    for material, eff in cfg.terrain_effect:
        _check_member("terrain_effect", material, MATERIALS, "material")
        if eff.walk_health not in (-1, 0, 1):
            raise ConfigError(
                f"terrain_effect.{material}.walk_health",
                f"must be -1, 0 or 1, got {eff.walk_health}",
            )
    npcs = dict(cfg.npc)
    for kind in CREATURES:
        if kind not in npcs:
            raise ConfigError("npc", f"missing creature {kind!r}")
    for kind, _spec in cfg.npc:
        _check_member("npc", kind, CREATURES, "creature")
    for liquid, _spec in cfg.drink:
        _check_member("drink", liquid, LIQUIDS, "liquid")
    for item, _flag in cfg.ignitability:
        _check_member("ignitability", item, IGNITABLE_KEYS, "ignitable material")
    seen_targets = set()
    for rule in cfg.collect:
        _check_member("collect", rule.target, MATERIALS, "material")
        if rule.target in seen_targets:
            raise ConfigError("collect", f"duplicate rule for {rule.target!r}")
        seen_targets.add(rule.target)
        for item, count in rule.require:
            _check_member(f"collect.{rule.target}.require", item, ITEMS, "item")
            if count < 1:
                raise ConfigError(
                    f"collect.{rule.target}.require.{item}",
                    f"count must be positive, got {count}",
                )
        for item, y in rule.receive:
            _check_member(f"collect.{rule.target}.receive", item, ITEMS, "item")
            if y.amount < 0:
                raise ConfigError(
                    f"collect.{rule.target}.receive.{item}",
                    f"amount must be non-negative, got {y.amount}",
                )
            if not 0.0 <= y.probability <= 1.0:
                raise ConfigError(
                    f"collect.{rule.target}.receive.{item}",
                    f"probability must be in [0, 1], got {y.probability}",
                )
        if rule.leaves is not None:
            _check_member(
                f"collect.{rule.target}.leaves.material",
                rule.leaves.material,
                MATERIALS,
                "material",
            )
            for kind, prob in rule.leaves.objects:
                _check_member(
                    f"collect.{rule.target}.leaves.object", kind, CREATURES, "creature"
                )
                if not 0.0 <= prob <= 1.0:
                    raise ConfigError(
                        f"collect.{rule.target}.leaves.object.{kind}",
                        f"probability must be in [0, 1], got {prob}",
                    )
    for rule in cfg.place:
        _check_member("place", rule.name, PLACEABLE, "placeable")
        if rule.kind not in ("material", "object"):
            raise ConfigError(
                f"place.{rule.name}.type", f"must be material or object, got {rule.kind!r}"
            )
        for item, count in rule.uses:
            _check_member(f"place.{rule.name}.uses", item, ITEMS, "item")
            if count < 1:
                raise ConfigError(
                    f"place.{rule.name}.uses.{item}",
                    f"count must be positive, got {count}",
                )
        for material in rule.where:
            _check_member(f"place.{rule.name}.where", material, MATERIALS, "material")
    for rule in cfg.make:
        _check_member("make", rule.name, TOOLS, "tool")
        for item, count in rule.uses:
            _check_member(f"make.{rule.name}.uses", item, ITEMS, "item")
            if count < 1:
                raise ConfigError(
                    f"make.{rule.name}.uses.{item}",
                    f"count must be positive, got {count}",
                )
        for station in rule.nearby:
            _check_member(f"make.{rule.name}.nearby", station, ("table", "furnace"), "station")
        if rule.gives < 1:
            raise ConfigError(
                f"make.{rule.name}.gives", f"must be positive, got {rule.gives}"
            )


def normalize_config(cfg: WorldConfig) -> WorldConfig:
    """Zero out fields that cannot take effect so equality is semantic."""
    return replace(
        cfg,
        terrain_effect=tuple(
            (m, eff.normalized()) for m, eff in cfg.terrain_effect
        ),
        npc=tuple((kind, spec.normalized()) for kind, spec in cfg.npc),
    )
