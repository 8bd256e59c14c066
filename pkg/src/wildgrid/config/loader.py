"""Parser and serializer for the indentation-based world-rule documents.

The on-disk format is YAML restricted to the layout used by the shipped
world files: eight top-level sections, flow-style rule maps, and a couple
of legacy spellings that are folded onto canonical names on input
(`walkable_effect`, `npc_objects`, `inc_damage_func`, a literal `None`
for an absent leaves object).  Serialization always emits the canonical
spellings, so parse(serialize(cfg)) == cfg structurally.
"""

from __future__ import annotations

import yaml

from ..items import IGNITABLE_KEYS, LIQUIDS, MATERIALS, NEIGHBOUR_KEYS, TOOLS
from .model import (
    CollectRule,
    ConfigError,
    DrinkSpec,
    Leaves,
    MakeRule,
    NpcSpec,
    PlaceRule,
    SECTION_ALIASES,
    SECTION_NAMES,
    TerrainEffect,
    WorldConfig,
    Yield,
    normalize_config,
    validate_config,
)

NPC_FIELDS = (
    "eatable",
    "arrowable",
    "closable",
    "can_walk",
    "attackable",
    "defeatable",
    "closable_health_damage_func",
    "eat_health_damage_func",
    "arrow_damage_func",
    "inc_food_func",
    "inc_thirst_func",
)

DRINK_FIELDS = ("inc_drink_func", "inc_health_func", "inc_food_func")
DRINK_FIELD_ALIASES = {"inc_damage_func": "inc_health_func"}

EFFECT_FIELDS = ("walkable", "walk_health", "dieable")


def _require_map(value, path: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(path, f"expected a mapping, got {type(value).__name__}")
    return value


def _require_bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(path, f"expected a boolean, got {value!r}")
    return value


def _require_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    return value


def _require_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def _is_absent(value) -> bool:
    # The world files spell an absent mapping as null, `None`, or {}.
    return value is None or value == {} or value == "None"


def _parse_effect(raw, path: str) -> TerrainEffect:
    raw = _require_map(raw, path)
    for key in raw:
        if key not in EFFECT_FIELDS:
            raise ConfigError(path, f"unknown key {key!r}")
    return TerrainEffect(
        walkable=_require_bool(raw.get("walkable", False), f"{path}.walkable"),
        walk_health=_require_int(raw.get("walk_health", 0), f"{path}.walk_health"),
        dieable=_require_bool(raw.get("dieable", False), f"{path}.dieable"),
    )


def _parse_npc(raw, path: str) -> NpcSpec:
    raw = _require_map(raw, path)
    fields = {}
    for key, value in raw.items():
        if key not in NPC_FIELDS:
            raise ConfigError(path, f"unknown key {key!r}")
        if key in ("closable_health_damage_func", "eat_health_damage_func",
                   "arrow_damage_func", "inc_food_func", "inc_thirst_func"):
            fields[key] = _require_int(value, f"{path}.{key}")
        else:
            fields[key] = _require_bool(value, f"{path}.{key}")
    return NpcSpec(**fields)


def _parse_drink(raw, path: str) -> DrinkSpec:
    raw = _require_map(raw, path)
    fields = {}
    for key, value in raw.items():
        key = DRINK_FIELD_ALIASES.get(key, key)
        if key not in DRINK_FIELDS:
            raise ConfigError(path, f"unknown key {key!r}")
        fields[key] = _require_int(value, f"{path}.{key}")
    return DrinkSpec(**fields)


def _parse_counts(raw, path: str) -> tuple[tuple[str, int], ...]:
    raw = _require_map(raw, path)
    return tuple((str(k), _require_int(v, f"{path}.{k}")) for k, v in raw.items())


def _parse_yield(raw, path: str) -> Yield:
    if isinstance(raw, bool):
        raise ConfigError(path, f"expected a count or amount map, got {raw!r}")
    if isinstance(raw, int):
        return Yield(amount=raw, probability=1.0)
    raw = _require_map(raw, path)
    for key in raw:
        if key not in ("amount", "probability"):
            raise ConfigError(path, f"unknown key {key!r}")
    return Yield(
        amount=_require_int(raw.get("amount", 1), f"{path}.amount"),
        probability=_require_number(raw.get("probability", 1.0), f"{path}.probability"),
    )


def _parse_leaves(raw, target: str, path: str) -> Leaves:
    if _is_absent(raw):
        return Leaves(material=target)
    raw = _require_map(raw, path)
    for key in raw:
        if key not in ("material", "object"):
            raise ConfigError(path, f"unknown key {key!r}")
    material = raw.get("material", target)
    if not isinstance(material, str):
        raise ConfigError(f"{path}.material", f"expected a material name, got {material!r}")
    objects = raw.get("object")
    if _is_absent(objects):
        spawn: tuple[tuple[str, float], ...] = ()
    else:
        objects = _require_map(objects, f"{path}.object")
        spawn = tuple(
            (str(kind), _require_number(p, f"{path}.object.{kind}"))
            for kind, p in objects.items()
        )
    return Leaves(material=material, objects=spawn)


def _parse_collect(raw, path: str) -> tuple[CollectRule, ...]:
    raw = _require_map(raw, path)
    rules = []
    for target, body in raw.items():
        rule_path = f"{path}.{target}"
        body = _require_map(body, rule_path)
        for key in body:
            if key not in ("require", "receive", "leaves"):
                raise ConfigError(rule_path, f"unknown key {key!r}")
        receive_raw = _require_map(body.get("receive"), f"{rule_path}.receive")
        receive = tuple(
            (str(item), _parse_yield(y, f"{rule_path}.receive.{item}"))
            for item, y in receive_raw.items()
        )
        rules.append(
            CollectRule(
                target=str(target),
                require=_parse_counts(body.get("require"), f"{rule_path}.require"),
                receive=receive,
                leaves=_parse_leaves(body.get("leaves"), str(target), f"{rule_path}.leaves"),
            )
        )
    return tuple(rules)


def _parse_place(raw, path: str) -> tuple[PlaceRule, ...]:
    raw = _require_map(raw, path)
    rules = []
    for name, body in raw.items():
        rule_path = f"{path}.{name}"
        body = _require_map(body, rule_path)
        for key in body:
            if key not in ("uses", "where", "type"):
                raise ConfigError(rule_path, f"unknown key {key!r}")
        where = body.get("where", [])
        if not isinstance(where, list):
            raise ConfigError(f"{rule_path}.where", "expected a list of materials")
        rules.append(
            PlaceRule(
                name=str(name),
                uses=_parse_counts(body.get("uses"), f"{rule_path}.uses"),
                where=tuple(str(m) for m in where),
                kind=str(body.get("type", "material")),
            )
        )
    return tuple(rules)


def _parse_make(raw, path: str) -> tuple[MakeRule, ...]:
    raw = _require_map(raw, path)
    rules = []
    for name, body in raw.items():
        rule_path = f"{path}.{name}"
        body = _require_map(body, rule_path)
        for key in body:
            if key not in ("uses", "nearby", "gives"):
                raise ConfigError(rule_path, f"unknown key {key!r}")
        nearby = body.get("nearby", [])
        if not isinstance(nearby, list):
            raise ConfigError(f"{rule_path}.nearby", "expected a list of stations")
        rules.append(
            MakeRule(
                name=str(name),
                uses=_parse_counts(body.get("uses"), f"{rule_path}.uses"),
                nearby=tuple(str(s) for s in nearby),
                gives=_require_int(body.get("gives", 1), f"{rule_path}.gives"),
            )
        )
    return tuple(rules)


def parse_fragment(text: str) -> dict:
    """Parse a document that may cover only a subset of the eight sections.

    Returns a dict keyed by canonical section name; values are already in
    model form (tuples of rules / (key, spec) pairs).
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("", f"malformed document: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("", "top level must be a mapping of sections")
    sections = {}
    for key, body in raw.items():
        name = SECTION_ALIASES.get(key, key)
        if name not in SECTION_NAMES:
            raise ConfigError("", f"unknown section {key!r}")
        if name in sections:
            raise ConfigError("", f"duplicate section {key!r}")
        if name == "terrain_neighbour":
            body = _require_map(body, name)
            sections[name] = tuple((str(k), str(v)) for k, v in body.items())
        elif name == "terrain_effect":
            body = _require_map(body, name)
            sections[name] = tuple(
                (str(m), _parse_effect(e, f"{name}.{m}")) for m, e in body.items()
            )
        elif name == "npc":
            body = _require_map(body, name)
            sections[name] = tuple(
                (str(k), _parse_npc(s, f"{name}.{k}")) for k, s in body.items()
            )
        elif name == "drink":
            body = _require_map(body, name)
            sections[name] = tuple(
                (str(k), _parse_drink(s, f"{name}.{k}")) for k, s in body.items()
            )
        elif name == "ignitability":
            body = _require_map(body, name)
            sections[name] = tuple(
                (str(k), _require_bool(v, f"{name}.{k}")) for k, v in body.items()
            )
        elif name == "collect":
            sections[name] = _parse_collect(body, name)
        elif name == "place":
            sections[name] = _parse_place(body, name)
        elif name == "make":
            sections[name] = _parse_make(body, name)
    return sections


def parse_config(text: str) -> WorldConfig:
    """Parse a complete world document; every section must be present."""
    sections = parse_fragment(text)
    for name in SECTION_NAMES:
        if name not in sections:
            raise ConfigError("", f"missing section {name}")
    cfg = normalize_config(WorldConfig(**sections))
    validate_config(cfg)
    return cfg


def parse_overlay(text: str, base: WorldConfig) -> WorldConfig:
    """Parse a partial document; sections it omits are taken from `base`."""
    sections = parse_fragment(text)
    merged = {
        name: sections.get(name, getattr(base, name)) for name in SECTION_NAMES
    }
    cfg = normalize_config(WorldConfig(**merged))
    validate_config(cfg)
    return cfg


# --- serialization ---

def _fmt_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _fmt_counts(counts: tuple[tuple[str, int], ...]) -> str:
    inner = ", ".join(f"{k}: {v}" for k, v in counts)
    return "{" + inner + "}"


def _fmt_yield(y: Yield) -> str:
    if y.probability >= 1.0:
        return str(y.amount)
    return f"{{amount: {y.amount}, probability: {_fmt_scalar(y.probability)}}}"


def _fmt_leaves(leaves: Leaves) -> str:
    if leaves.objects:
        spawn = ", ".join(f"{k}: {_fmt_scalar(p)}" for k, p in leaves.objects)
        obj = "{" + spawn + "}"
    else:
        obj = "null"
    return f"{{material: {leaves.material}, object: {obj}}}"


def serialize_config(cfg: WorldConfig) -> str:
    lines = []
    lines.append("terrain_neighbour:")
    for key, host in cfg.terrain_neighbour:
        lines.append(f"  {key}: {host}")
    lines.append("terrain_effect:")
    for material, eff in cfg.terrain_effect:
        lines.append(
            f"  {material}: {{walkable: {_fmt_scalar(eff.walkable)}, "
            f"walk_health: {eff.walk_health}, dieable: {_fmt_scalar(eff.dieable)}}}"
        )
    lines.append("npc:")
    for kind, spec in cfg.npc:
        lines.append(f"  {kind}:")
        for field in NPC_FIELDS:
            lines.append(f"    {field}: {_fmt_scalar(getattr(spec, field))}")
    lines.append("drink:")
    for liquid, spec in cfg.drink:
        lines.append(f"  {liquid}:")
        for field in DRINK_FIELDS:
            lines.append(f"    {field}: {_fmt_scalar(getattr(spec, field))}")
    lines.append("ignitability:")
    for item, flag in cfg.ignitability:
        lines.append(f"  {item}: {_fmt_scalar(flag)}")
    lines.append("collect:")
    for rule in cfg.collect:
        receive = ", ".join(f"{item}: {_fmt_yield(y)}" for item, y in rule.receive)
        leaves = _fmt_leaves(rule.leaves or Leaves(rule.target))
        lines.append(
            f"  {rule.target}: {{require: {_fmt_counts(rule.require)}, "
            f"receive: {{{receive}}}, leaves: {leaves}}}"
        )
    lines.append("place:")
    for rule in cfg.place:
        where = "[" + ", ".join(rule.where) + "]"
        lines.append(
            f"  {rule.name}: {{uses: {_fmt_counts(rule.uses)}, "
            f"where: {where}, type: {rule.kind}}}"
        )
    lines.append("make:")
    for rule in cfg.make:
        nearby = "[" + ", ".join(rule.nearby) + "]"
        lines.append(
            f"  {rule.name}: {{uses: {_fmt_counts(rule.uses)}, "
            f"nearby: {nearby}, gives: {rule.gives}}}"
        )
    return "\n".join(lines) + "\n"
