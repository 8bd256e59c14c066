"""Rejection sampler for counter-commonsense world configs.

Each modification axis redraws one slice of the default world: terrain
re-aims the neighbor constraints and walkability, survival redraws
creature and drink behavior, task dependency rewrites what mining
yields and what tools and stations cost. Draws that break any of the
four solvability principles are rejected and retried.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .config import builtin_world, normalize_config, validate_config
from .config.model import (
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
)
from .engine.worldgen import GenerationError
from .items import (
    BASE_MATERIALS,
    CREATURES,
    IGNITABLE_KEYS,
    LIQUIDS,
    MATERIALS,
    NEIGHBOUR_KEYS,
)
from .verify import (
    check_accessibility,
    check_feasibility,
    check_resource_balance,
    check_supply,
)

AXES = ("terrain", "survival", "task_dependency")
COLLECT_VARIANTS = ("visual_misleading", "traditional_exceptions", "probabilistic")

SOLID_SOURCES = ("tree", "stone", "coal", "iron", "diamond", "grass")
SOLID_ITEMS = ("wood", "stone", "coal", "iron", "diamond", "sapling")
TOOL_CHOICES = (None, "sapling", "wood_pickaxe", "stone_pickaxe", "iron_pickaxe")
PICKAXES = ("wood_pickaxe", "stone_pickaxe", "iron_pickaxe")
SECONDARY_DROP_PROB = 0.10
LIQUID_CREATURE_PROB = 0.1
STATION_COSTS = (1, 2, 4)
MAX_ATTEMPTS = 200

_TRISTATE = (-1, 0, 1)


class SamplingExhausted(RuntimeError):
    """No draw passed verification within the attempt budget."""


@dataclass(frozen=True)
class ModificationSpec:
    axes: frozenset[str]
    collect_variant: str = "visual_misleading"
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.axes:
            raise ValueError("at least one modification axis required")
        bad = set(self.axes) - set(AXES)
        if bad:
            raise ValueError(f"unknown axes: {sorted(bad)}")
        if self.collect_variant not in COLLECT_VARIANTS:
            raise ValueError(f"unknown collect variant: {self.collect_variant}")


def sample_terrain(rng: random.Random):
    """Redraw neighbor hosts (or swap them wholesale) plus cell effects."""
    default_hosts = dict(builtin_world("default").terrain_neighbour)
    if rng.random() < 0.5:
        hosts = {}
        for key in NEIGHBOUR_KEYS:
            if key == "player":
                hosts[key] = rng.choice(BASE_MATERIALS)
            else:
                others = tuple(m for m in MATERIALS if m != key)
                hosts[key] = rng.choice(others)
    else:
        # name swap: the existing hosts trade places across the keys
        keys = [k for k in NEIGHBOUR_KEYS if k != "player"]
        values = [default_hosts[k] for k in keys]
        rng.shuffle(values)
        hosts = dict(zip(keys, values))
        hosts["player"] = rng.choice(BASE_MATERIALS)
    neighbour = tuple((k, hosts[k]) for k in NEIGHBOUR_KEYS)

    effects = []
    for m in MATERIALS:
        if m == "tree":  # trees keep default behavior: too tall to alter
            effects.append((m, TerrainEffect(walkable=False)))
            continue
        walkable = rng.random() < 0.5
        effect = TerrainEffect(
            walkable=walkable,
            walk_health=rng.choice(_TRISTATE) if walkable else 0,
            dieable=walkable and rng.random() < 0.15,
        )
        effects.append((m, effect.normalized()))
    spawn = hosts["player"]
    effects = tuple(
        (m, TerrainEffect(walkable=True) if m == spawn else e) for m, e in effects
    )
    return neighbour, effects


def sample_survival(rng: random.Random):
    """Redraw every creature spec and drink spec from the value domains."""
    npcs = []
    for kind in CREATURES:
        spec = NpcSpec(
            eatable=rng.random() < 0.5,
            arrowable=rng.random() < 0.5,
            closable=rng.random() < 0.5,
            can_walk=rng.random() < 0.75,
            attackable=rng.random() < 0.75,
            defeatable=rng.random() < 0.75,
            closable_health_damage_func=rng.choice(_TRISTATE),
            eat_health_damage_func=rng.choice(_TRISTATE),
            arrow_damage_func=rng.choice(_TRISTATE),
            inc_food_func=rng.choice(_TRISTATE),
            inc_thirst_func=rng.choice(_TRISTATE),
        )
        npcs.append((kind, spec.normalized()))
    drinks = []
    for liquid in LIQUIDS:
        drinks.append(
            (
                liquid,
                DrinkSpec(
                    inc_drink_func=rng.choice(_TRISTATE),
                    inc_health_func=rng.choice(_TRISTATE),
                    inc_food_func=rng.choice(_TRISTATE),
                ),
            )
        )
    return tuple(npcs), tuple(drinks)


def _yield_for(item: str, probability: float | None = None) -> Yield:
    if probability is None:
        probability = 0.1 if item == "sapling" else 1.0
    return Yield(amount=1, probability=probability)


def _sample_yields(rng: random.Random, variant: str) -> dict[str, list[tuple[str, Yield]]]:
    yields: dict[str, list[tuple[str, Yield]]] = {s: [] for s in SOLID_SOURCES}
    if variant == "visual_misleading":
        items = list(SOLID_ITEMS)
        rng.shuffle(items)
        for source, item in zip(SOLID_SOURCES, items):
            yields[source].append((item, _yield_for(item)))
        return yields
    # traditional_exceptions and probabilistic: minerals yield themselves,
    # tree and grass pick up whatever is left so every item stays obtainable
    for mineral in ("stone", "coal", "iron", "diamond"):
        yields[mineral].append((mineral, _yield_for(mineral)))
    leftovers = ["wood", "sapling"]
    rng.shuffle(leftovers)
    for source, item in zip(("tree", "grass"), leftovers):
        yields[source].append((item, _yield_for(item)))
    if rng.random() < 0.3:  # occasional bonus drop on trees
        tree_item = leftovers[0]
        bonus = rng.choice([i for i in SOLID_ITEMS if i != tree_item])
        yields["tree"].append((bonus, Yield(amount=1, probability=0.5)))
    if variant == "probabilistic":
        for mineral in ("stone", "coal", "iron", "diamond"):
            extra = rng.choice([i for i in SOLID_ITEMS if i != mineral])
            yields[mineral].append((extra, Yield(amount=1, probability=SECONDARY_DROP_PROB)))
    return yields


def sample_task_dependency(rng: random.Random, variant: str):
    """Redraw ignitability, collect rules, station costs, and recipes."""
    if variant not in COLLECT_VARIANTS:
        raise ValueError(f"unknown collect variant: {variant}")

    yields = _sample_yields(rng, variant)
    source_of = {}
    for source in SOLID_SOURCES:
        for item, _y in yields[source]:
            source_of.setdefault(item, source)

    # keep the tool chain bootstrappable: whatever yields wood must be
    # collectable bare-handed, and nothing may require itself
    tools: dict[str, str | None] = {source_of["wood"]: None}
    pool = [s for s in SOLID_SOURCES if s not in tools]
    for source, pickaxe in zip(rng.sample(pool, len(PICKAXES)), PICKAXES):
        tools[source] = pickaxe
    for source in SOLID_SOURCES:
        if source in tools:
            continue
        choices = [t for t in TOOL_CHOICES if not (t == "sapling" and source == source_of.get("sapling"))]
        tools[source] = rng.choice(choices)

    bare = {item for item, source in source_of.items() if tools[source] is None}
    while True:
        ignitability = tuple((key, rng.random() < 0.5) for key in IGNITABLE_KEYS)
        ignitable = dict(ignitability)
        flags = list(ignitable.values())
        if not (any(flags) and not all(flags)):
            continue
        # recipes all consume wood; if wood burns, the furnace must be
        # buildable before the first pickaxe exists
        if ignitable["wood"] and not any(
            item in bare and not flag for item, flag in ignitability
        ):
            continue
        break

    collect = []
    for source in SOLID_SOURCES:
        tool = tools[source]
        require = ((tool, 1),) if tool else ()
        leaves = Leaves(material=rng.choice(MATERIALS))
        collect.append(
            CollectRule(
                target=source,
                require=require,
                receive=tuple(yields[source]),
                leaves=leaves,
            )
        )
    for liquid in LIQUIDS:
        require = (("sapling", 1),) if rng.random() < 0.25 else ()
        objects = ()
        if rng.random() < 0.5:
            objects = ((rng.choice(("zombie", "skeleton")), LIQUID_CREATURE_PROB),)
        collect.append(
            CollectRule(
                target=liquid,
                require=require,
                receive=(("drink", Yield(amount=1, probability=1.0)),),
                leaves=Leaves(material=rng.choice(LIQUIDS), objects=objects),
            )
        )
    sand_receive = ()
    if variant != "visual_misleading" and rng.random() < 0.25:
        sand_receive = (("sapling", Yield(amount=1, probability=1.0)),)
    collect.append(
        CollectRule(target="sand", receive=sand_receive, leaves=Leaves(material="sand"))
    )
    order = {m: i for i, m in enumerate(("tree", "stone", "coal", "iron", "diamond", "water", "lava", "grass", "sand"))}
    collect.sort(key=lambda r: order[r.target])

    table_candidates = [item for item in IGNITABLE_KEYS if item in bare]
    table_material = rng.choice(table_candidates)
    safe = [key for key, flag in ignitability if not flag]
    if ignitable["wood"]:
        safe = [key for key in safe if key in bare]
    furnace_material = rng.choice(safe)
    default = builtin_world("default")
    place = tuple(
        replace(rule, uses=((table_material, rng.choice(STATION_COSTS)),))
        if rule.name == "table"
        else replace(rule, uses=((furnace_material, rng.choice(STATION_COSTS)),))
        if rule.name == "furnace"
        else rule
        for rule in default.place
    )

    make = []
    for rule in default.make:
        burns = any(ignitable.get(item, False) for item, _ in rule.uses)
        nearby = ("table", "furnace") if burns else ("table",)
        make.append(MakeRule(name=rule.name, uses=rule.uses, nearby=nearby, gives=rule.gives))
    return ignitability, tuple(collect), place, tuple(make)


def sample_world(spec: ModificationSpec) -> WorldConfig:
    """Rejection-sample a config for the requested axes; always verifies."""
    rng = random.Random(spec.seed)
    base = builtin_world("default")
    last_reason = "no attempts made"
    for _attempt in range(MAX_ATTEMPTS):
        cfg = base
        if "terrain" in spec.axes:
            neighbour, effects = sample_terrain(rng)
            cfg = replace(cfg, terrain_neighbour=neighbour, terrain_effect=effects)
        if "survival" in spec.axes:
            npc, drink = sample_survival(rng)
            cfg = replace(cfg, npc=npc, drink=drink)
        if "task_dependency" in spec.axes:
            ignitability, collect, place, make = sample_task_dependency(
                rng, spec.collect_variant
            )
            cfg = replace(
                cfg, ignitability=ignitability, collect=collect, place=place, make=make
            )
        cfg = normalize_config(cfg)
        try:
            validate_config(cfg)
        except ConfigError as err:
            last_reason = f"invalid config: {err}"
            continue
        # cheap map-free checks first; the supply dry run generates a map
        failed = None
        for name, check in (
            ("feasibility", check_feasibility),
            ("accessibility", check_accessibility),
            ("balance", check_resource_balance),
        ):
            result = check(cfg)
            if not result.passed:
                failed = f"{name}: " + "; ".join(w.detail for w in result.witnesses)
                break
        if failed:
            last_reason = failed
            continue
        try:
            supply = check_supply(cfg, seed=spec.seed)
        except GenerationError as err:
            last_reason = f"generation failed: {err}"
            continue
        if not supply.passed:
            last_reason = "supply: " + "; ".join(w.detail for w in supply.witnesses)
            continue
        return cfg
    raise SamplingExhausted(
        f"no valid world in {MAX_ATTEMPTS} attempts; last failure: {last_reason}"
    )
