"""Field-wise config diffing with fixed English renderings.

The deltas double as the ground-truth rule set when scoring induced rules,
so every template is deterministic: same field path and values, same
sentence.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Leaves, WorldConfig, Yield


@dataclass(frozen=True)
class RuleDelta:
    path: str
    old: object
    new: object
    text: str


def _change_word(value: int, what: str) -> str:
    if value > 0:
        return f"increases {what}"
    if value < 0:
        return f"decreases {what}"
    return f"does not change {what}"


def _counts_phrase(counts: tuple[tuple[str, int], ...]) -> str:
    if not counts:
        return "no tools"
    return ", ".join(f"{n} {item}" for item, n in counts)


def _yield_phrase(target: str, item: str, y: Yield) -> str:
    text = f"collecting {target} yields {y.amount} {item}"
    if y.probability < 1.0:
        text += f" with probability {y.probability:g}"
    return text


_NPC_FLAG_TEXT = {
    "eatable": ("the {k} can be eaten", "the {k} cannot be eaten"),
    "arrowable": ("the {k} shoots arrows", "the {k} does not shoot arrows"),
    "closable": ("the {k} approaches the player", "the {k} does not approach the player"),
    "can_walk": ("the {k} can move around", "the {k} cannot move"),
    "attackable": ("the {k} reacts to attacks", "the {k} ignores attacks"),
    "defeatable": ("the {k} can be defeated", "the {k} cannot be defeated"),
}

_NPC_FUNC_TEXT = {
    "closable_health_damage_func": "a nearby {k} {c}",
    "eat_health_damage_func": "eating the {k} {c}",
    "arrow_damage_func": "the {k}'s arrow {c}",
    "inc_food_func": "eating the {k} {c}",
    "inc_thirst_func": "eating the {k} {c}",
}

_NPC_FUNC_STAT = {
    "closable_health_damage_func": "health",
    "eat_health_damage_func": "health",
    "arrow_damage_func": "health",
    "inc_food_func": "the food level",
    "inc_thirst_func": "the drink level",
}

_DRINK_STAT = {
    "inc_drink_func": "the drink level",
    "inc_health_func": "health",
    "inc_food_func": "the food level",
}


def _diff_mapping(path: str, old_pairs, new_pairs, render) -> list[RuleDelta]:
    old_map = dict(old_pairs)
    new_map = dict(new_pairs)
    deltas = []
    for key in list(old_map) + [k for k in new_map if k not in old_map]:
        old_v = old_map.get(key)
        new_v = new_map.get(key)
        if old_v != new_v:
            deltas.append(RuleDelta(f"{path}.{key}", old_v, new_v, render(key, old_v, new_v)))
    return deltas


def diff_configs(base: WorldConfig, other: WorldConfig) -> list[RuleDelta]:
    deltas: list[RuleDelta] = []

    def neighbour_text(key, _old, new):
        if key == "player":
            return f"the player starts on {new}"
        return f"{key} is found near {new}"

    deltas += _diff_mapping(
        "terrain_neighbour", base.terrain_neighbour, other.terrain_neighbour, neighbour_text
    )

    for material, old_eff in base.terrain_effect:
        new_eff = other.effect(material)
        if old_eff == new_eff:
            continue
        p = f"terrain_effect.{material}"
        if old_eff.walkable != new_eff.walkable:
            text = (
                f"the {material} block is walkable"
                if new_eff.walkable
                else f"the {material} block is not walkable"
            )
            deltas.append(RuleDelta(f"{p}.walkable", old_eff.walkable, new_eff.walkable, text))
        if old_eff.walk_health != new_eff.walk_health:
            text = f"walking on {material} {_change_word(new_eff.walk_health, 'health')}"
            deltas.append(
                RuleDelta(f"{p}.walk_health", old_eff.walk_health, new_eff.walk_health, text)
            )
        if old_eff.dieable != new_eff.dieable:
            text = (
                f"stepping on {material} is deadly"
                if new_eff.dieable
                else f"stepping on {material} is not deadly"
            )
            deltas.append(RuleDelta(f"{p}.dieable", old_eff.dieable, new_eff.dieable, text))

    for kind, old_spec in base.npc:
        new_spec = other.npc_spec(kind)
        if old_spec == new_spec:
            continue
        p = f"npc.{kind}"
        for field, (on_text, off_text) in _NPC_FLAG_TEXT.items():
            old_v, new_v = getattr(old_spec, field), getattr(new_spec, field)
            if old_v != new_v:
                text = (on_text if new_v else off_text).format(k=kind)
                deltas.append(RuleDelta(f"{p}.{field}", old_v, new_v, text))
        for field, template in _NPC_FUNC_TEXT.items():
            old_v, new_v = getattr(old_spec, field), getattr(new_spec, field)
            if old_v != new_v:
                text = template.format(k=kind, c=_change_word(new_v, _NPC_FUNC_STAT[field]))
                deltas.append(RuleDelta(f"{p}.{field}", old_v, new_v, text))

    for liquid, old_spec in base.drink:
        new_spec = other.drink_spec(liquid)
        if old_spec == new_spec or new_spec is None:
            continue
        p = f"drink.{liquid}"
        for field, stat in _DRINK_STAT.items():
            old_v, new_v = getattr(old_spec, field), getattr(new_spec, field)
            if old_v != new_v:
                text = f"drinking {liquid} {_change_word(new_v, stat)}"
                deltas.append(RuleDelta(f"{p}.{field}", old_v, new_v, text))

    def ign_text(item, _old, new):
        return f"{item} is flammable" if new else f"{item} is not flammable"

    deltas += _diff_mapping("ignitability", base.ignitability, other.ignitability, ign_text)

    for old_rule in base.collect:
        target = old_rule.target
        new_rule = other.collect_rule(target)
        if new_rule is None or old_rule == new_rule:
            continue
        p = f"collect.{target}"
        if old_rule.require != new_rule.require:
            text = f"collecting {target} requires {_counts_phrase(new_rule.require)}"
            deltas.append(RuleDelta(f"{p}.require", old_rule.require, new_rule.require, text))
        old_recv = dict(old_rule.receive)
        new_recv = dict(new_rule.receive)
        for item in list(old_recv) + [i for i in new_recv if i not in old_recv]:
            old_y = old_recv.get(item)
            new_y = new_recv.get(item)
            if old_y == new_y:
                continue
            if new_y is None:
                text = f"collecting {target} no longer yields {item}"
            else:
                text = _yield_phrase(target, item, new_y)
            deltas.append(RuleDelta(f"{p}.receive.{item}", old_y, new_y, text))
        old_leaves = old_rule.leaves or Leaves(target)
        new_leaves = new_rule.leaves or Leaves(target)
        if old_leaves.material != new_leaves.material:
            text = f"collecting {target} leaves {new_leaves.material} behind"
            deltas.append(
                RuleDelta(f"{p}.leaves.material", old_leaves.material, new_leaves.material, text)
            )
        old_spawn = dict(old_leaves.objects)
        new_spawn = dict(new_leaves.objects)
        for kind in list(old_spawn) + [k for k in new_spawn if k not in old_spawn]:
            old_p = old_spawn.get(kind)
            new_p = new_spawn.get(kind)
            if old_p == new_p:
                continue
            if new_p is None:
                text = f"collecting {target} no longer spawns a {kind}"
            else:
                text = f"collecting {target} may spawn a {kind} with probability {new_p:g}"
            deltas.append(RuleDelta(f"{p}.leaves.object.{kind}", old_p, new_p, text))

    for old_rule in base.place:
        name = old_rule.name
        new_rule = other.place_rule(name)
        if new_rule is None or old_rule == new_rule:
            continue
        p = f"place.{name}"
        if old_rule.uses != new_rule.uses:
            text = f"placing {name} consumes {_counts_phrase(new_rule.uses)}"
            deltas.append(RuleDelta(f"{p}.uses", old_rule.uses, new_rule.uses, text))
        if old_rule.where != new_rule.where:
            text = f"{name} can be placed on {', '.join(new_rule.where)}"
            deltas.append(RuleDelta(f"{p}.where", old_rule.where, new_rule.where, text))
        if old_rule.kind != new_rule.kind:
            text = f"placing {name} creates a {new_rule.kind}"
            deltas.append(RuleDelta(f"{p}.type", old_rule.kind, new_rule.kind, text))

    for old_rule in base.make:
        name = old_rule.name
        new_rule = other.make_rule(name)
        if new_rule is None or old_rule == new_rule:
            continue
        p = f"make.{name}"
        if old_rule.uses != new_rule.uses:
            text = f"making a {name} consumes {_counts_phrase(new_rule.uses)}"
            deltas.append(RuleDelta(f"{p}.uses", old_rule.uses, new_rule.uses, text))
        if old_rule.nearby != new_rule.nearby:
            stations = " and ".join(new_rule.nearby) if new_rule.nearby else "nothing"
            text = f"making a {name} requires being near {stations}"
            deltas.append(RuleDelta(f"{p}.nearby", old_rule.nearby, new_rule.nearby, text))
        if old_rule.gives != new_rule.gives:
            text = f"making a {name} produces {new_rule.gives}"
            deltas.append(RuleDelta(f"{p}.gives", old_rule.gives, new_rule.gives, text))

    return deltas
