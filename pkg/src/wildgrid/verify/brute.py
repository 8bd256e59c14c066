"""Brute-force oracles for the feasibility check.

Two independent implementations that never look at the dependency
graph. `closure_achievements` runs an abstract interpreter to a fixed
point; `explore_orders` does an exhaustive breadth-first search over
every order of collect/place/make events. Both treat any obtainable
item kind as available in quantity, the same abstraction the graph
uses, so their results must agree with it exactly.
"""

from __future__ import annotations

from ..config.model import WorldConfig
from ..items import MATERIALS
from .tree import material_adjacency


class _Interp:
    def __init__(self, cfg: WorldConfig) -> None:
        self.cfg = cfg
        self.spawn = cfg.spawn_material()
        self.adj = material_adjacency(cfg)

    def passable(self, items: frozenset[str]) -> frozenset[str]:
        cfg = self.cfg
        result: set[str] = set()
        changed = True
        while changed:
            changed = False
            for m in MATERIALS:
                if m in result:
                    continue
                eff = cfg.effect(m)
                ok = eff.walkable and not eff.dieable
                rule = cfg.collect_rule(m)
                if not ok and rule is not None and rule.leaves_material() != m:
                    ok = (
                        all(t in items for t, _ in rule.require)
                        and rule.leaves_material() in result
                    )
                if not ok:
                    for place in cfg.place:
                        if (
                            place.name in MATERIALS
                            and m in place.where
                            and place.name in result
                            and all(u in items for u, _ in place.uses)
                        ):
                            ok = True
                            break
                if ok:
                    result.add(m)
                    changed = True
        return frozenset(result)

    def reached(self, items: frozenset[str]) -> frozenset[str]:
        passable = self.passable(items)
        seen = {self.spawn}
        frontier = [self.spawn]
        while frontier:
            m = frontier.pop()
            if m not in passable:
                continue  # interactable from outside but never entered
            for nxt in self.adj[m]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return frozenset(seen)

    def base_achievements(self) -> frozenset[str]:
        cfg = self.cfg
        ach = {"wake_up"}
        for kind, unlock in (
            ("cow", "kill_cow"),
            ("zombie", "defeat_zombie"),
            ("skeleton", "defeat_skeleton"),
        ):
            spec = cfg.npc_spec(kind)
            if spec.eatable or spec.defeatable:
                ach.add(unlock)
        return frozenset(ach)

    def events(self, state: "_State") -> list["_State"]:
        cfg = self.cfg
        reached = self.reached(state.items)
        out = []
        for rule in cfg.collect:
            if rule.target not in reached:
                continue
            if not all(t in state.items for t, _ in rule.require):
                continue
            nxt = state.apply_collect(cfg, rule)
            if nxt is not state:
                out.append(nxt)
        for place in cfg.place:
            if place.name in state.placed:
                continue
            if not all(u in state.items for u, _ in place.uses):
                continue
            if not any(m in reached for m in place.where):
                continue
            nxt = state.apply_place(cfg, place)
            if nxt is not state:
                out.append(nxt)
        for make in cfg.make:
            if not all(u in state.items for u, _ in make.uses):
                continue
            if not all(s in state.placed for s in make.nearby):
                continue
            nxt = state.apply_make(cfg, make)
            if nxt is not state:
                out.append(nxt)
        return out


class _State:
    __slots__ = ("items", "placed", "plant", "ach")

    def __init__(self, items, placed, plant, ach) -> None:
        self.items = items
        self.placed = placed
        self.plant = plant
        self.ach = ach

    def key(self):
        return (self.items, self.placed, self.plant, self.ach)

    def _with(self, items, placed, plant, ach) -> "_State":
        if (items, placed, plant, ach) == self.key():
            return self
        return _State(items, placed, plant, ach)

    def _plant_unlock(self, cfg: WorldConfig, plant: bool, ach: set[str]) -> None:
        spec = cfg.npc_spec("plant")
        if plant and (spec.eatable or spec.defeatable):
            ach.add("eat_plant")

    def apply_collect(self, cfg: WorldConfig, rule) -> "_State":
        items = set(self.items)
        ach = set(self.ach)
        plant = self.plant
        for gained, y in rule.receive:
            if y.probability <= 0:
                continue
            if gained == "drink":
                ach.add("collect_drink")
            else:
                items.add(gained)
                ach.add(f"collect_{gained}")
        if rule.leaves:
            for kind, p in rule.leaves.objects:
                if kind == "plant" and p > 0:
                    plant = True
        self._plant_unlock(cfg, plant, ach)
        return self._with(frozenset(items), self.placed, plant, frozenset(ach))

    def apply_place(self, cfg: WorldConfig, rule) -> "_State":
        placed = frozenset(self.placed | {rule.name})
        ach = set(self.ach)
        ach.add(f"place_{rule.name}")
        plant = self.plant or rule.name == "plant"
        self._plant_unlock(cfg, plant, ach)
        return self._with(self.items, placed, plant, frozenset(ach))

    def apply_make(self, cfg: WorldConfig, rule) -> "_State":
        items = frozenset(self.items | {rule.name})
        ach = frozenset(self.ach | {f"make_{rule.name}"})
        return self._with(items, self.placed, self.plant, ach)


def closure_achievements(cfg: WorldConfig) -> frozenset[str]:
    """Fixed-point interpreter: apply every enabled event until stable."""
    interp = _Interp(cfg)
    state = _State(frozenset(), frozenset(), False, interp.base_achievements())
    while True:
        merged = state
        for nxt in interp.events(state):
            merged = _State(
                merged.items | nxt.items,
                merged.placed | nxt.placed,
                merged.plant or nxt.plant,
                merged.ach | nxt.ach,
            )
        if merged.key() == state.key():
            return state.ach
        state = merged


def explore_orders(cfg: WorldConfig, max_states: int = 200000) -> frozenset[str]:
    """Exhaustive search over event orders; union of unlocks on any path."""
    interp = _Interp(cfg)
    start = _State(frozenset(), frozenset(), False, interp.base_achievements())
    seen = {start.key()}
    frontier = [start]
    unlocked = set(start.ach)
    while frontier:
        state = frontier.pop()
        for nxt in interp.events(state):
            if nxt.key() in seen:
                continue
            if len(seen) >= max_states:
                raise RuntimeError("state space too large for exhaustive search")
            seen.add(nxt.key())
            unlocked |= nxt.ach
            frontier.append(nxt)
    return frozenset(unlocked)
