"""Step semantics: actions, creature behaviour, stat upkeep, rewards.

A step runs three phases (agent action, creatures, stat upkeep); death
short-circuits the remaining phases. Reward is +1 per newly unlocked
achievement plus 0.1 per point of net health change, tracked in tenths
so episode totals stay exact.
"""

from __future__ import annotations

from typing import Optional

from ..config.model import CollectRule, WorldConfig
from ..items import (
    ACTION_INDEX,
    COLLECT_UNLOCKS,
    DEFEAT_UNLOCKS,
    LIQUIDS,
    MATERIALS,
)
from . import params
from .state import Cell, DIRECTIONS, Entity, GameState, Observation, StepResult
from .worldgen import generate

PLACE_ACTIONS = {
    "place_stone": "stone",
    "place_table": "table",
    "place_furnace": "furnace",
    "place_plant": "plant",
}
MAKE_ACTIONS = {
    "make_wood_pickaxe": "wood_pickaxe",
    "make_stone_pickaxe": "stone_pickaxe",
    "make_iron_pickaxe": "iron_pickaxe",
    "make_wood_sword": "wood_sword",
    "make_stone_sword": "stone_sword",
    "make_iron_sword": "iron_sword",
}
STATION_RANGE = 2  # Chebyshev reach for crafting stations


class EpisodeFinished(RuntimeError):
    """step() was called after the episode ended."""


def _clamp(value: int) -> int:
    return max(0, min(params.MAX_STAT, value))


class Engine:
    """One episode of one world; deterministic in (config, seed)."""

    def __init__(self, cfg: WorldConfig, seed: int) -> None:
        self.cfg = cfg
        self.seed = seed
        self.state: Optional[GameState] = None
        self.reward_tenths = 0
        self._recent_unlocks: list[str] = []

    # --- lifecycle ---

    def reset(self, seed: Optional[int] = None) -> Observation:
        if seed is not None:
            self.seed = seed
        self.state = generate(self.cfg, self.seed)
        self.reward_tenths = 0
        self._recent_unlocks = []
        return self.observe()

    def step(self, action: str) -> StepResult:
        if action not in ACTION_INDEX:
            raise ValueError(f"unknown action {action!r}")
        st = self.state
        if st is None:
            raise EpisodeFinished("reset() must run before step()")
        if st.done:
            raise EpisodeFinished("episode is over")

        health_before = st.agent.health
        unlocked_before = len(st.unlocked)
        st.last_action = action

        if not st.agent.sleeping:
            self._apply_action(action)
        self._check_collapse()
        if not st.done:
            self._creature_phase()
        if not st.done:
            self._stat_phase()
        self._check_collapse()

        st.tick += 1
        truncated = False
        if st.tick >= params.EPISODE_LIMIT and not st.done:
            st.done = True
            truncated = True

        gained = len(st.unlocked) - unlocked_before
        health_delta = st.agent.health - health_before
        tenths = 10 * gained + health_delta
        self.reward_tenths += tenths

        info = {
            "tick": st.tick,
            "unlocked": sorted(st.unlocked),
            "newly_unlocked": list(self._recent_unlocks),
            "health_delta": health_delta,
            "death_cause": st.death_cause,
            "truncated": truncated,
        }
        self._recent_unlocks.clear()
        return StepResult(self.observe(), tenths / 10.0, st.done, info)

    def _check_collapse(self) -> None:
        st = self.state
        if st.agent.health <= 0 and not st.done:
            st.done = True
            st.death_cause = st.death_cause or "collapsed"

    # --- agent actions ---

    def _apply_action(self, action: str) -> None:
        if action == "noop":
            return
        if action in DIRECTIONS:
            self._move(action)
        elif action == "do":
            self._do()
        elif action == "sleep":
            self.state.agent.sleeping = True
        elif action in PLACE_ACTIONS:
            self._place(PLACE_ACTIONS[action])
        elif action in MAKE_ACTIONS:
            self._make(MAKE_ACTIONS[action])

    def _move(self, action: str) -> None:
        st = self.state
        ag = st.agent
        dx, dy = DIRECTIONS[action]
        ag.facing = (dx, dy)  # turning succeeds even when the step is blocked
        tx, ty = ag.x + dx, ag.y + dy
        name = st.material(tx, ty)
        if name is None:
            return
        eff = self.cfg.effect(name)
        if not eff.walkable or st.occupied(tx, ty):
            return
        ag.x, ag.y = tx, ty
        if eff.walk_health:
            self._change_health(eff.walk_health, cause=name)
        if eff.dieable:
            ag.health = 0
            st.done = True
            st.death_cause = name

    def _do(self) -> None:
        st = self.state
        fx, fy = st.agent.front()
        ent = st.entity_at.get((fx, fy))
        if ent is not None:
            self._do_creature(ent)
            return
        if (fx, fy) in st.objects:
            return
        name = st.material(fx, fy)
        if name is None:
            return
        rule = self.cfg.collect_rule(name)
        if rule is None:
            return
        for item, need in rule.require:
            if st.agent.count(item) < need:
                return
        if name in LIQUIDS:
            self._drink(name, rule)
        else:
            self._mine(fx, fy, rule)

    def _do_creature(self, ent: Entity) -> None:
        st = self.state
        spec = self.cfg.npc_spec(ent.kind)
        if ent.kind == "plant" and ent.ripeness < params.PLANT_RIPEN_TICKS:
            st.remove_entity(ent)  # trampled before bearing fruit
            return
        if spec.eatable:
            self._change_health(spec.eat_health_damage_func, cause=ent.kind)
            st.agent.food = _clamp(st.agent.food + spec.inc_food_func)
            st.agent.drink = _clamp(st.agent.drink + spec.inc_thirst_func)
            st.remove_entity(ent)
            self._unlock(DEFEAT_UNLOCKS[ent.kind])
        elif spec.defeatable:
            ent.hp -= self._attack_damage()
            if ent.hp <= 0:
                st.remove_entity(ent)
                self._unlock(DEFEAT_UNLOCKS[ent.kind])

    def _attack_damage(self) -> int:
        ag = self.state.agent
        for sword, damage in params.SWORD_DAMAGE:
            if ag.count(sword) > 0:
                return damage
        return params.BARE_HAND_DAMAGE

    def _drink(self, name: str, rule: CollectRule) -> None:
        st = self.state
        ag = st.agent
        spec = self.cfg.drink_spec(name)
        for item, yield_ in rule.receive:
            if not st.rng.chance(yield_.probability):
                continue
            if item == "drink":
                for _ in range(yield_.amount):
                    ag.drink = _clamp(ag.drink + spec.inc_drink_func)
                    ag.food = _clamp(ag.food + spec.inc_food_func)
                    self._change_health(spec.inc_health_func, cause=name)
                self._unlock("collect_drink")
            else:
                ag.add(item, yield_.amount)
                self._unlock(COLLECT_UNLOCKS[item])
        fx, fy = ag.front()
        self._apply_leaves(fx, fy, rule)

    def _mine(self, x: int, y: int, rule: CollectRule) -> None:
        st = self.state
        for item, yield_ in rule.receive:
            if not st.rng.chance(yield_.probability):
                continue
            if item == "drink":
                st.agent.drink = _clamp(st.agent.drink + yield_.amount)
                self._unlock("collect_drink")
            else:
                st.agent.add(item, yield_.amount)
                self._unlock(COLLECT_UNLOCKS[item])
        self._apply_leaves(x, y, rule)

    def _apply_leaves(self, x: int, y: int, rule: CollectRule) -> None:
        st = self.state
        leaves = rule.leaves
        if leaves.material != st.material(x, y):
            st.set_material(x, y, leaves.material)
        for kind, prob in leaves.objects:
            if st.rng.chance(prob) and not st.occupied(x, y):
                st.add_entity(Entity(kind, x, y, params.CREATURE_HP[kind]))

    def _place(self, name: str) -> None:
        st = self.state
        rule = self.cfg.place_rule(name)
        if rule is None:
            return
        fx, fy = st.agent.front()
        target = st.material(fx, fy)
        if target is None or target not in rule.where or st.occupied(fx, fy):
            return
        for item, need in rule.uses:
            if st.agent.count(item) < need:
                return
        for item, need in rule.uses:
            st.agent.remove(item, need)
        if name in MATERIALS:
            st.set_material(fx, fy, name)
        elif name == "plant":
            st.add_entity(Entity("plant", fx, fy, params.CREATURE_HP["plant"]))
        else:
            st.objects[(fx, fy)] = name
        self._unlock(f"place_{name}")

    def _make(self, name: str) -> None:
        st = self.state
        rule = self.cfg.make_rule(name)
        if rule is None:
            return
        ax, ay = st.agent.pos
        nearby = set()
        for dy in range(-STATION_RANGE, STATION_RANGE + 1):
            for dx in range(-STATION_RANGE, STATION_RANGE + 1):
                kind = st.objects.get((ax + dx, ay + dy))
                if kind:
                    nearby.add(kind)
        if any(station not in nearby for station in rule.nearby):
            return
        for item, need in rule.uses:
            if st.agent.count(item) < need:
                return
        for item, need in rule.uses:
            st.agent.remove(item, need)
        st.agent.add(name, rule.gives)
        self._unlock(f"make_{name}")

    # --- creatures ---

    def _creature_phase(self) -> None:
        st = self.state
        self._maybe_spawn()
        for ent in list(st.entities):
            if st.entity_at.get(ent.pos) is not ent:
                continue  # despawned earlier in this phase
            spec = self.cfg.npc_spec(ent.kind)
            if ent.kind == "plant":
                ent.ripeness += 1
            if (
                ent.kind == "zombie"
                and not st.is_night()
                and self._chebyshev(ent) > params.ZOMBIE_DAYLIGHT_DESPAWN_DIST
            ):
                st.remove_entity(ent)
                continue
            if spec.can_walk:
                self._creature_move(ent, spec)
            if ent.melee_cooldown > 0:
                ent.melee_cooldown -= 1
            if ent.arrow_cooldown > 0:
                ent.arrow_cooldown -= 1
            if (
                spec.closable
                and self._manhattan(ent) == 1
                and ent.melee_cooldown == 0
            ):
                self._change_health(spec.closable_health_damage_func, cause=ent.kind)
                ent.melee_cooldown = params.MELEE_COOLDOWN
            if spec.arrowable and ent.arrow_cooldown == 0 and self._arrow_lined(ent):
                self._change_health(spec.arrow_damage_func, cause=ent.kind)
                ent.arrow_cooldown = params.ARROW_COOLDOWN
            if st.agent.health <= 0:
                st.done = True
                st.death_cause = st.death_cause or ent.kind
                return

    def _chebyshev(self, ent: Entity) -> int:
        ag = self.state.agent
        return max(abs(ent.x - ag.x), abs(ent.y - ag.y))

    def _manhattan(self, ent: Entity) -> int:
        ag = self.state.agent
        return abs(ent.x - ag.x) + abs(ent.y - ag.y)

    def _creature_move(self, ent: Entity, spec) -> None:
        st = self.state
        if spec.closable and self._chebyshev(ent) <= params.CHASE_RADIUS:
            ag = st.agent
            dx = ag.x - ent.x
            dy = ag.y - ent.y
            step_x = (1 if dx > 0 else -1, 0) if dx else None
            step_y = (0, 1 if dy > 0 else -1) if dy else None
            order = (step_x, step_y) if abs(dx) >= abs(dy) else (step_y, step_x)
            for move in order:
                if move and self._try_entity_step(ent, *move):
                    return
            return
        if st.rng.chance(params.NPC_MOVE_PROB):
            dx, dy = st.rng.choice(((1, 0), (-1, 0), (0, 1), (0, -1)))
            self._try_entity_step(ent, dx, dy)

    def _try_entity_step(self, ent: Entity, dx: int, dy: int) -> bool:
        st = self.state
        tx, ty = ent.x + dx, ent.y + dy
        name = st.material(tx, ty)
        if name is None:
            return False
        eff = self.cfg.effect(name)
        if not eff.walkable or eff.dieable or st.occupied(tx, ty):
            return False
        st.move_entity(ent, tx, ty)
        return True

    def _arrow_lined(self, ent: Entity) -> bool:
        st = self.state
        ag = st.agent
        dx = ag.x - ent.x
        dy = ag.y - ent.y
        if dx != 0 and dy != 0:
            return False
        dist = abs(dx) + abs(dy)
        if dist == 0 or dist > params.ARROW_RANGE:
            return False
        sx = (dx > 0) - (dx < 0)
        sy = (dy > 0) - (dy < 0)
        for i in range(1, dist):
            x, y = ent.x + sx * i, ent.y + sy * i
            name = st.material(x, y)
            if name is None or not self.cfg.effect(name).walkable:
                return False
            if (x, y) in st.entity_at or (x, y) in st.objects:
                return False
        return True

    def _maybe_spawn(self) -> None:
        st = self.state
        zombies = sum(1 for e in st.entities if e.kind == "zombie")
        skeletons = sum(1 for e in st.entities if e.kind == "skeleton")
        if (
            st.is_night()
            and zombies < params.ZOMBIE_CAP
            and st.rng.chance(params.ZOMBIE_SPAWN_PROB)
        ):
            spot = self._spawn_spot()
            if spot:
                st.add_entity(Entity("zombie", *spot, params.CREATURE_HP["zombie"]))
        if skeletons < params.SKELETON_CAP and st.rng.chance(
            params.SKELETON_SPAWN_PROB
        ):
            spot = self._spawn_spot()
            if spot:
                st.add_entity(
                    Entity("skeleton", *spot, params.CREATURE_HP["skeleton"])
                )

    def _spawn_spot(self) -> Optional[tuple[int, int]]:
        st = self.state
        ag = st.agent
        for _ in range(8):
            dx = st.rng.randint(-params.SPAWN_MAX_DIST, params.SPAWN_MAX_DIST)
            dy = st.rng.randint(-params.SPAWN_MAX_DIST, params.SPAWN_MAX_DIST)
            if max(abs(dx), abs(dy)) < params.SPAWN_MIN_DIST:
                continue
            x, y = ag.x + dx, ag.y + dy
            name = st.material(x, y)
            if name is None:
                continue
            eff = self.cfg.effect(name)
            if eff.walkable and not eff.dieable and not st.occupied(x, y):
                return (x, y)
        return None

    # --- upkeep ---

    def _stat_phase(self) -> None:
        st = self.state
        ag = st.agent
        t = st.tick + 1  # 1-based step count, so periods hit every Nth step

        if ag.sleeping:
            ag.energy = _clamp(ag.energy + 1)
            if ag.energy >= params.MAX_STAT:
                ag.sleeping = False
                self._unlock("wake_up")
        elif t % params.ENERGY_DECAY_PERIOD == 0:
            ag.energy = _clamp(ag.energy - 1)
        if t % params.FOOD_DECAY_PERIOD == 0:
            ag.food = _clamp(ag.food - 1)
        if t % params.DRINK_DECAY_PERIOD == 0:
            ag.drink = _clamp(ag.drink - 1)

        if t % params.STARVE_PERIOD == 0:
            drained = [
                cause
                for cause, value in (
                    ("starved", ag.food),
                    ("dehydrated", ag.drink),
                    ("exhausted", ag.energy),
                )
                if value <= 0
            ]
            if drained:
                self._change_health(-len(drained), cause=drained[0])

        if (
            t % params.REGEN_PERIOD == 0
            and ag.health < params.MAX_STAT
            and ag.food > 0
            and ag.drink > 0
            and ag.energy > 0
        ):
            self._change_health(1)

    # --- shared helpers ---

    def _change_health(self, delta: int, cause: Optional[str] = None) -> None:
        if delta == 0:
            return
        st = self.state
        ag = st.agent
        ag.health = _clamp(ag.health + delta)
        if delta < 0:
            if ag.sleeping:
                ag.sleeping = False  # pain interrupts sleep with no reward
            if ag.health <= 0 and st.death_cause is None:
                st.death_cause = cause or "collapsed"

    def _unlock(self, name: str) -> None:
        st = self.state
        if name not in st.unlocked:
            st.unlocked.add(name)
            self._recent_unlocks.append(name)

    # --- observation ---

    def observe(self) -> Observation:
        st = self.state
        ag = st.agent
        rows = []
        for dy in range(params.VIEW_DY, -params.VIEW_DY - 1, -1):
            row = []
            for dx in range(-params.VIEW_DX, params.VIEW_DX + 1):
                x, y = ag.x + dx, ag.y + dy
                name = st.material(x, y)
                obj = None
                if name is not None and (x, y) != ag.pos:
                    ent = st.entity_at.get((x, y))
                    if ent is not None:
                        obj = ent.display_name()
                    else:
                        obj = st.objects.get((x, y))
                row.append(Cell(name, obj))
            rows.append(tuple(row))
        return Observation(
            view=tuple(rows),
            facing=ag.facing,
            standing=st.material(ag.x, ag.y),
            health=ag.health,
            food=ag.food,
            drink=ag.drink,
            energy=ag.energy,
            inventory=ag.inventory_view(),
            last_action=st.last_action,
            sleeping=ag.sleeping,
        )

    @property
    def episode_reward(self) -> float:
        return self.reward_tenths / 10.0
