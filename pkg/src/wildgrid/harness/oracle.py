"""Scripted ground-truth agent: plans over the rule graph and pathfinds.

The oracle mirrors the episode in a shadow engine seeded identically, so
it always knows the true map, its true position and every creature. It
works through the feasible achievements in dependency order, resolving
missing prerequisites recursively from the world's own rules.
"""

from __future__ import annotations

import heapq
import logging
from collections import Counter, deque
from typing import Optional

from ..config.model import CollectRule, WorldConfig
from ..describe import TextFrame
from ..engine import Engine, MAKE_ACTIONS, PLACE_ACTIONS, params
from ..engine.state import Observation
from ..items import ACHIEVEMENTS, LIQUIDS, MATERIALS, TOOLS
from ..verify import VerificationReport, closure_achievements, verify

log = logging.getLogger(__name__)

MOVES = {
    "move_up": (0, 1),
    "move_down": (0, -1),
    "move_left": (-1, 0),
    "move_right": (1, 0),
}
MOVE_FOR = {vec: name for name, vec in MOVES.items()}

# worked first to last; recursion fills in whatever a world reorders
TASK_ORDER = (
    "collect_wood",
    "place_table",
    "make_wood_pickaxe",
    "make_wood_sword",
    "collect_sapling",
    "place_plant",
    "wake_up",
    "collect_drink",
    "collect_stone",
    "place_stone",
    "place_furnace",
    "make_stone_pickaxe",
    "make_stone_sword",
    "collect_coal",
    "kill_cow",
    "collect_iron",
    "make_iron_pickaxe",
    "make_iron_sword",
    "collect_diamond",
    "defeat_zombie",
    "defeat_skeleton",
    "eat_plant",
)

KILL_TARGET = {"kill_cow": "cow", "defeat_zombie": "zombie", "defeat_skeleton": "skeleton"}

TASK_TIMEOUT = 400  # steps on one task before it rotates to the back
TASK_ATTEMPTS = 6  # rotations before a task counts as blocked
MINE_COST = 4  # extra path cost for digging through a removable cell
PAVE_COST = 7  # extra path cost for paving an unwalkable cell
HURT_COST = 8  # extra path cost for cells that hurt to walk on


class InfeasibleWorld(ValueError):
    """The oracle refuses configs that fail verification."""


class OracleAgent:
    wants_text = False

    def __init__(
        self,
        cfg: WorldConfig,
        report: Optional[VerificationReport] = None,
        check: bool = True,
    ):
        if check:
            if report is None:
                report = verify(cfg, seed=0)
            failed = [
                name
                for name in ("feasibility", "accessibility", "balance", "supply")
                if not getattr(report, name).passed
            ]
            if failed:
                raise InfeasibleWorld(f"world fails verification: {', '.join(failed)}")
        self.cfg = cfg
        self.feasible = closure_achievements(cfg)
        # item -> collect rules that can yield it, surest first
        self.sources: dict[str, list[CollectRule]] = {}
        for rule in cfg.collect:
            for item, yield_ in rule.receive:
                if yield_.probability > 0 and item != "drink":
                    self.sources.setdefault(item, []).append(rule)
        for rules in self.sources.values():
            rules.sort(key=lambda r: -max(y.probability for _, y in r.receive))
        self.drink_targets = tuple(
            rule.target
            for rule in cfg.collect
            if any(item == "drink" for item, _ in rule.receive)
        )
        # what each liquid actually does: some worlds poison or repurpose them
        specs = [(t, cfg.drink_spec(t)) for t in self.drink_targets]
        self.hydrators = sorted(
            (pair for pair in specs if pair[1].inc_drink_func > 0),
            key=lambda pair: -pair[1].inc_health_func,
        )
        self.drink_foods = [p for p in specs if p[1].inc_food_func > 0]
        self.drink_healers = [p for p in specs if p[1].inc_health_func > 0]
        self.shadow: Optional[Engine] = None
        self.tasks: deque[str] = deque()
        self.blocked: list[str] = []

    # --- episode wiring ---

    def on_episode_start(self, world: str, seed: int) -> None:
        self.shadow = Engine(self.cfg, seed)
        self.shadow.reset()
        self.tasks = deque(t for t in TASK_ORDER if t in self.feasible)
        self.blocked = []
        self.task_steps = 0
        self.attempts: Counter[str] = Counter()
        self.idle = 0

    def on_episode_end(self, trajectory) -> None:
        pass

    def act(self, obs: Observation, frame: Optional[TextFrame]) -> str:
        action = self._decide()
        st = self.shadow.state
        if st is not None and not st.done:
            self.shadow.step(action)
        return action

    # --- decision loop ---

    def _decide(self) -> str:
        st = self.shadow.state
        ag = st.agent
        if ag.sleeping:
            return "noop"
        action = self._maintenance()
        if action:
            return action
        while self.tasks:
            task = self.tasks[0]
            if task in st.unlocked:
                self.tasks.popleft()
                self.task_steps = 0
                continue
            if self.task_steps >= TASK_TIMEOUT:
                self._rotate(task)
                continue
            action = self._pursue(task)
            if action is None:
                self._rotate(task)
                continue
            self.task_steps += 1
            return action
        # queue exhausted; idle out so the episode wraps up quickly
        self.idle += 1
        return "noop"

    def _rotate(self, task: str) -> None:
        self.tasks.popleft()
        self.task_steps = 0
        self.attempts[task] += 1
        if self.attempts[task] >= TASK_ATTEMPTS:
            self.blocked.append(task)
            log.warning("oracle: task %s blocked after %d attempts", task, TASK_ATTEMPTS)
        else:
            self.tasks.append(task)

    def _maintenance(self) -> Optional[str]:
        st = self.shadow.state
        ag = st.agent
        action = self._handle_threats()
        if action:
            return action
        if ag.energy <= 4:
            return "sleep"  # threats were just cleared, so dozing is safe
        if ag.food <= 7:
            action = self._eat_adjacent()
            if action:
                return action
        if self._sip_worthwhile():
            return "do"  # already at the pool; top up before leaving
        if ag.health <= 4:
            action = self._pursue_liquid(self.drink_healers)
            if action:
                return action
        if ag.drink <= 3:
            action = self._pursue_drink()
            if action:
                return action
        if ag.food <= 6:
            action = self._pursue_food()
            if action:
                return action
        if ag.food <= 7:
            action = self._farm()
            if action:
                return action
        return None

    def _farm(self) -> Optional[str]:
        """Keep a couple of plants growing so food never runs dry."""
        if "place_plant" not in self.feasible:
            return None
        if not self.cfg.npc_spec("plant").eatable:
            return None
        st = self.shadow.state
        if any(e.kind == "plant" for e in st.entities):
            return None
        cows = sum(
            1 for e in st.entities if self.cfg.npc_spec(e.kind).inc_food_func > 0
        )
        if cows >= 3:
            return None  # hunting stays cheaper while herds last
        return self._ensure_place("plant", frozenset())

    def _sip_worthwhile(self) -> bool:
        """Keep drinking from the pool in front while it still pays off."""
        st = self.shadow.state
        ag = st.agent
        fx, fy = ag.front()
        name = st.material(fx, fy)
        if name not in self.drink_targets or st.occupied(fx, fy):
            return False
        rule = self.cfg.collect_rule(name)
        if not all(self._held(t) >= n for t, n in rule.require):
            return False
        spec = self.cfg.drink_spec(name)
        costs_health = spec.inc_health_func < 0
        if costs_health and ag.health < 5:
            return False
        if spec.inc_drink_func > 0:
            if ag.drink < 8 and not costs_health:
                return True
            if ag.drink <= 4 and costs_health:
                return True
        if spec.inc_food_func > 0 and ag.food < 8 and not costs_health:
            return True
        if spec.inc_health_func > 0 and ag.health < 8:
            if spec.inc_drink_func < 0 and ag.drink <= 2:
                return False
            if spec.inc_food_func < 0 and ag.food <= 2:
                return False
            return True
        return False

    def _pursue_liquid(self, pool) -> Optional[str]:
        """Head for the best liquid in `pool` that will not backfire."""
        ag = self.shadow.state.agent
        for target, spec in pool:
            if spec.inc_health_func < 0 and ag.health < 5:
                continue
            if spec.inc_drink_func < 0 and ag.drink <= 2:
                continue
            if spec.inc_food_func < 0 and ag.food <= 2:
                continue
            rule = self.cfg.collect_rule(target)
            if not all(self._held(t) >= n for t, n in rule.require):
                continue
            action = self._goto_and_do({target})
            if action:
                return action
        return None

    def _eat_adjacent(self) -> Optional[str]:
        """Free meal: an eatable creature in an adjacent cell."""
        st = self.shadow.state
        ag = st.agent
        for dx, dy in MOVES.values():
            pos = (ag.x + dx, ag.y + dy)
            ent = st.entity_at.get(pos)
            if ent is None:
                continue
            spec = self.cfg.npc_spec(ent.kind)
            if not spec.eatable or spec.inc_food_func <= 0:
                continue
            if spec.eat_health_damage_func < 0 and st.agent.health < 5:
                continue  # this meal bites back
            if ent.kind == "plant" and ent.ripeness < params.PLANT_RIPEN_TICKS:
                continue
            return self._interact({pos}, "do")
        return None

    def _handle_threats(self) -> Optional[str]:
        """Fight or flee creatures that can hurt us before they land hits."""
        st = self.shadow.state
        ag = st.agent
        threats = []
        for ent in st.entities:
            spec = self.cfg.npc_spec(ent.kind)
            harmful = (spec.closable and spec.closable_health_damage_func < 0) or (
                spec.arrowable and spec.arrow_damage_func < 0
            )
            if not harmful:
                continue
            d = max(abs(ent.x - ag.x), abs(ent.y - ag.y))
            if d <= 4:
                threats.append((d, ent))
        if not threats:
            return None
        threats.sort(key=lambda pair: pair[0])
        d, ent = threats[0]
        spec = self.cfg.npc_spec(ent.kind)
        killable = spec.eatable or spec.defeatable
        if killable and (d <= 2 or ag.health > 4):
            return self._interact({ent.pos}, "do")
        # too weak to trade hits; widen the gap
        options = [
            (name, (ag.x + dx, ag.y + dy))
            for name, (dx, dy) in MOVES.items()
            if self._enterable(ag.x + dx, ag.y + dy)
        ]
        if not options:
            return None
        away = max(
            options,
            key=lambda pair: min(
                max(abs(pair[1][0] - e.x), abs(pair[1][1] - e.y)) for _, e in threats
            ),
        )
        return away[0]

    def _pursue(self, task: str) -> Optional[str]:
        if task.startswith("collect_"):
            item = task[len("collect_") :]
            if item == "drink":
                return self._pursue_drink()
            return self._ensure_item(item, self._held(item) + 1, frozenset())
        if task.startswith("place_"):
            return self._ensure_place(task[len("place_") :], frozenset())
        if task.startswith("make_"):
            return self._ensure_make(task[len("make_") :], frozenset())
        if task in KILL_TARGET:
            return self._pursue_kill(KILL_TARGET[task])
        if task == "wake_up":
            return "sleep"
        if task == "eat_plant":
            return self._pursue_eat_plant()
        return None

    # --- inventory goals ---

    def _held(self, item: str) -> int:
        return self.shadow.state.agent.count(item)

    def _ensure_item(self, item: str, count: int, guard: frozenset[str]) -> Optional[str]:
        """Next action toward holding `count` of `item`, or None if stuck."""
        if self._held(item) >= count or item in guard:
            return None
        guard = guard | {item}
        if item in TOOLS:
            action = self._ensure_make(item, guard)
            if action:
                return action
        for rule in self.sources.get(item, ()):
            action = self._work_rule(rule, guard)
            if action:
                return action
        return None

    def _work_rule(self, rule: CollectRule, guard: frozenset[str]) -> Optional[str]:
        """Satisfy the rule's tool requirements, then go mine its target."""
        for tool, need in rule.require:
            if self._held(tool) < need:
                action = self._ensure_item(tool, need, guard)
                if action:
                    return action
                if self._held(tool) < need:
                    return None
        return self._goto_and_do({rule.target})

    def _ensure_make(self, tool: str, guard: frozenset[str]) -> Optional[str]:
        rule = self.cfg.make_rule(tool)
        if rule is None:
            return None
        for station in rule.nearby:
            if not self._station_cells(station):
                return self._ensure_place(station, guard)
        for item, need in rule.uses:
            if self._held(item) < need:
                action = self._ensure_item(item, need, guard)
                if action:
                    return action
                if self._held(item) < need:
                    return None
        spot = self._craft_spot(rule.nearby)
        if spot is None:
            return None
        ag = self.shadow.state.agent
        if (ag.x, ag.y) == spot:
            return f"make_{tool}"
        return self._step_along(self._path_to_cells({spot}))

    def _ensure_place(self, name: str, guard: frozenset[str]) -> Optional[str]:
        rule = self.cfg.place_rule(name)
        if rule is None:
            return None
        for item, need in rule.uses:
            if self._held(item) < need:
                action = self._ensure_item(item, need, guard)
                if action:
                    return action
                if self._held(item) < need:
                    return None
        spots = self._place_spots(rule.where)
        if not spots:
            return None
        return self._goto_and_act(spots, f"place_{name}")

    # --- map reading ---

    def _station_cells(self, kind: str) -> list[tuple[int, int]]:
        st = self.shadow.state
        return [pos for pos, k in st.objects.items() if k == kind]

    def _craft_spot(self, stations: tuple[str, ...]) -> Optional[tuple[int, int]]:
        """Nearest standable cell within reach of one instance of each station."""
        st = self.shadow.state
        ag = st.agent
        groups = [self._station_cells(s) for s in stations]
        if not groups:
            return (ag.x, ag.y)
        if any(not g for g in groups):
            return None
        best = None
        for y in range(st.size):
            for x in range(st.size):
                if not self._enterable(x, y) and (x, y) != ag.pos:
                    continue
                ok = all(
                    any(max(abs(x - sx), abs(y - sy)) <= 2 for sx, sy in group)
                    for group in groups
                )
                if not ok:
                    continue
                d = abs(x - ag.x) + abs(y - ag.y)
                if best is None or d < best[0]:
                    best = (d, (x, y))
        return best[1] if best else None

    def _place_spots(self, where: tuple[str, ...]) -> set[tuple[int, int]]:
        """Unoccupied cells whose material accepts the placement."""
        st = self.shadow.state
        spots = set()
        stations = list(st.objects.keys())
        for y in range(st.size):
            for x in range(st.size):
                if st.material(x, y) not in where or st.occupied(x, y):
                    continue
                spots.add((x, y))
        if stations:
            # keep future crafting spots shared: prefer cells near stations
            near = {
                s
                for s in spots
                if any(max(abs(s[0] - ox), abs(s[1] - oy)) <= 3 for ox, oy in stations)
            }
            if near:
                return near
        return spots

    def _enterable(self, x: int, y: int) -> bool:
        st = self.shadow.state
        name = st.material(x, y)
        if name is None:
            return False
        eff = self.cfg.effect(name)
        if not eff.walkable or eff.dieable:
            return False
        if eff.walk_health < 0 and st.agent.health <= 2:
            return False  # a sore step is fine, a lethal one is not
        return not st.occupied(x, y)

    def _entry_cost(self, x: int, y: int) -> int:
        eff = self.cfg.effect(self.shadow.state.material(x, y))
        return 1 + (HURT_COST if eff.walk_health < 0 else 0)

    def _removable(self, x: int, y: int) -> bool:
        """Cell we could mine through: rule satisfied now, leaves standable."""
        st = self.shadow.state
        name = st.material(x, y)
        if name is None or st.occupied(x, y):
            return False
        rule = self.cfg.collect_rule(name)
        if rule is None or rule.leaves is None:
            return False
        left = self.cfg.effect(rule.leaves.material)
        if not left.walkable or left.dieable:
            return False
        return all(self._held(tool) >= need for tool, need in rule.require)

    def _paveable(self, x: int, y: int) -> Optional[str]:
        """Material we could place here to make the cell standable."""
        st = self.shadow.state
        name = st.material(x, y)
        if name is None or st.occupied(x, y):
            return None
        for placed in MATERIALS:
            rule = self.cfg.place_rule(placed)
            if rule is None or rule.kind != "material" or name not in rule.where:
                continue
            eff = self.cfg.effect(placed)
            if not eff.walkable or eff.dieable:
                continue
            if all(self._held(item) >= need for item, need in rule.uses):
                return placed
        return None

    # --- pathing ---

    def _path_to_cells(self, goals: set[tuple[int, int]]) -> Optional[list[tuple[int, int]]]:
        """Dijkstra over standable cells; digging and paving cost extra.

        Returns the cell sequence from the agent (exclusive) to a goal.
        """
        st = self.shadow.state
        start = st.agent.pos
        if start in goals:
            return []
        dist = {start: 0}
        prev: dict[tuple[int, int], tuple[int, int]] = {}
        heap = [(0, start)]
        found = None
        while heap:
            d, pos = heapq.heappop(heap)
            if d > dist.get(pos, 1 << 30):
                continue
            if pos in goals:
                found = pos
                break
            x, y = pos
            for dx, dy in MOVES.values():
                nxt = (x + dx, y + dy)
                if nxt in dist and dist[nxt] <= d + 1:
                    continue
                if self._enterable(*nxt):
                    cost = self._entry_cost(*nxt)
                elif self._removable(*nxt):
                    cost = 1 + MINE_COST
                elif self._paveable(*nxt):
                    cost = 1 + PAVE_COST
                elif nxt in goals:
                    cost = 1  # arrive logically; caller interacts, not enters
                else:
                    continue
                if d + cost < dist.get(nxt, 1 << 30):
                    dist[nxt] = d + cost
                    prev[nxt] = pos
                    heapq.heappush(heap, (d + cost, nxt))
        if found is None:
            return None
        path = [found]
        while path[-1] != start:
            path.append(prev[path[-1]])
        path.reverse()
        return path[1:]

    def _step_along(self, path: Optional[list[tuple[int, int]]]) -> Optional[str]:
        """Emit the move for the first path cell, clearing it first if needed."""
        if path is None:
            return None
        if not path:
            return "noop"
        st = self.shadow.state
        ag = st.agent
        nx, ny = path[0]
        direction = MOVE_FOR[(nx - ag.x, ny - ag.y)]
        if self._enterable(nx, ny):
            return direction
        if self._removable(nx, ny):
            if ag.front() == (nx, ny):
                return "do"
            return self._face_move(nx, ny)
        placed = self._paveable(nx, ny)
        if placed:
            if ag.front() == (nx, ny):
                return f"place_{placed}"
            return self._face_move(nx, ny)
        ent = st.entity_at.get((nx, ny))
        if ent is not None:
            spec = self.cfg.npc_spec(ent.kind)
            if ag.front() == (nx, ny) and (spec.eatable or spec.defeatable):
                return "do"
            return self._face_move(nx, ny)
        return None

    def _face_move(self, x: int, y: int) -> Optional[str]:
        """Move that ends with (x, y) in front without stepping into harm."""
        ag = self.shadow.state.agent
        delta = (x - ag.x, y - ag.y)
        if self._turn_is_safe(x, y):
            return MOVE_FOR[delta]
        back = (ag.x - delta[0], ag.y - delta[1])
        if self._enterable(*back):
            # step away, then the return step faces the cell
            return MOVE_FOR[(back[0] - ag.x, back[1] - ag.y)]
        return None

    def _goto_and_do(self, target_materials: set[str]) -> Optional[str]:
        st = self.shadow.state
        targets = {
            (x, y)
            for y in range(st.size)
            for x in range(st.size)
            if st.material(x, y) in target_materials and not st.occupied(x, y)
        }
        return self._interact(targets, "do")

    def _goto_and_act(self, targets: set[tuple[int, int]], act: str) -> Optional[str]:
        return self._interact(targets, act)

    def _interact(self, targets: set[tuple[int, int]], act: str) -> Optional[str]:
        """Walk adjacent to any target cell, face it, then run `act` on it."""
        if not targets:
            return None
        st = self.shadow.state
        ag = st.agent
        fx, fy = ag.front()
        if (fx, fy) in targets:
            return act
        adjacent = [
            (tx, ty)
            for tx, ty in targets
            if abs(tx - ag.x) + abs(ty - ag.y) == 1
        ]
        fallback = None
        for tx, ty in adjacent:
            delta = (tx - ag.x, ty - ag.y)
            direction = MOVE_FOR[delta]
            if not self._enterable(tx, ty):
                if self._turn_is_safe(tx, ty):
                    return direction  # bump only turns us toward it
                continue
            beyond = (tx + delta[0], ty + delta[1])
            if beyond in targets:
                return direction  # enter; the next target lines up in front
            back = (ag.x - delta[0], ag.y - delta[1])
            if fallback is None and self._enterable(*back):
                # step away, then re-enter facing the target
                fallback = MOVE_FOR[(back[0] - ag.x, back[1] - ag.y)]
        if fallback:
            return fallback
        path = self._path_to_cells(set(targets))
        if path and path[-1] in targets:
            path = path[:-1]  # stop next to the target, not on it
            if not path:
                return None  # already adjacent with no safe way to face it
        return self._step_along(path)

    def _turn_is_safe(self, x: int, y: int) -> bool:
        """Bumping toward (x, y) to face it must not walk into harm."""
        st = self.shadow.state
        name = st.material(x, y)
        if name is None:
            return True
        eff = self.cfg.effect(name)
        if not eff.walkable or st.occupied(x, y):
            return True  # blocked cells only turn us
        if eff.dieable:
            return False
        return eff.walk_health >= 0 or st.agent.health > 2

    # --- creatures, drink, plants ---

    def _pursue_kill(self, kind: str) -> Optional[str]:
        st = self.shadow.state
        spec = self.cfg.npc_spec(kind)
        if not (spec.eatable or spec.defeatable):
            return None
        if spec.eatable and spec.eat_health_damage_func < 0 and st.agent.health < 5:
            return None  # wait out the regen before biting this one
        targets = {e.pos for e in st.entities if e.kind == kind}
        if not targets:
            if kind == "zombie":
                return self._wander()  # spawns arrive at night on their own
            return self._wander()
        return self._interact(targets, "do")

    def _pursue_drink(self) -> Optional[str]:
        action = self._pursue_liquid(self.hydrators)
        if action:
            return action
        # maybe a missing tool stands between us and the tap
        for target, _ in self.hydrators:
            rule = self.cfg.collect_rule(target)
            for tool, need in rule.require:
                if self._held(tool) < need:
                    action = self._ensure_item(tool, need, frozenset())
                    if action:
                        return action
        return None

    def _pursue_food(self) -> Optional[str]:
        st = self.shadow.state
        ripe = {
            e.pos
            for e in st.entities
            if e.kind == "plant" and e.ripeness >= params.PLANT_RIPEN_TICKS
        }
        if ripe and self.cfg.npc_spec("plant").eatable:
            return self._interact(ripe, "do")
        health = st.agent.health
        eatable = set()
        for ent in st.entities:
            if ent.kind == "plant":
                continue
            spec = self.cfg.npc_spec(ent.kind)
            if not spec.eatable or spec.inc_food_func <= 0:
                continue
            if spec.eat_health_damage_func < 0 and health < 5:
                continue
            eatable.add(ent.pos)
        if eatable:
            return self._interact(eatable, "do")
        return self._pursue_liquid(self.drink_foods)

    def _pursue_eat_plant(self) -> Optional[str]:
        st = self.shadow.state
        if not self.cfg.npc_spec("plant").eatable:
            return None
        plants = [e for e in st.entities if e.kind == "plant"]
        ripe = {e.pos for e in plants if e.ripeness >= params.PLANT_RIPEN_TICKS}
        if ripe:
            return self._interact(ripe, "do")
        if plants:
            return "noop"  # ripening; do not trample it
        return self._ensure_place("plant", frozenset())

    def _wander(self) -> str:
        st = self.shadow.state
        ag = st.agent
        options = [
            MOVE_FOR[(dx, dy)]
            for dx, dy in MOVES.values()
            if self._enterable(ag.x + dx, ag.y + dy)
        ]
        if not options:
            return "noop"
        return options[st.tick % len(options)]


def oracle_agent(
    cfg: WorldConfig,
    report: Optional[VerificationReport] = None,
    check: bool = True,
) -> OracleAgent:
    return OracleAgent(cfg, report=report, check=check)
