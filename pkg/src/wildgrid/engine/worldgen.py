"""Procedural map generation.

Layout comes in three passes: a value-noise fabric of base terrain
(sand, grass, stone with path tunnels), sprinkled special materials that
must touch their configured neighbour material, and creature seeding.
Placement is constraint-checked; impossible configs fail loudly after a
bounded number of attempts.
"""

from __future__ import annotations

from collections import deque

from ..config.model import WorldConfig
from ..items import BASE_MATERIALS, SPECIAL_MATERIALS
from . import params
from .rng import Dice
from .state import Entity, GameState, NEIGHBOUR_OFFSETS

CARDINALS = ((-1, 0), (1, 0), (0, -1), (0, 1))


class GenerationError(RuntimeError):
    """Raised when no map satisfying the config's constraints was found."""


def _smooth(t: float) -> float:
    return t * t * (3.0 - 2.0 * t)


def _noise_field(rng: Dice, size: int, scale: int) -> list[list[float]]:
    """Bilinear value noise on a coarse lattice."""
    n = size // scale + 2
    lattice = [[rng.random() for _ in range(n)] for _ in range(n)]
    field = [[0.0] * size for _ in range(size)]
    for y in range(size):
        gy, ry = divmod(y, scale)
        ty = _smooth(ry / scale)
        for x in range(size):
            gx, rx = divmod(x, scale)
            tx = _smooth(rx / scale)
            v00 = lattice[gy][gx]
            v10 = lattice[gy][gx + 1]
            v01 = lattice[gy + 1][gx]
            v11 = lattice[gy + 1][gx + 1]
            top = v00 + (v10 - v00) * tx
            bot = v01 + (v11 - v01) * tx
            field[y][x] = top + (bot - top) * ty
    return field


def _base_fabric(rng: Dice, size: int) -> list[list[str]]:
    coarse = _noise_field(rng, size, 16)
    fine = _noise_field(rng, size, 8)
    tunnel = _noise_field(rng, size, 8)

    elevation = [
        [0.65 * coarse[y][x] + 0.35 * fine[y][x] for x in range(size)]
        for y in range(size)
    ]
    flat = sorted(v for row in elevation for v in row)
    sand_cut = flat[int(params.SAND_FRACTION * len(flat))]
    stone_cut = flat[int((params.SAND_FRACTION + params.GRASS_FRACTION) * len(flat))]

    mat = [["grass"] * size for _ in range(size)]
    stone_cells = []
    for y in range(size):
        for x in range(size):
            v = elevation[y][x]
            if v < sand_cut:
                mat[y][x] = "sand"
            elif v >= stone_cut:
                mat[y][x] = "stone"
                stone_cells.append((tunnel[y][x], x, y))

    # Carve path tunnels through the lowest-tunnel-value stone cells.
    stone_cells.sort()
    n_path = int(len(stone_cells) * params.PATH_FRACTION_OF_STONE)
    for _, x, y in stone_cells[:n_path]:
        mat[y][x] = "path"
    return mat


def _host_order(cfg: WorldConfig) -> tuple[list[str], list[list[str]]]:
    """Specials sorted so hosts come first; unresolved cycles last."""
    hosts = {s: cfg.neighbour(s) for s in SPECIAL_MATERIALS}
    placed = set(BASE_MATERIALS)
    order: list[str] = []
    pending = list(SPECIAL_MATERIALS)
    while pending:
        ready = [s for s in pending if hosts[s] in placed]
        if not ready:
            break
        for s in ready:
            order.append(s)
            placed.add(s)
            pending.remove(s)
    cycles: list[list[str]] = []
    while pending:
        # Walk one host chain to extract a cycle.
        seen: list[str] = []
        s = pending[0]
        while s not in seen:
            seen.append(s)
            s = hosts[s]
        cycle = seen[seen.index(s):]
        cycles.append(cycle)
        for member in cycle:
            pending.remove(member)
            placed.add(member)
        ready = [s for s in pending if hosts[s] in placed]
        for s in ready:
            order.append(s)
            placed.add(s)
            pending.remove(s)
    return order, cycles


def traversable_materials(cfg: WorldConfig) -> set[str]:
    """Materials the agent can eventually stand on.

    Fixpoint: a cell is passable when it is walkable and harmless, when
    mining it leaves a passable material, or when a placeable material
    that is itself passable may overwrite it.
    """
    from ..items import MATERIALS

    trav: set[str] = set()
    changed = True
    while changed:
        changed = False
        for name in MATERIALS:
            if name in trav:
                continue
            eff = cfg.effect(name)
            ok = eff.walkable and not eff.dieable
            if not ok:
                rule = cfg.collect_rule(name)
                ok = rule is not None and rule.leaves.material in trav
            if not ok:
                for place in cfg.place:
                    if (
                        place.name in MATERIALS
                        and place.name in trav
                        and name in place.where
                    ):
                        ok = True
                        break
            if ok:
                trav.add(name)
                changed = True
    return trav


class _Generator:
    def __init__(self, cfg: WorldConfig, state: GameState) -> None:
        self.cfg = cfg
        self.state = state
        self.size = state.size
        self.rng = state.rng
        self.trav = traversable_materials(cfg)

    def material(self, x: int, y: int):
        if 0 <= x < self.size and 0 <= y < self.size:
            return self.state.mat[y][x]
        return None

    def _standable(self, name: str) -> bool:
        """A cell the agent can occupy or eventually clear away."""
        return name in self.trav

    def _conversion_ok(self, x: int, y: int, special: str) -> bool:
        host = self.cfg.neighbour(special)
        host_seen = False
        standable = False
        for dx, dy in NEIGHBOUR_OFFSETS:
            n = self.material(x + dx, y + dy)
            if n == host:
                host_seen = True
        if not host_seen:
            return False
        for dx, dy in CARDINALS:
            n = self.material(x + dx, y + dy)
            if n is not None and self._standable(n):
                standable = True
                break
        if not standable:
            return False
        # Converting this cell must not strand a neighbouring special.
        here = self.material(x, y)
        for dx, dy in NEIGHBOUR_OFFSETS:
            nx, ny = x + dx, y + dy
            n = self.material(nx, ny)
            if n not in SPECIAL_MATERIALS:
                continue
            if here != self.cfg.neighbour(n):
                continue
            others = sum(
                1
                for ddx, ddy in NEIGHBOUR_OFFSETS
                if (nx + ddx, ny + ddy) != (x, y)
                and self.material(nx + ddx, ny + ddy) == self.cfg.neighbour(n)
            )
            if others == 0:
                return False
        return True

    def _candidates(self, special: str) -> list[tuple[int, int]]:
        host = self.cfg.neighbour(special)
        out = []
        for y in range(self.size):
            for x in range(self.size):
                here = self.state.mat[y][x]
                if here not in BASE_MATERIALS:
                    continue
                if host in BASE_MATERIALS and here != host:
                    continue
                if host not in BASE_MATERIALS:
                    near_host = any(
                        self.material(x + dx, y + dy) == host
                        for dx, dy in NEIGHBOUR_OFFSETS
                    )
                    if not near_host:
                        continue
                out.append((x, y))
        return out

    def sprinkle(self, special: str, count: int) -> int:
        cells = self._candidates(special)
        self.rng.shuffle(cells)
        placed = 0
        for x, y in cells:
            if placed >= count:
                break
            if self._conversion_ok(x, y, special):
                self.state.mat[y][x] = special
                placed += 1
        return placed

    def seed_cycle(self, cycle: list[str]) -> bool:
        """Plant one instance of each cycle member around a tight ring."""
        ring = [(0, 0), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1)]
        spots = ring[: len(cycle)]
        anchors = [
            (x, y)
            for y in range(2, self.size - 2)
            for x in range(2, self.size - 2)
        ]
        self.rng.shuffle(anchors)
        for ax, ay in anchors[:400]:
            cells = [(ax + dx, ay + dy) for dx, dy in spots]
            if all(self.material(x, y) in BASE_MATERIALS for x, y in cells):
                edge_ok = all(
                    any(
                        self.material(x + dx, y + dy) is not None
                        and self._standable(self.material(x + dx, y + dy))
                        and (x + dx, y + dy) not in cells
                        for dx, dy in CARDINALS
                    )
                    for x, y in cells
                )
                if not edge_ok:
                    continue
                for (x, y), name in zip(cells, cycle):
                    self.state.mat[y][x] = name
                return True
        return False

    # --- spawn and reachability ---

    def walkable_safe(self, x: int, y: int) -> bool:
        name = self.material(x, y)
        if name is None:
            return False
        eff = self.cfg.effect(name)
        return eff.walkable and not eff.dieable

    def component_from(self, start: tuple[int, int]) -> set[tuple[int, int]]:
        seen = {start}
        queue = deque([start])
        while queue:
            x, y = queue.popleft()
            for dx, dy in CARDINALS:
                nxt = (x + dx, y + dy)
                if nxt not in seen and self.walkable_safe(*nxt):
                    seen.add(nxt)
                    queue.append(nxt)
        return seen

    def reach_region(self, start: tuple[int, int]) -> set[tuple[int, int]]:
        """Cells reachable by walking, mining through, or paving over."""
        seen = {start}
        queue = deque([start])
        while queue:
            x, y = queue.popleft()
            for dx, dy in CARDINALS:
                nx, ny = x + dx, y + dy
                if (nx, ny) in seen:
                    continue
                name = self.material(nx, ny)
                if name is not None and name in self.trav:
                    seen.add((nx, ny))
                    queue.append((nx, ny))
        return seen

    def pick_spawn(self) -> tuple[int, int]:
        spawn_mat = self.cfg.spawn_material()
        options = [
            (x, y)
            for y in range(self.size)
            for x in range(self.size)
            if self.state.mat[y][x] == spawn_mat and self.walkable_safe(x, y)
        ]
        if not options:
            raise GenerationError(
                f"no walkable spawn cell of material {spawn_mat!r}"
            )
        best = None
        best_key = None
        centre = self.size // 2
        sized: dict[tuple[int, int], int] = {}
        for pos in options:
            if pos not in sized:
                comp = self.component_from(pos)
                for p in comp:
                    sized[p] = len(comp)
            key = (-sized[pos], abs(pos[0] - centre) + abs(pos[1] - centre), pos)
            if best_key is None or key < best_key:
                best_key = key
                best = pos
        return best

    def reachable_specials(self, region: set[tuple[int, int]], special: str) -> int:
        count = 0
        for y in range(self.size):
            for x in range(self.size):
                if self.state.mat[y][x] != special:
                    continue
                if any((x + dx, y + dy) in region for dx, dy in CARDINALS):
                    count += 1
        return count

    def force_reachable(self, region: set[tuple[int, int]], special: str, need: int) -> int:
        """Convert host cells on the component's rim to close a shortfall."""
        placed = 0
        cells = self._candidates(special)
        boundary = [
            (x, y)
            for x, y in cells
            if any((x + dx, y + dy) in region for dx, dy in CARDINALS)
        ]
        # Prefer cells outside the walkable region so it is not carved up.
        self.rng.shuffle(boundary)
        boundary.sort(key=lambda p: p in region)
        for x, y in boundary:
            if placed >= need:
                break
            if self._conversion_ok(x, y, special):
                self.state.mat[y][x] = special
                placed += 1
        return placed

    # --- creatures ---

    def seed_creatures(self, comp: set[tuple[int, int]]) -> None:
        state = self.state
        ax, ay = state.agent.pos
        cows = [
            (x, y)
            for x, y in sorted(comp)
            if max(abs(x - ax), abs(y - ay)) >= 2 and not state.occupied(x, y)
        ]
        self.rng.shuffle(cows)
        for x, y in cows[: params.COW_COUNT]:
            state.add_entity(Entity("cow", x, y, params.CREATURE_HP["cow"]))

        lairs = []
        fallback = []
        for y in range(self.size):
            for x in range(self.size):
                if not self.walkable_safe(x, y) or state.occupied(x, y):
                    continue
                d = max(abs(x - ax), abs(y - ay))
                if d < 8:
                    continue
                if self.state.mat[y][x] == "path":
                    lairs.append((x, y))
                else:
                    fallback.append((x, y))
        self.rng.shuffle(lairs)
        self.rng.shuffle(fallback)
        hp = params.CREATURE_HP["skeleton"]
        for x, y in (lairs + fallback)[: params.SKELETON_COUNT]:
            state.add_entity(Entity("skeleton", x, y, hp))


def generate(cfg: WorldConfig, seed: int) -> GameState:
    """Build a playable start state; deterministic in (cfg, seed)."""
    last_error = "no attempt made"
    for attempt in range(params.GENERATION_RETRIES):
        state = GameState(cfg, seed)
        state.rng = Dice(seed * 1000003 + attempt)
        gen = _Generator(cfg, state)
        state.mat = _base_fabric(state.rng, state.size)

        order, cycles = _host_order(cfg)
        ok = True
        for cycle in cycles:
            if not gen.seed_cycle(cycle):
                last_error = f"could not seed dependency cycle {cycle}"
                ok = False
                break
        if not ok:
            continue
        for special in order + [s for cycle in cycles for s in cycle]:
            target = params.SPECIAL_TARGETS[special]
            placed = gen.sprinkle(special, target)
            if placed < min(params.REACHABLE_SPECIAL_MIN, target):
                last_error = f"only placed {placed} cells of {special!r}"
                ok = False
                break
        if not ok:
            continue

        try:
            spawn = gen.pick_spawn()
        except GenerationError as err:
            last_error = str(err)
            continue
        state.agent.x, state.agent.y = spawn
        region = gen.reach_region(spawn)

        for special in SPECIAL_MATERIALS:
            need = min(params.REACHABLE_SPECIAL_MIN, params.SPECIAL_TARGETS[special])
            have = gen.reachable_specials(region, special)
            if have < need:
                gen.force_reachable(region, special, need - have)
        region = gen.reach_region(spawn)
        shortfalls = [
            s
            for s in SPECIAL_MATERIALS
            if gen.reachable_specials(region, s)
            < min(params.REACHABLE_SPECIAL_MIN, params.SPECIAL_TARGETS[s])
        ]
        if shortfalls:
            last_error = f"specials unreachable from spawn: {shortfalls}"
            continue

        gen.seed_creatures(gen.component_from(spawn))
        return state

    raise GenerationError(
        f"world generation failed after {params.GENERATION_RETRIES} attempts: "
        f"{last_error}"
    )
