"""World state containers and the step/observation result types.

Coordinates are (x, y) with y growing northwards ("up" on screen), so
move_up is y+1 and the rendered top row is the highest y in view.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..config.model import WorldConfig
from ..items import INVENTORY_ORDER
from . import params
from .rng import Dice

Vec = tuple[int, int]

# Facing vectors in display coordinates.
DIRECTIONS: dict[str, Vec] = {
    "move_up": (0, 1),
    "move_down": (0, -1),
    "move_left": (-1, 0),
    "move_right": (1, 0),
}

# Absolute neighbour offsets in presentation order:
# W, E, S, N, then SW, SE, NW, NE.
NEIGHBOUR_OFFSETS: tuple[Vec, ...] = (
    (-1, 0), (1, 0), (0, -1), (0, 1),
    (-1, -1), (1, -1), (-1, 1), (1, 1),
)


@dataclass
class Entity:
    """A creature on the object layer."""

    kind: str
    x: int
    y: int
    hp: int
    melee_cooldown: int = 0
    arrow_cooldown: int = 0
    ripeness: int = 0  # plants only

    @property
    def pos(self) -> Vec:
        return (self.x, self.y)

    def display_name(self) -> str:
        if self.kind == "plant" and self.ripeness >= params.PLANT_RIPEN_TICKS:
            return "ripe-plant"
        return self.kind

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "x": self.x,
            "y": self.y,
            "hp": self.hp,
            "melee_cooldown": self.melee_cooldown,
            "arrow_cooldown": self.arrow_cooldown,
            "ripeness": self.ripeness,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Entity":
        return cls(**data)


@dataclass
class AgentState:
    x: int
    y: int
    facing: Vec = (0, -1)  # spawns looking down/south
    health: int = params.MAX_STAT
    food: int = params.MAX_STAT
    drink: int = params.MAX_STAT
    energy: int = params.MAX_STAT
    inventory: dict[str, int] = field(default_factory=dict)
    sleeping: bool = False

    @property
    def pos(self) -> Vec:
        return (self.x, self.y)

    def front(self) -> Vec:
        return (self.x + self.facing[0], self.y + self.facing[1])

    def count(self, item: str) -> int:
        return self.inventory.get(item, 0)

    def add(self, item: str, amount: int = 1) -> None:
        if amount:
            self.inventory[item] = self.inventory.get(item, 0) + amount

    def remove(self, item: str, amount: int = 1) -> None:
        left = self.inventory.get(item, 0) - amount
        if left < 0:
            raise ValueError(f"inventory underflow for {item}")
        if left:
            self.inventory[item] = left
        else:
            self.inventory.pop(item, None)

    def inventory_view(self) -> tuple[tuple[str, int], ...]:
        return tuple(
            (name, self.inventory[name])
            for name in INVENTORY_ORDER
            if self.inventory.get(name, 0) > 0
        )

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "facing": list(self.facing),
            "health": self.health,
            "food": self.food,
            "drink": self.drink,
            "energy": self.energy,
            "inventory": dict(sorted(self.inventory.items())),
            "sleeping": self.sleeping,
        }


@dataclass(frozen=True)
class Cell:
    """One tile of the local view; material None means out of bounds."""

    material: Optional[str]
    obj: Optional[str] = None


@dataclass(frozen=True)
class Observation:
    view: tuple[tuple[Cell, ...], ...]  # rows north to south, cols west to east
    facing: Vec
    standing: str
    health: int
    food: int
    drink: int
    energy: int
    inventory: tuple[tuple[str, int], ...]
    last_action: Optional[str]
    sleeping: bool

    def cell(self, dx: int, dy: int) -> Cell:
        """Look up a view cell by agent-relative offset."""
        row = params.VIEW_DY - dy
        col = dx + params.VIEW_DX
        return self.view[row][col]

    def front_cell(self) -> Cell:
        return self.cell(*self.facing)


@dataclass(frozen=True)
class StepResult:
    observation: Observation
    reward: float
    done: bool
    info: dict


class GameState:
    """Mutable world: material grid, placed objects, creatures, agent."""

    def __init__(self, cfg: WorldConfig, seed: int) -> None:
        self.cfg = cfg
        self.seed = seed
        self.size = params.WORLD_SIZE
        self.rng = Dice(seed)
        self.mat: list[list[str]] = []
        self.objects: dict[Vec, str] = {}  # placed stations by position
        self.entities: list[Entity] = []
        self.entity_at: dict[Vec, Entity] = {}
        self.agent = AgentState(0, 0)
        self.tick = 0
        self.unlocked: set[str] = set()
        self.done = False
        self.death_cause: Optional[str] = None
        self.last_action: Optional[str] = None

    # --- grid helpers ---

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.size and 0 <= y < self.size

    def material(self, x: int, y: int) -> Optional[str]:
        if not self.in_bounds(x, y):
            return None
        return self.mat[y][x]

    def set_material(self, x: int, y: int, name: str) -> None:
        self.mat[y][x] = name

    def occupied(self, x: int, y: int) -> bool:
        """True when a creature, station or the agent blocks the cell."""
        pos = (x, y)
        return (
            pos in self.entity_at
            or pos in self.objects
            or pos == self.agent.pos
        )

    def is_walkable(self, x: int, y: int) -> bool:
        name = self.material(x, y)
        if name is None:
            return False
        return self.cfg.effect(name).walkable

    def add_entity(self, ent: Entity) -> None:
        self.entities.append(ent)
        self.entity_at[ent.pos] = ent

    def remove_entity(self, ent: Entity) -> None:
        self.entities.remove(ent)
        self.entity_at.pop(ent.pos, None)

    def move_entity(self, ent: Entity, x: int, y: int) -> None:
        del self.entity_at[ent.pos]
        ent.x, ent.y = x, y
        self.entity_at[ent.pos] = ent

    def is_night(self) -> bool:
        return self.tick % params.DAY_LENGTH >= params.NIGHT_START

    # --- snapshots ---

    def snapshot(self) -> dict:
        """Full serializable state, used by determinism checks."""
        return {
            "seed": self.seed,
            "tick": self.tick,
            "rng": self.rng.state_key(),
            "grid": ["|".join(row) for row in self.mat],
            "objects": sorted(
                [x, y, kind] for (x, y), kind in self.objects.items()
            ),
            "entities": sorted(
                (e.to_dict() for e in self.entities),
                key=lambda d: (d["x"], d["y"], d["kind"]),
            ),
            "agent": self.agent.to_dict(),
            "unlocked": sorted(self.unlocked),
            "done": self.done,
            "death_cause": self.death_cause,
        }
