"""And-or dependency graph for a world's achievements.

Every question the checks ask ("can the agent ever hold iron?", "is
stone reachable from spawn?") becomes a node. AND nodes list joint
requirements, OR nodes list alternative methods; an AND with no
children is vacuously true, an OR with no children is unsatisfiable.
The graph may contain cycles (that is what deadlock detection hunts).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..config.model import WorldConfig
from ..items import (
    BASE_MATERIALS,
    CREATURES,
    MATERIALS,
    RESOURCES,
    SPECIAL_MATERIALS,
    TOOLS,
)

AND = "and"
OR = "or"


@dataclass
class TechNode:
    name: str
    kind: str  # "and" | "or"
    label: str  # achievement | item | terrain | tool
    children: list["TechNode"] = field(default_factory=list)

    def __repr__(self) -> str:  # cycles forbid the default repr
        return f"TechNode({self.name!r}, {self.kind}, {len(self.children)} children)"


def material_adjacency(cfg: WorldConfig) -> dict[str, set[str]]:
    """Which material regions border each other on generated maps.

    Base terrain forms one connected fabric; each sprinkled special is
    guaranteed a border with its configured host material.
    """
    adj: dict[str, set[str]] = {m: set() for m in MATERIALS}
    for a in BASE_MATERIALS:
        for b in BASE_MATERIALS:
            if a != b:
                adj[a].add(b)
    for s in SPECIAL_MATERIALS:
        host = cfg.neighbour(s)
        adj[s].add(host)
        adj[host].add(s)
    return adj


class _Builder:
    def __init__(self, cfg: WorldConfig) -> None:
        self.cfg = cfg
        self.nodes: dict[str, TechNode] = {}

    def node(self, name: str, kind: str, label: str) -> TechNode:
        found = self.nodes.get(name)
        if found is None:
            found = TechNode(name, kind, label)
            self.nodes[name] = found
        return found

    def item(self, name: str) -> TechNode:
        label = "tool" if name in TOOLS else "item"
        return self.node(f"item:{name}", OR, label)

    def true_leaf(self, name: str, label: str) -> TechNode:
        return self.node(name, AND, label)

    # --- terrain layer ---

    def build_terrain(self) -> None:
        cfg = self.cfg
        for m in MATERIALS:
            passable = self.node(f"passable:{m}", OR, "terrain")
            eff = cfg.effect(m)
            if eff.walkable and not eff.dieable:
                passable.children.append(self.true_leaf(f"walkable:{m}", "terrain"))
            rule = cfg.collect_rule(m)
            if rule is not None and rule.leaves_material() != m:
                clear = self.node(f"clear:{m}", AND, "terrain")
                for tool, _count in rule.require:
                    clear.children.append(self.item(tool))
                clear.children.append(
                    self.node(f"passable:{rule.leaves_material()}", OR, "terrain")
                )
                passable.children.append(clear)
            for place in cfg.place:
                if place.name in MATERIALS and m in place.where:
                    pave = self.node(f"pave:{m}:{place.name}", AND, "terrain")
                    for used, _count in place.uses:
                        pave.children.append(self.item(used))
                    pave.children.append(
                        self.node(f"passable:{place.name}", OR, "terrain")
                    )
                    passable.children.append(pave)

        spawn = cfg.spawn_material()
        adj = material_adjacency(cfg)
        for m in MATERIALS:
            reach = self.node(f"terrain:{m}", OR, "terrain")
            if m == spawn:
                reach.children.append(self.true_leaf(f"spawn:{m}", "terrain"))
            for other in sorted(adj[m]):
                step = self.node(f"approach:{m}:via:{other}", AND, "terrain")
                step.children.append(self.node(f"terrain:{other}", OR, "terrain"))
                step.children.append(self.node(f"passable:{other}", OR, "terrain"))
                reach.children.append(step)

    # --- item layer ---

    def build_items(self) -> None:
        cfg = self.cfg
        for resource in RESOURCES:
            self.item(resource)  # ensure the node exists even with no routes
        drink = self.node("gain:drink", OR, "item")
        for rule in cfg.collect:
            for gained, yield_ in rule.receive:
                if yield_.probability <= 0:
                    continue
                route = self.node(f"via:{rule.target}:{gained}", AND, "item")
                route.children.append(self.node(f"terrain:{rule.target}", OR, "terrain"))
                for tool, _count in rule.require:
                    route.children.append(self.item(tool))
                if gained == "drink":
                    drink.children.append(route)
                else:
                    self.item(gained).children.append(route)

        built_places = set()
        for place in cfg.place:
            built_places.add(place.name)
            station = self.node(f"placed:{place.name}", AND, "item")
            for used, _count in place.uses:
                station.children.append(self.item(used))
            where = self.node(f"where:{place.name}", OR, "terrain")
            for m in place.where:
                where.children.append(self.node(f"terrain:{m}", OR, "terrain"))
            station.children.append(where)

        for make in cfg.make:
            route = self.node(f"craft:{make.name}", AND, "tool")
            for used, _count in make.uses:
                route.children.append(self.item(used))
            for st in make.nearby:
                if st not in built_places:
                    # no rule places this station: unsatisfiable requirement
                    route.children.append(self.node(f"placed:{st}", OR, "item"))
                else:
                    route.children.append(self.node(f"placed:{st}", AND, "item"))
            self.item(make.name).children.append(route)

    # --- achievement layer ---

    def build_achievements(self) -> TechNode:
        cfg = self.cfg
        root = self.node("root", AND, "achievement")

        def ach(name: str) -> TechNode:
            found = self.node(f"ach:{name}", AND, "achievement")
            root.children.append(found)
            return found

        for resource in RESOURCES:
            ach(f"collect_{resource}").children.append(self.item(resource))
        ach("collect_drink").children.append(self.node("gain:drink", OR, "item"))

        for place in cfg.place:
            ach(f"place_{place.name}").children.append(
                self.node(f"placed:{place.name}", AND, "item")
            )
        for make in cfg.make:
            ach(f"make_{make.name}").children.append(self.item(make.name))

        for kind, unlock in (
            ("cow", "kill_cow"),
            ("zombie", "defeat_zombie"),
            ("skeleton", "defeat_skeleton"),
        ):
            spec = cfg.npc_spec(kind)
            harm = self.node(f"harm:{kind}", OR, "item")
            if spec.eatable:
                harm.children.append(self.true_leaf(f"eat:{kind}", "item"))
            if spec.defeatable:
                harm.children.append(self.true_leaf(f"fight:{kind}", "item"))
            ach(unlock).children.append(harm)

        plant = ach("eat_plant")
        present = self.node("plant:present", OR, "item")
        if cfg.place_rule("plant") is not None:
            present.children.append(self.node("placed:plant", AND, "item"))
        for rule in cfg.collect:
            dropped = rule.leaves.objects if rule.leaves else ()
            spawners = [kind for kind, p in dropped if kind == "plant" and p > 0]
            if spawners:
                sprout = self.node(f"sprout:{rule.target}", AND, "item")
                sprout.children.append(self.node(f"terrain:{rule.target}", OR, "terrain"))
                for tool, _count in rule.require:
                    sprout.children.append(self.item(tool))
                present.children.append(sprout)
        plant.children.append(present)
        harm_plant = self.node("harm:plant", OR, "item")
        spec = cfg.npc_spec("plant")
        if spec.eatable:
            harm_plant.children.append(self.true_leaf("eat:plant", "item"))
        if spec.defeatable:
            harm_plant.children.append(self.true_leaf("fight:plant", "item"))
        plant.children.append(harm_plant)

        ach("wake_up")  # no requirements: sleep is always available
        return root


def build_tech_tree(cfg: WorldConfig) -> TechNode:
    builder = _Builder(cfg)
    builder.build_terrain()
    builder.build_items()
    return builder.build_achievements()


def collect_nodes(root: TechNode) -> dict[str, TechNode]:
    seen: dict[str, TechNode] = {}
    stack = [root]
    while stack:
        node = stack.pop()
        if node.name in seen:
            continue
        seen[node.name] = node
        stack.extend(node.children)
    return seen


def evaluate(root: TechNode) -> dict[str, bool]:
    """Least-fixpoint truth for every node (cycles resolve to false)."""
    nodes = collect_nodes(root)
    truth = {name: False for name in nodes}
    changed = True
    while changed:
        changed = False
        for name, node in nodes.items():
            if truth[name]:
                continue
            if node.kind == AND:
                value = all(truth[c.name] for c in node.children)
            else:
                value = any(truth[c.name] for c in node.children)
            if value:
                truth[name] = True
                changed = True
    return truth
