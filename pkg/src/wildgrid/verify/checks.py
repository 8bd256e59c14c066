"""Solvability checks over world configs.

Four independent checks, each returning pass/fail plus witnesses:

* feasibility: every achievement has an acyclic satisfying derivation
  in the dependency graph (deadlocked tool cycles fail here),
* accessibility: every collect target can be reached from spawn,
* balance: any stat that can drain also has some way to recover,
* supply: a generated map holds enough raw material to run the whole
  achievement list, counting what mining leaves behind.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

from ..config.model import WorldConfig
from ..engine.worldgen import generate
from .tree import OR, TechNode, build_tech_tree, collect_nodes, evaluate


@dataclass(frozen=True)
class Witness:
    kind: str  # cycle | missing | unreachable | drain | deficit
    subject: tuple[str, ...]
    detail: str


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    witnesses: tuple[Witness, ...] = ()


@dataclass(frozen=True)
class VerificationReport:
    feasibility: CheckResult
    accessibility: CheckResult
    balance: CheckResult
    supply: CheckResult

    @property
    def passed(self) -> bool:
        return all(
            section.passed
            for section in (self.feasibility, self.accessibility, self.balance, self.supply)
        )

    def sections(self) -> tuple[tuple[str, CheckResult], ...]:
        return (
            ("feasibility", self.feasibility),
            ("accessibility", self.accessibility),
            ("balance", self.balance),
            ("supply", self.supply),
        )

    def to_dict(self) -> dict:
        payload: dict = {"passed": self.passed}
        for name, section in self.sections():
            payload[name] = {
                "passed": section.passed,
                "witnesses": [w.detail for w in section.witnesses],
            }
        return payload

    def render(self) -> str:
        lines = [f"verdict: {'pass' if self.passed else 'fail'}"]
        for name, section in self.sections():
            lines.append(f"{name}: {'pass' if section.passed else 'fail'}")
            for w in section.witnesses:
                lines.append(f"  - {w.detail}")
        return "\n".join(lines)


def _strip(name: str) -> str:
    return name.split(":", 1)[1] if ":" in name else name


def _blame(node: TechNode, truth: dict[str, bool]) -> Witness:
    """Walk the false subgraph under a failing node to its cause."""
    path: list[TechNode] = []
    index: dict[str, int] = {}
    cur = node
    while True:
        if cur.name in index:
            cycle = path[index[cur.name] :]
            names = sorted({_strip(n.name) for n in cycle if n.name.startswith("item:")})
            if not names:
                names = sorted({_strip(n.name) for n in cycle if n.name.startswith("terrain:")})
            if not names:
                names = sorted({_strip(n.name) for n in cycle})
            return Witness(
                "cycle", tuple(names), "mutual prerequisites: " + " <-> ".join(names)
            )
        if cur.kind == OR and not cur.children:
            subject = _strip(cur.name)
            return Witness("missing", (subject,), f"no method provides {subject}")
        index[cur.name] = len(path)
        path.append(cur)
        cur = next(c for c in cur.children if not truth[c.name])


def check_feasibility(cfg: WorldConfig) -> CheckResult:
    root = build_tech_tree(cfg)
    truth = evaluate(root)
    nodes = collect_nodes(root)
    witnesses: list[Witness] = []
    seen: set[tuple[str, tuple[str, ...]]] = set()
    for name in sorted(nodes):
        if name.startswith("ach:") and not truth[name]:
            w = _blame(nodes[name], truth)
            key = (w.kind, w.subject)
            if key not in seen:
                seen.add(key)
                witnesses.append(w)
    return CheckResult(not witnesses, tuple(witnesses))


def check_accessibility(cfg: WorldConfig) -> CheckResult:
    truth = evaluate(build_tech_tree(cfg))
    targets = sorted({rule.target for rule in cfg.collect})
    witnesses = tuple(
        Witness("unreachable", (t,), f"collect target {t} is unreachable from spawn")
        for t in targets
        if not truth.get(f"terrain:{t}", False)
    )
    return CheckResult(not witnesses, witnesses)


def check_resource_balance(cfg: WorldConfig) -> CheckResult:
    gains: dict[str, list[str]] = defaultdict(list)
    drains: dict[str, list[str]] = defaultdict(list)

    # the clock alone drains these, and sleep always restores energy
    drains["food"].append("hunger tick")
    drains["drink"].append("thirst tick")
    drains["energy"].append("fatigue tick")
    drains["health"].append("starvation at zeroed stats")
    gains["energy"].append("sleep")

    for kind, spec in cfg.npc:
        if spec.closable and spec.closable_health_damage_func < 0:
            drains["health"].append(f"{kind} melee")
        if spec.arrowable and spec.arrow_damage_func < 0:
            drains["health"].append(f"{kind} arrows")
        if spec.eatable:
            for attr, stat in (
                ("eat_health_damage_func", "health"),
                ("inc_food_func", "food"),
                ("inc_thirst_func", "drink"),
            ):
                value = getattr(spec, attr)
                if value > 0:
                    gains[stat].append(f"eating {kind}")
                elif value < 0:
                    drains[stat].append(f"eating {kind}")

    for material, eff in cfg.terrain_effect:
        if eff.dieable:
            drains["health"].append(f"entering {material}")
        elif eff.walkable and eff.walk_health > 0:
            gains["health"].append(f"walking on {material}")
        elif eff.walkable and eff.walk_health < 0:
            drains["health"].append(f"walking on {material}")

    for rule in cfg.collect:
        units = sum(
            y.amount for item, y in rule.receive if item == "drink" and y.probability > 0
        )
        if units <= 0:
            continue
        spec = cfg.drink_spec(rule.target)
        if spec is None:
            gains["drink"].append(f"collecting drink from {rule.target}")
            continue
        for attr, stat in (
            ("inc_drink_func", "drink"),
            ("inc_food_func", "food"),
            ("inc_health_func", "health"),
        ):
            value = getattr(spec, attr) * units
            if value > 0:
                gains[stat].append(f"drinking from {rule.target}")
            elif value < 0:
                drains[stat].append(f"drinking from {rule.target}")

    # passive regeneration only works while food and drink stay positive
    if gains["food"] and gains["drink"]:
        gains["health"].append("regeneration")

    witnesses = tuple(
        Witness(
            "drain",
            (stat,),
            f"{stat} has drains ({', '.join(sorted(set(drains[stat])))}) but no gains",
        )
        for stat in ("health", "food", "drink", "energy")
        if drains[stat] and not gains[stat]
    )
    return CheckResult(not witnesses, witnesses)


def _map_stocks(cfg: WorldConfig, seed: int) -> Counter:
    state = generate(cfg, seed)
    counts: Counter = Counter()
    for row in state.mat:
        counts.update(row)
    return counts


def check_supply(
    cfg: WorldConfig, seed: int = 0, stocks: dict[str, int] | None = None
) -> CheckResult:
    """Greedy dry run of the whole achievement list against map stocks.

    Collecting a cell decrements its material count and increments
    whatever the rule leaves behind, so self-replacing materials act as
    unlimited sources. Probabilistic yields count at half their
    expected value to leave slack for unlucky runs.
    """
    root = build_tech_tree(cfg)
    truth = evaluate(root)
    nodes = collect_nodes(root)
    feasible = sorted(n[4:] for n in nodes if n.startswith("ach:") and truth[n])

    counts = Counter(stocks) if stocks is not None else _map_stocks(cfg, seed)
    inv: dict[str, float] = defaultdict(float)
    placed: set[str] = set()
    done: set[str] = set()
    eps = 1e-9
    budget = [200000]  # collect events before the dry run gives up

    def reach(material: str) -> bool:
        return truth.get(f"terrain:{material}", False)

    def gain(yield_) -> float:
        scale = 1.0 if yield_.probability >= 1.0 else yield_.probability / 2.0
        return yield_.amount * scale

    def usable(rule, guard: frozenset[str]) -> bool:
        # non-consumed requirements; top up collectable ones on the fly
        for tool, count in rule.require:
            if inv[tool] >= count - eps:
                continue
            if tool in guard:
                return False
            while inv[tool] < count - eps:
                if not collect_once(tool, guard | {tool}):
                    return False
        return True

    def collect_once(item: str, guard: frozenset[str] = frozenset()) -> bool:
        for rule in cfg.collect:
            yields = [y for it, y in rule.receive if it == item and y.probability > 0]
            if not any(y.amount > 0 for y in yields):
                continue
            if counts[rule.target] < 1 or budget[0] <= 0:
                continue
            if not reach(rule.target) or not usable(rule, guard):
                continue
            budget[0] -= 1
            counts[rule.target] -= 1
            counts[rule.leaves_material()] += 1
            for it, y in rule.receive:
                if it != "drink" and y.probability > 0:
                    inv[it] += gain(y)
            return True
        return False

    def acquire(item: str, amount: float) -> str | None:
        while inv[item] < amount - eps:
            if not collect_once(item):
                return item
        return None

    def place_station(name: str) -> str | None:
        if name in placed:
            return None
        rule = cfg.place_rule(name)
        if rule is None:
            return name
        if not any(reach(m) for m in rule.where):
            return name
        for item, count in rule.uses:
            missing = acquire(item, count)
            if missing:
                return missing
        for item, count in rule.uses:
            inv[item] -= count
        placed.add(name)
        done.add(f"place_{name}")
        return None

    def craft(tool: str) -> str | None:
        rule = cfg.make_rule(tool)
        if rule is None:
            return tool
        for station in rule.nearby:
            missing = place_station(station)
            if missing:
                return missing
        for item, count in rule.uses:
            missing = acquire(item, count)
            if missing:
                return missing
        for item, count in rule.uses:
            inv[item] -= count
        inv[tool] += rule.gives
        done.add(f"make_{tool}")
        return None

    def drink_once() -> str | None:
        for rule in cfg.collect:
            units = [y for it, y in rule.receive if it == "drink" and y.probability > 0]
            if not units or counts[rule.target] < 1:
                continue
            if not reach(rule.target) or not usable(rule, frozenset()):
                continue
            counts[rule.target] -= 1
            counts[rule.leaves_material()] += 1
            return None
        return "drink"

    def attempt(name: str) -> str | None:
        if name in done:
            return None
        if name == "collect_drink":
            return drink_once()
        if name.startswith("collect_"):
            item = name[len("collect_") :]
            if inv[item] >= 1 - eps or collect_once(item):
                return None
            return item
        if name.startswith("place_"):
            return place_station(name[len("place_") :])
        if name.startswith("make_"):
            return craft(name[len("make_") :])
        if name == "eat_plant" and cfg.place_rule("plant") is not None:
            return None if "place_plant" in done else "plant"
        return None  # creature kills, wake_up: no material demand

    pending = list(feasible)
    blockers: dict[str, str] = {}
    progress = True
    while progress and pending:
        progress = False
        for name in list(pending):
            missing = attempt(name)
            if missing is None:
                done.add(name)
                pending.remove(name)
                blockers.pop(name, None)
                progress = True
            else:
                blockers[name] = missing

    witnesses = tuple(
        Witness(
            "deficit",
            (name, blockers.get(name, "")),
            f"{name} starves for {blockers.get(name, 'supplies')}",
        )
        for name in pending
    )
    return CheckResult(not witnesses, witnesses)


def verify(cfg: WorldConfig, seed: int = 0) -> VerificationReport:
    return VerificationReport(
        feasibility=check_feasibility(cfg),
        accessibility=check_accessibility(cfg),
        balance=check_resource_balance(cfg),
        supply=check_supply(cfg, seed),
    )
