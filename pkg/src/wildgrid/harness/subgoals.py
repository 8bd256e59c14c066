"""Subgoal grammar used by planner output.

Six templates over closed vocabularies:
    mine(block, amount) | attack(creature, amount) | sleep()
    | place(block) | make(tool) | explore(direction, steps)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

MINEABLE = (
    "stone",
    "coal",
    "iron",
    "tree",
    "diamond",
    "water",
    "lava",
    "grass",
    "sand",
    "ripe-plant",
)
ATTACKABLE = ("zombie", "skeleton", "cow")
PLACEABLE = ("stone", "table", "furnace", "sapling")
CRAFTABLE = (
    "wood pickaxe",
    "stone pickaxe",
    "iron pickaxe",
    "wood sword",
    "stone sword",
    "iron sword",
)
EXPLORE_DIRECTIONS = ("left", "right", "up", "down")

# one engine-step allowance per subgoal before it counts as timed out
SUBGOAL_TIMEOUT = 100

_CALL_RE = re.compile(r"(mine|attack|sleep|place|make|explore)\s*\(([^()]*)\)")


class SubgoalError(ValueError):
    """Text that does not fit the subgoal grammar."""


@dataclass(frozen=True)
class Subgoal:
    kind: str
    arg: Optional[str] = None
    amount: int = 1

    def render(self) -> str:
        if self.kind == "sleep":
            return "sleep()"
        if self.kind in ("place", "make"):
            return f'{self.kind}("{self.arg}")'
        return f'{self.kind}("{self.arg}", {self.amount})'


def _clean_arg(raw: str) -> str:
    return raw.strip().strip("\"'").strip().lower()


def _parse_amount(raw: str, what: str) -> int:
    token = _clean_arg(raw)
    try:
        value = int(token)
    except ValueError:
        raise SubgoalError(f"{what} must be an integer, got {token!r}") from None
    if value < 1:
        raise SubgoalError(f"{what} must be at least 1, got {value}")
    return value


def _normalize_block(name: str) -> str:
    name = _clean_arg(name).replace("_", " ")
    if name in ("ripe plant", "ripe-plant"):
        return "ripe-plant"
    return name


def _normalize_creature(name: str) -> str:
    name = _clean_arg(name)
    if name.endswith("s") and name[:-1] in ATTACKABLE:
        return name[:-1]
    return name


def _normalize_tool(name: str) -> str:
    return _clean_arg(name).replace("_", " ")


def parse_subgoal(text: str) -> Subgoal:
    """Parse one subgoal call; trailing '#' comments and ';' are ignored."""
    body = text.split("#", 1)[0].strip().rstrip(";").strip()
    match = _CALL_RE.fullmatch(body)
    if not match:
        raise SubgoalError(f"not a subgoal call: {text!r}")
    kind = match.group(1)
    args = [a for a in match.group(2).split(",") if a.strip()]
    if kind == "sleep":
        if args:
            raise SubgoalError("sleep() takes no arguments")
        return Subgoal("sleep")
    if not args:
        raise SubgoalError(f"{kind}() needs arguments")
    if kind == "mine":
        block = _normalize_block(args[0])
        if block not in MINEABLE:
            raise SubgoalError(f"cannot mine {block!r}")
        amount = _parse_amount(args[1], "amount") if len(args) > 1 else 1
        return Subgoal("mine", block, amount)
    if kind == "attack":
        creature = _normalize_creature(args[0])
        if creature not in ATTACKABLE:
            raise SubgoalError(f"cannot attack {creature!r}")
        amount = _parse_amount(args[1], "amount") if len(args) > 1 else 1
        return Subgoal("attack", creature, amount)
    if kind == "place":
        block = _normalize_block(args[0])
        if block not in PLACEABLE:
            raise SubgoalError(f"cannot place {block!r}")
        return Subgoal("place", block)
    if kind == "make":
        tool = _normalize_tool(args[0])
        if tool not in CRAFTABLE:
            raise SubgoalError(f"cannot make {tool!r}")
        return Subgoal("make", tool)
    direction = _clean_arg(args[0])
    if direction not in EXPLORE_DIRECTIONS:
        raise SubgoalError(f"unknown direction {direction!r}")
    steps = _parse_amount(args[1], "steps") if len(args) > 1 else 1
    return Subgoal("explore", direction, steps)


def parse_plan(text: str) -> list[Subgoal]:
    """Extract every subgoal call from planner text, in order."""
    calls = []
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        calls.extend(m.group(0) for m in _CALL_RE.finditer(body))
    if not calls:
        raise SubgoalError("no subgoal calls found in plan")
    return [parse_subgoal(call) for call in calls]
