"""Textual rendering of observations for language-model agents.

The line grammar is fixed and golden-tested, including the odd literal
"I have nothing in your inventory." for empty inventories. Cells carry
display offsets (dx, dy) with y growing upwards.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from .engine import params
from .engine.state import NEIGHBOUR_OFFSETS, Observation
from .items import INVENTORY_ORDER

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")

# Person-dependent phrasing. The empty-inventory line keeps its original
# mixed wording in first person.
_WORDING = {
    "first": {
        "action": "I took action {action}.",
        "standing": "I am on the {material}.",
        "see": "I see: (object with coordinate)",
        "front": "{name} is in front of me.",
        "status": "My status: <health: {h}/9, food: {f}/9, drink: {d}/9, energy: {e}/9>",
        "inventory": "My inventory: <{items}>",
        "empty": "I have nothing in your inventory.",
    },
    "second": {
        "action": "You took action {action}.",
        "standing": "You are on the {material}.",
        "see": "You see: (object with coordinate)",
        "front": "{name} is in front of you.",
        "status": "Your status: <health: {h}/9, food: {f}/9, drink: {d}/9, energy: {e}/9>",
        "inventory": "Your inventory: <{items}>",
        "empty": "You have nothing in your inventory.",
    },
}

DARKNESS = "darkness"  # placeholder name for cells beyond the map edge


@dataclass(frozen=True)
class TextFrame:
    lines: tuple[str, ...]
    tokens: int

    @property
    def text(self) -> str:
        return "\n".join(self.lines)


def estimate_tokens(text: str, tokenizer: Optional[Callable[[str], int]] = None) -> int:
    """Approximate LLM token count; default splits words and punctuation."""
    if tokenizer is not None:
        return tokenizer(text)
    return len(_TOKEN_RE.findall(text))


def _sort_key(dx: int, dy: int) -> tuple[int, int, int, int]:
    return (max(abs(dx), abs(dy)), abs(dx) + abs(dy), dy, dx)


def _cell_entries(obs: Observation) -> list[str]:
    """The coordinate list: 8 neighbours in fixed order, then the nearest
    instance of each material type not already shown plus every further
    object, ordered by distance."""
    entries: list[str] = []
    shown_materials: set[str] = set()
    for dx, dy in NEIGHBOUR_OFFSETS:
        cell = obs.cell(dx, dy)
        if cell.material is None:
            name = DARKNESS
        elif cell.obj:
            name = cell.obj
        else:
            name = cell.material
            shown_materials.add(name)
        entries.append(f"{name}({dx}, {dy})")

    near = set(NEIGHBOUR_OFFSETS)
    far: list[tuple[tuple[int, int, int, int], str]] = []
    best_mat: dict[str, tuple[tuple[int, int, int, int], str]] = {}
    for dy in range(-params.VIEW_DY, params.VIEW_DY + 1):
        for dx in range(-params.VIEW_DX, params.VIEW_DX + 1):
            if (dx, dy) == (0, 0) or (dx, dy) in near:
                continue
            cell = obs.cell(dx, dy)
            if cell.material is None:
                continue
            key = _sort_key(dx, dy)
            if cell.obj:
                far.append((key, f"{cell.obj}({dx}, {dy})"))
            elif cell.material not in shown_materials:
                name = cell.material
                if name not in best_mat or key < best_mat[name][0]:
                    best_mat[name] = (key, f"{name}({dx}, {dy})")
    far.extend(best_mat.values())
    far.sort()
    entries.extend(text for _, text in far)
    return entries


def describe(obs: Observation, person: str = "first") -> TextFrame:
    words = _WORDING[person]
    lines: list[str] = []
    if obs.last_action is not None:
        lines.append(words["action"].format(action=obs.last_action))
    lines.append(words["standing"].format(material=obs.standing))
    lines.append(words["see"])

    front = obs.front_cell()
    if front.material is None:
        front_name = DARKNESS
    else:
        front_name = front.obj or front.material
    lines.append(words["front"].format(name=front_name))
    lines.append("<" + ", ".join(_cell_entries(obs)) + ">")
    lines.append(
        words["status"].format(h=obs.health, f=obs.food, d=obs.drink, e=obs.energy)
    )
    items = {name: count for name, count in obs.inventory}
    if items:
        shown = ", ".join(
            f"{name}: {items[name]}" for name in INVENTORY_ORDER if name in items
        )
        lines.append(words["inventory"].format(items=shown))
    else:
        lines.append(words["empty"])
    text = "\n".join(lines)
    return TextFrame(lines=tuple(lines), tokens=estimate_tokens(text))
