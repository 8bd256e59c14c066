"""Plan memory: successful task plans keyed by the starting situation.

A key is the starting inventory plus whether a table or furnace was in
view. Only plans whose execution was confirmed by the environment (the
task's unlock event fired) may be stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..engine.state import Observation
from .subgoals import Subgoal, parse_subgoal


@dataclass(frozen=True)
class SkillKey:
    inventory: tuple[tuple[str, int], ...]  # sorted (item, count) pairs
    table_in_view: bool
    furnace_in_view: bool


@dataclass(frozen=True)
class SkillRecord:
    task: str
    key: SkillKey
    plan: tuple[Subgoal, ...]


def skill_key(obs: Observation) -> SkillKey:
    stations = {
        cell.obj
        for row in obs.view
        for cell in row
        if cell.obj in ("table", "furnace")
    }
    return SkillKey(
        inventory=tuple(sorted(obs.inventory)),
        table_in_view="table" in stations,
        furnace_in_view="furnace" in stations,
    )


class SkillLibrary:
    """Ordered store of confirmed plans; lookup is exact on (task, key)."""

    def __init__(self) -> None:
        self._records: list[SkillRecord] = []

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def add(self, record: SkillRecord) -> None:
        self._records.append(record)

    def lookup(self, task: str, key: SkillKey) -> Optional[SkillRecord]:
        """Most recent record for the exact same task and situation."""
        for record in reversed(self._records):
            if record.task == task and record.key == key:
                return record
        return None

    def to_dict(self) -> dict:
        payload: dict[str, list[dict]] = {}
        for record in self._records:
            payload.setdefault(record.task, []).append(
                {
                    "init_inventory": dict(record.key.inventory),
                    "table_in_view": record.key.table_in_view,
                    "furnace_in_view": record.key.furnace_in_view,
                    "plan": [sub.render() for sub in record.plan],
                }
            )
        return payload

    def save(self, path: str | Path) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "SkillLibrary":
        library = cls()
        payload = json.loads(Path(path).read_text())
        for task, entries in payload.items():
            for entry in entries:
                key = SkillKey(
                    inventory=tuple(sorted(entry["init_inventory"].items())),
                    table_in_view=bool(entry["table_in_view"]),
                    furnace_in_view=bool(entry["furnace_in_view"]),
                )
                plan = tuple(parse_subgoal(text) for text in entry["plan"])
                library.add(SkillRecord(task=task, key=key, plan=plan))
        return library
