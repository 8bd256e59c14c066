"""Induced-rule memory and precision/recall scoring against ground truth.

Rules are single sentences. Deduplication is by a normalized key:
lowercase, whitespace collapsed, terminal punctuation stripped. The
library is append-only within a run, so its size never decreases.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, Union

from ..describe import estimate_tokens

_WS_RE = re.compile(r"\s+")


def normalize_rule(text: str) -> str:
    collapsed = _WS_RE.sub(" ", text.strip()).lower()
    return collapsed.rstrip(".!?;: ")


@dataclass(frozen=True)
class RuleRecord:
    text: str
    episode: int
    span: tuple[int, int]  # [first, last] engine step of the source segment

    @property
    def key(self) -> str:
        return normalize_rule(self.text)


class RuleLibrary:
    def __init__(self) -> None:
        self._records: list[RuleRecord] = []
        self._keys: set[str] = set()

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def add(self, text: str, episode: int = 0, span: tuple[int, int] = (0, 0)) -> Optional[RuleRecord]:
        """Store a rule unless a normalized duplicate already exists."""
        record = RuleRecord(text=text.strip(), episode=episode, span=tuple(span))
        if not record.text or record.key in self._keys:
            return None
        self._records.append(record)
        self._keys.add(record.key)
        return record

    def render(self, max_tokens: Optional[int] = None) -> str:
        """Bulleted rule text; oldest rules are dropped first when over budget."""
        records = list(self._records)
        while records:
            text = "\n".join(f"- {r.text}" for r in records)
            if max_tokens is None or estimate_tokens(text) <= max_tokens:
                return text
            records.pop(0)
        return ""

    def save(self, path: str | Path) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w") as fh:
            for record in self._records:
                fh.write(
                    json.dumps(
                        {
                            "text": record.text,
                            "episode": record.episode,
                            "span": list(record.span),
                        }
                    )
                    + "\n"
                )

    @classmethod
    def load(cls, path: str | Path) -> "RuleLibrary":
        library = cls()
        with Path(path).open() as fh:
            for line in fh:
                if not line.strip():
                    continue
                entry = json.loads(line)
                library.add(
                    entry["text"],
                    episode=int(entry.get("episode", 0)),
                    span=tuple(entry.get("span", (0, 0))),
                )
        return library


Judge = Callable[[str, str], bool]


def _default_judge(predicted: str, truth: str) -> bool:
    return normalize_rule(predicted) == normalize_rule(truth)


def evaluate_rules(
    library: Union[RuleLibrary, Iterable[Union[RuleRecord, str]]],
    truth: Sequence[str],
    judge: Optional[Judge] = None,
) -> tuple[float, float]:
    """(precision, recall) of predicted rules against ground-truth renderings."""
    truths = list(truth)
    if not truths:
        raise ValueError("empty truth set")
    predicted = [
        r.text if isinstance(r, RuleRecord) else str(r) for r in library
    ]
    if not predicted:
        return (0.0, 0.0)
    match = judge or _default_judge
    hit_pred = sum(1 for p in predicted if any(match(p, t) for t in truths))
    hit_truth = sum(1 for t in truths if any(match(p, t) for p in predicted))
    return (hit_pred / len(predicted), hit_truth / len(truths))
