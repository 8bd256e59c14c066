"""Dialogue history budgeting for language-model agents.

The working window keeps the most recent messages subject to two caps,
whichever trips first: a token budget and a maximum number of
observation steps (user messages). Messages are kept or dropped whole.
"""

from __future__ import annotations

from typing import Sequence

from ..describe import estimate_tokens
from .gateway import Message

TOKEN_BUDGET = 3896
STEP_BUDGET = 10


def message_tokens(message: Message) -> int:
    return estimate_tokens(message.get("content", ""))


def history_tokens(messages: Sequence[Message]) -> int:
    return sum(message_tokens(m) for m in messages)


def trim_history(
    messages: Sequence[Message],
    budget: int = TOKEN_BUDGET,
    max_steps: int = STEP_BUDGET,
) -> list[Message]:
    """Longest suffix within `budget` tokens and `max_steps` observations."""
    if budget <= 0:
        return []
    kept: list[Message] = []
    total = 0
    steps = 0
    for message in reversed(messages):
        cost = message_tokens(message)
        if total + cost > budget:
            break
        if message.get("role") == "user":
            if steps == max_steps:
                break
            steps += 1
        kept.append(message)
        total += cost
    kept.reverse()
    return kept
