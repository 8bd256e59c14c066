"""Dialogue agents: act-from-observation, with an optional reflection pass.

The plain agent keeps a trimmed chat history and parses ACTION/THINK
replies. The reflective variant watches the untrimmed history size and,
once it exceeds the token budget, asks for a reflection and restarts the
window from the reflection text.
"""

from __future__ import annotations

import logging
import re
from typing import Optional

from ..describe import TextFrame
from ..engine.state import Observation
from ..items import ACTION_INDEX
from .base import StepRecord, Trajectory
from .gateway import (
    DEFAULT_MAX_TOKENS,
    DEFAULT_TEMPERATURE,
    Gateway,
    Message,
    request,
)
from .history import TOKEN_BUDGET, history_tokens, trim_history
from .templates import load_prompt, render_prompt

log = logging.getLogger(__name__)

_ACTION_RE = re.compile(r"^\s*ACTION\s*:\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE)
_THINK_RE = re.compile(r"^\s*THINK\s*:", re.IGNORECASE | re.MULTILINE)
_REFLECTION_RE = re.compile(r"REFLECTION\s*:", re.IGNORECASE)


def normalize_action(token: str) -> str:
    return token.strip().strip("`\"'.").strip().lower().replace(" ", "_")


def parse_reply(text: str) -> tuple[str, Optional[str]]:
    """Classify a completion as ('action', name), ('think', _) or ('invalid', _)."""
    match = _ACTION_RE.search(text)
    if match:
        action = normalize_action(match.group(1))
        if action in ACTION_INDEX:
            return ("action", action)
        return ("invalid", None)
    if _THINK_RE.search(text):
        return ("think", None)
    return ("invalid", None)


class ReactAgent:
    """THINK/ACTION loop over the textual observation."""

    wants_text = True
    # bound on gateway calls per env step, so pure-THINK replies terminate
    MAX_QUERIES = 6

    def __init__(
        self,
        gateway: Gateway,
        temperature: float = DEFAULT_TEMPERATURE,
        max_tokens: int = DEFAULT_MAX_TOKENS,
    ):
        self.gateway = gateway
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.messages: list[Message] = []
        self.episode_reward = 0.0
        self.unlocked: set[str] = set()

    def on_episode_start(self, world: str, seed: int) -> None:
        self.messages = []
        self.episode_reward = 0.0
        self.unlocked = set()

    def on_step_result(self, record: StepRecord) -> None:
        self.episode_reward += record.reward
        self.unlocked.update(record.unlocked)

    def on_episode_end(self, trajectory: Trajectory) -> None:
        pass

    def _system_prompt(self) -> str:
        return load_prompt("react")

    def _observe_content(self, frame: TextFrame) -> str:
        return frame.text

    def _before_query(self) -> None:
        pass

    def act(self, obs: Observation, frame: Optional[TextFrame]) -> str:
        assert frame is not None
        self.messages.append({"role": "user", "content": self._observe_content(frame)})
        self._before_query()
        retries = 0
        for _ in range(self.MAX_QUERIES):
            req = request(
                self._system_prompt(),
                trim_history(self.messages),
                self.temperature,
                self.max_tokens,
            )
            text = self.gateway.complete(req).text
            kind, action = parse_reply(text)
            if kind == "action":
                self.messages.append({"role": "assistant", "content": text})
                return action
            if kind == "think":
                self.messages.append({"role": "assistant", "content": text})
                continue
            retries += 1
            if retries > 1:
                log.warning("unparseable completion %r; using noop", text[:80])
                return "noop"
        log.warning("no ACTION after %d queries; using noop", self.MAX_QUERIES)
        return "noop"


class ReflexionAgent(ReactAgent):
    """Adds a reflection step once the raw history outgrows the budget."""

    # reflections kept in the restarted window
    MEMORY = 3

    def __init__(
        self,
        gateway: Gateway,
        budget: int = TOKEN_BUDGET,
        temperature: float = DEFAULT_TEMPERATURE,
        max_tokens: int = DEFAULT_MAX_TOKENS,
    ):
        super().__init__(gateway, temperature, max_tokens)
        self.budget = budget
        self.reflections: list[str] = []
        self.reflection_count = 0

    def on_episode_start(self, world: str, seed: int) -> None:
        super().on_episode_start(world, seed)
        self.reflections = []
        self.reflection_count = 0

    def _observe_content(self, frame: TextFrame) -> str:
        return (
            f"{frame.text}\n"
            f"reward: {self.episode_reward:.1f}\n"
            f"score: {len(self.unlocked)}"
        )

    def _before_query(self) -> None:
        if history_tokens(self.messages) > self.budget:
            self._reflect()

    def _reflect(self) -> None:
        self.reflection_count += 1
        trajectory = "\n\n".join(m["content"] for m in self.messages)
        system = render_prompt(
            "reflexion",
            {
                "history trajectory": trajectory,
                "reward": f"{self.episode_reward:.1f}",
                "score": str(len(self.unlocked)),
            },
        )
        reflection = None
        for _ in range(2):
            text = self.gateway.complete(
                request(system, (), self.temperature, self.max_tokens)
            ).text
            match = _REFLECTION_RE.search(text)
            if match:
                reflection = text[match.start():].strip()
                break
        if reflection is None:
            log.warning("reflection reply missing REFLECTION:; keeping raw text")
            reflection = text.strip()
        self.reflections.append(reflection)
        window = [
            {"role": "assistant", "content": r}
            for r in self.reflections[-self.MEMORY:]
        ]
        # restart the window: reflections first, then the newest observation
        self.messages = window + self.messages[-1:]


def react_agent(gateway: Gateway, **kwargs) -> ReactAgent:
    return ReactAgent(gateway, **kwargs)


def reflexion_agent(gateway: Gateway, **kwargs) -> ReflexionAgent:
    return ReflexionAgent(gateway, **kwargs)
