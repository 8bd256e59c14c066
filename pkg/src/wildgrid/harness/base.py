"""Episode orchestration: the agent contract, trajectory records, runner."""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol

from ..config.model import WorldConfig
from ..describe import TextFrame, describe
from ..engine import Engine, params
from ..engine.state import Observation
from ..items import ACTION_INDEX, ACTIONS
from ..metrics import TrialRecord

log = logging.getLogger(__name__)

# control tokens a subgoal controller may emit instead of an action
SUCCEED = "SUCCEED"
FAILED = "FAILED"


class Agent(Protocol):
    """Anything that can drive an episode.

    `wants_text` lets scripted agents skip the cost of rendering the
    textual frame every step.
    """

    wants_text: bool

    def on_episode_start(self, world: str, seed: int) -> None: ...

    def act(self, obs: Observation, frame: Optional[TextFrame]) -> str: ...

    def on_episode_end(self, trajectory: "Trajectory") -> None: ...


@dataclass(frozen=True)
class StepRecord:
    index: int
    requested: str  # what the agent asked for
    action: str  # what the engine executed (noop if coerced)
    reward: float
    health: int
    unlocked: tuple[str, ...]  # newly unlocked this step
    done: bool

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "requested": self.requested,
            "action": self.action,
            "reward": self.reward,
            "health": self.health,
            "unlocked": list(self.unlocked),
            "done": self.done,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "StepRecord":
        return cls(
            index=int(payload["index"]),
            requested=payload["requested"],
            action=payload["action"],
            reward=float(payload["reward"]),
            health=int(payload["health"]),
            unlocked=tuple(payload.get("unlocked", ())),
            done=bool(payload["done"]),
        )


@dataclass
class Trajectory:
    world: str
    seed: int
    steps: list[StepRecord] = field(default_factory=list)
    reward: float = 0.0
    unlocked: tuple[str, ...] = ()
    death_cause: Optional[str] = None

    @property
    def step_count(self) -> int:
        return len(self.steps)

    def to_trial(self) -> TrialRecord:
        return TrialRecord(
            world=self.world,
            seed=self.seed,
            reward=self.reward,
            unlocked=frozenset(self.unlocked),
            steps=self.step_count,
        )

    def save(self, path: str | Path) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w") as fh:
            header = {
                "world": self.world,
                "seed": self.seed,
                "reward": self.reward,
                "unlocked": list(self.unlocked),
                "death_cause": self.death_cause,
            }
            fh.write(json.dumps(header) + "\n")
            for step in self.steps:
                fh.write(json.dumps(step.to_dict()) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Trajectory":
        with Path(path).open() as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
        if not lines:
            raise ValueError(f"{path}: empty trajectory file")
        header = lines[0]
        return cls(
            world=header["world"],
            seed=int(header["seed"]),
            steps=[StepRecord.from_dict(p) for p in lines[1:]],
            reward=float(header["reward"]),
            unlocked=tuple(header.get("unlocked", ())),
            death_cause=header.get("death_cause"),
        )


def run_episode(
    cfg: WorldConfig,
    seed: int,
    agent: Agent,
    max_steps: int = params.EPISODE_LIMIT,
    world: str = "custom",
    log_path: str | Path | None = None,
    person: str = "second",
) -> Trajectory:
    """Drive one episode; invalid agent actions become logged noops."""
    engine = Engine(cfg, seed)
    obs = engine.reset()
    wants_text = getattr(agent, "wants_text", True)
    agent.on_episode_start(world, seed)
    steps: list[StepRecord] = []
    for index in range(max_steps):
        frame = describe(obs, person=person) if wants_text else None
        requested = agent.act(obs, frame)
        action = requested
        if action not in ACTION_INDEX:
            log.warning("step %d: invalid action %r coerced to noop", index, requested)
            action = "noop"
        result = engine.step(action)
        record = StepRecord(
            index=index,
            requested=requested,
            action=action,
            reward=result.reward,
            health=engine.state.agent.health,
            unlocked=tuple(result.info["newly_unlocked"]),
            done=result.done,
        )
        steps.append(record)
        feedback = getattr(agent, "on_step_result", None)
        if feedback is not None:
            feedback(record)
        obs = result.observation
        if result.done:
            break
    trajectory = Trajectory(
        world=world,
        seed=seed,
        steps=steps,
        reward=engine.episode_reward,
        unlocked=tuple(sorted(engine.state.unlocked)),
        death_cause=engine.state.death_cause,
    )
    agent.on_episode_end(trajectory)
    if log_path is not None:
        trajectory.save(log_path)
    return trajectory


class RandomAgent:
    """Uniform draws over the full action set from a seeded stream."""

    wants_text = False

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(seed)

    def on_episode_start(self, world: str, seed: int) -> None:
        self.rng = random.Random(f"{self.seed}:{world}:{seed}")

    def act(self, obs: Observation, frame: Optional[TextFrame]) -> str:
        return self.rng.choice(ACTIONS)

    def on_episode_end(self, trajectory: Trajectory) -> None:
        pass


def random_agent(seed: int = 0) -> RandomAgent:
    return RandomAgent(seed)
