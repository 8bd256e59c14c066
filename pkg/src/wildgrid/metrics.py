"""Episode reward recomputation, success rates, and the log-space score."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .items import ACHIEVEMENTS


class TrajectoryError(ValueError):
    """A logged trajectory is missing fields or contradicts itself."""


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one episode: what was unlocked and what it scored."""

    world: str
    seed: int
    reward: float
    unlocked: frozenset[str]
    steps: int


def episode_reward(steps: Sequence[Mapping]) -> float:
    """Recompute reward from logged steps.

    Each first-time unlock is worth +1; every point of health gained or
    lost is worth +-0.1. Accumulates in integer tenths so the result is
    exact and must equal the engine's streamed total.
    """
    tenths = 0
    health = 9
    seen: set[str] = set()
    for i, step in enumerate(steps):
        try:
            now = int(step["health"])
        except (TypeError, KeyError, ValueError):
            raise TrajectoryError(f"step {i}: missing or bad health") from None
        new = tuple(step.get("unlocked", ()))
        for ach in new:
            if ach in seen:
                raise TrajectoryError(f"step {i}: achievement {ach} unlocked twice")
            seen.add(ach)
        tenths += 10 * len(new) + (now - health)
        health = now
    return tenths / 10


def success_rates(trials: Sequence[TrialRecord]) -> tuple[float, ...]:
    """Percent of trials unlocking each achievement, in canonical order."""
    if not trials:
        raise ValueError("success rates need at least one trial")
    n = len(trials)
    return tuple(
        100.0 * sum(1 for t in trials if a in t.unlocked) / n for a in ACHIEVEMENTS
    )


def score(s: Sequence[float]) -> float:
    """Log-space average of success rates: exp(mean(ln(1+s_i))) - 1."""
    if len(s) != len(ACHIEVEMENTS):
        raise ValueError(f"expected {len(ACHIEVEMENTS)} rates, got {len(s)}")
    for value in s:
        if not 0.0 <= value <= 100.0:
            raise ValueError(f"success rate {value} outside [0, 100]")
    return math.exp(sum(math.log(1.0 + value) for value in s) / len(s)) - 1.0


@dataclass(frozen=True)
class ScoreSummary:
    s: tuple[float, ...]
    score: float
    reward_mean: float
    reward_sd: float
    trials: int

    @classmethod
    def from_trials(cls, trials: Sequence[TrialRecord]) -> "ScoreSummary":
        rates = success_rates(trials)
        rewards = [t.reward for t in trials]
        sd = statistics.stdev(rewards) if len(rewards) > 1 else 0.0
        return cls(
            s=rates,
            score=score(rates),
            reward_mean=statistics.fmean(rewards),
            reward_sd=sd,
            trials=len(trials),
        )

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "reward_mean": self.reward_mean,
            "reward_sd": self.reward_sd,
            "trials": self.trials,
            "success_rates": {a: r for a, r in zip(ACHIEVEMENTS, self.s)},
        }


def leaderboard(groups: Mapping[str, Sequence[TrialRecord]]) -> str:
    """Per-world summary table: score percent and reward mean +- sd."""
    rows = [f"{'world':<14s} {'score%':>8s} {'reward':>16s} {'trials':>7s}"]
    for world in groups:
        summary = ScoreSummary.from_trials(list(groups[world]))
        reward = f"{summary.reward_mean:.1f} +- {summary.reward_sd:.1f}"
        rows.append(
            f"{world:<14s} {summary.score:>8.2f} {reward:>16s} {summary.trials:>7d}"
        )
    return "\n".join(rows)


def group_trials(trials: Iterable[TrialRecord]) -> dict[str, list[TrialRecord]]:
    groups: dict[str, list[TrialRecord]] = {}
    for trial in trials:
        groups.setdefault(trial.world, []).append(trial)
    return groups
