"""Task-level agents: propose a task, plan subgoals, drive a controller.

The plain pipeline keeps a skill library of environment-confirmed plans.
The induction variant additionally asks for a game mechanism after every
terminal subgoal (succeed, failed or timeout) and feeds the accumulated
rule text back into the proposer, planner and controller prompts.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from pathlib import Path
from typing import Optional

from ..describe import TextFrame
from ..engine.state import Observation
from ..items import ACTION_INDEX
from .base import FAILED, SUCCEED, StepRecord, Trajectory
from .gateway import (
    DEFAULT_MAX_TOKENS,
    DEFAULT_TEMPERATURE,
    Gateway,
    Message,
    request,
)
from .history import trim_history
from .rules import RuleLibrary
from .skills import SkillKey, SkillLibrary, SkillRecord, skill_key
from .subgoals import SUBGOAL_TIMEOUT, Subgoal, SubgoalError, parse_plan
from .templates import load_prompt, render_prompt

log = logging.getLogger(__name__)

# episodes in one learning run; libraries persist across all of them
LEARNING_EPISODES = 5

# prompt-token allowance for injected rule text
RULE_TEXT_BUDGET = 512

TASK_POOL = (
    "collect coal",
    "collect diamond",
    "collect drink",
    "collect iron",
    "collect sapling",
    "collect stone",
    "collect wood",
    "kill skeleton",
    "kill zombie",
    "kill cow",
    "eat plant",
    "make iron pickaxe",
    "make iron sword",
    "make stone pickaxe",
    "make stone sword",
    "make wood pickaxe",
    "make wood sword",
    "place furnace",
    "place plant",
    "place stone",
    "place table",
    "wake up",
)

_TASK_RE = re.compile(r"^\s*Task\s*:\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE)
_ACTION_RE = re.compile(r"^\s*Action\s*:\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE)
_MECHANISM_RE = re.compile(r"^\s*Mechanism\s*:\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE)
_TOKEN_RE = re.compile(r"\b(SUCCEED|FAILED)\b")


def achievement_for(task: str) -> str:
    """Map a task-pool name to the achievement id that confirms it."""
    if task == "kill skeleton":
        return "defeat_skeleton"
    if task == "kill zombie":
        return "defeat_zombie"
    return task.replace(" ", "_")


def _normalize_task(raw: str) -> str:
    return raw.strip().strip("`\"'.[]").strip().lower().replace("_", " ")


class SkillPipelineAgent:
    """Proposer, planner and controller loop over a reusable plan memory."""

    wants_text = True
    MAX_LOOPS = 8  # bookkeeping transitions per env step before giving up

    def __init__(
        self,
        gateway: Gateway,
        skills: Optional[SkillLibrary] = None,
        examples: Optional[dict[str, str]] = None,
        persist_dir: Optional[str | Path] = None,
        temperature: float = DEFAULT_TEMPERATURE,
        max_tokens: int = DEFAULT_MAX_TOKENS,
    ):
        self.gateway = gateway
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.examples = dict(examples or {})
        self.persist_dir = Path(persist_dir) if persist_dir else None
        self.skills = skills if skills is not None else self._load_skills()
        self.stats: Counter[str] = Counter()
        self.episode_index = 0
        self._reset_episode_state()

    # --- persistence ---

    def _load_skills(self) -> SkillLibrary:
        if self.persist_dir:
            path = self.persist_dir / "skills.json"
            if path.exists():
                return SkillLibrary.load(path)
        return SkillLibrary()

    def _persist(self) -> None:
        if self.persist_dir:
            self.skills.save(self.persist_dir / "skills.json")

    # --- lifecycle ---

    def _reset_episode_state(self) -> None:
        self.completed_tasks: list[str] = []
        self.failed_tasks: list[str] = []
        self.unlocked_total: set[str] = set()
        self.episode_reward = 0.0
        self._clear_task()

    def _clear_task(self) -> None:
        self.task: Optional[str] = None
        self.task_achievement = ""
        self.task_was_new = False
        self.task_unlocks: set[str] = set()
        self.replanned = False
        self.plan: Optional[list[Subgoal]] = None
        self.plan_key: Optional[SkillKey] = None
        self.plan_reused = False
        self.sub_index = 0
        self.sub_steps = 0
        self.controller_messages: list[Message] = []
        self.segment: list[str] = []
        self.segment_span: list[Optional[int]] = [None, None]
        self._counting = False

    def on_episode_start(self, world: str, seed: int) -> None:
        self.episode_index += 1
        self._reset_episode_state()

    def on_episode_end(self, trajectory: Trajectory) -> None:
        self._persist()

    def on_step_result(self, record: StepRecord) -> None:
        self.episode_reward += record.reward
        self.unlocked_total.update(record.unlocked)
        if self.task is not None:
            self.task_unlocks.update(record.unlocked)
        if self._counting and self.plan is not None:
            self.sub_steps += 1
            if self.segment_span[0] is None:
                self.segment_span[0] = record.index
            self.segment_span[1] = record.index
            unlocked = ", ".join(record.unlocked) if record.unlocked else "none"
            self.segment.append(
                f"reward: {record.reward:g}; newly unlocked: {unlocked}"
            )
        self._counting = False

    # --- prompt plumbing ---

    def _rules_suffix(self) -> str:
        return ""

    def _system(self, name: str, slots: Optional[dict[str, str]] = None) -> str:
        filled = dict(slots or {})
        filled.setdefault("examples", self.examples.get(name, ""))
        return render_prompt(name, filled) + self._rules_suffix()

    def _ask(self, system: str, messages: list[Message]) -> str:
        req = request(system, trim_history(messages), self.temperature, self.max_tokens)
        return self.gateway.complete(req).text

    # --- the act loop ---

    def act(self, obs: Observation, frame: Optional[TextFrame]) -> str:
        assert frame is not None
        for _ in range(self.MAX_LOOPS):
            if self.task is None and not self._propose(obs, frame):
                return self._spend_step("noop", under_subgoal=False)
            if self.plan is None:
                if self._make_plan(obs, frame):
                    continue
                self._finish_task(success=False)
                continue
            if self.sub_steps >= SUBGOAL_TIMEOUT:
                self._terminal("timeout", obs, frame)
                continue
            verdict, action = self._control(obs, frame)
            if verdict == "action":
                return self._spend_step(action, under_subgoal=True)
            self._terminal(verdict, obs, frame)
        log.warning("pipeline made no progress this step; using noop")
        return self._spend_step("noop", under_subgoal=False)

    def _spend_step(self, action: str, under_subgoal: bool) -> str:
        self._counting = under_subgoal
        return action

    # --- task proposal ---

    def _propose(self, obs: Observation, frame: TextFrame) -> bool:
        self.stats["proposer_calls"] += 1
        content = (
            f"{frame.text}\n"
            f"Completed tasks so far: {', '.join(self.completed_tasks) or 'none'}\n"
            f"Failed tasks: {', '.join(self.failed_tasks) or 'none'}"
        )
        system = self._system("proposer")
        messages = [{"role": "user", "content": content}]
        task = None
        for _ in range(2):
            reply = self._ask(system, messages)
            match = _TASK_RE.search(reply)
            if match:
                candidate = _normalize_task(match.group(1))
                if candidate in TASK_POOL:
                    task = candidate
                    break
        if task is None:
            task = self._fallback_task()
            log.warning("proposer reply unusable; falling back to %r", task)
        self._clear_task()
        self.task = task
        self.task_achievement = achievement_for(task)
        self.task_was_new = self.task_achievement not in self.unlocked_total
        return True

    def _fallback_task(self) -> str:
        for task in TASK_POOL:
            if (
                achievement_for(task) not in self.unlocked_total
                and task not in self.failed_tasks
            ):
                return task
        return TASK_POOL[0]

    # --- planning ---

    def _make_plan(self, obs: Observation, frame: TextFrame) -> bool:
        key = skill_key(obs)
        record = self.skills.lookup(self.task, key)
        if record is not None:
            self.stats["skills_reused"] += 1
            self._install_plan(list(record.plan), key, reused=True)
            return True
        self.stats["planner_calls"] += 1
        system = self._system("planner")
        messages = [
            {"role": "user", "content": f"{frame.text}\ntask: {self.task}"}
        ]
        for _ in range(2):
            reply = self._ask(system, messages)
            try:
                plan = parse_plan(reply)
            except SubgoalError as err:
                log.warning("malformed plan for %r: %s", self.task, err)
                continue
            self._install_plan(plan, key, reused=False)
            return True
        return False

    def _install_plan(self, plan: list[Subgoal], key: SkillKey, reused: bool) -> None:
        self.plan = plan
        self.plan_key = key
        self.plan_reused = reused
        self.sub_index = 0
        self.sub_steps = 0
        self.controller_messages = []
        self.segment = []
        self.segment_span = [None, None]

    # --- subgoal execution ---

    def _control(self, obs: Observation, frame: TextFrame) -> tuple[str, Optional[str]]:
        subgoal = self.plan[self.sub_index]
        self.stats["controller_calls"] += 1
        system = self._system("controller", {"subgoal": subgoal.render()})
        self.controller_messages.append({"role": "user", "content": frame.text})
        self.segment.append(f"Observation:\n{frame.text}")
        for attempt in range(2):
            reply = self._ask(system, self.controller_messages)
            verdict, action = self._parse_control(reply)
            if verdict == "invalid":
                continue
            self.controller_messages.append({"role": "assistant", "content": reply})
            if verdict == "action":
                self.segment.append(f"Action: {action}")
            else:
                self.segment.append(f"Controller: {verdict.upper()}")
            return verdict, action
        log.warning("controller reply unusable for %s; using noop", subgoal.render())
        self.segment.append("Action: noop")
        return ("action", "noop")

    @staticmethod
    def _parse_control(reply: str) -> tuple[str, Optional[str]]:
        match = _ACTION_RE.search(reply)
        token = match.group(1) if match else None
        if token is None:
            bare = _TOKEN_RE.search(reply)
            token = bare.group(1) if bare else None
        if token is None:
            return ("invalid", None)
        cleaned = token.strip().strip("`\"'.").strip()
        upper = cleaned.upper()
        if upper == SUCCEED:
            return ("succeed", None)
        if upper == FAILED:
            return ("failed", None)
        action = cleaned.lower().replace(" ", "_")
        if action in ACTION_INDEX:
            return ("action", action)
        return ("invalid", None)

    # --- terminal handling ---

    def _terminal(self, status: str, obs: Observation, frame: TextFrame) -> None:
        self.stats["subgoal_terminals"] += 1
        self.stats[f"subgoal_{status}"] += 1
        self._on_subgoal_terminal(status)
        confirmed = self.task_achievement in self.task_unlocks
        if status == "succeed":
            self.sub_index += 1
            self.sub_steps = 0
            self.controller_messages = []
            self.segment = []
            self.segment_span = [None, None]
            if self.sub_index < len(self.plan):
                return
            if confirmed or not self.task_was_new:
                self._finish_task(success=True, confirmed=confirmed)
            else:
                self._failure(obs, frame)
            return
        # failed or timed out: the unlock event still settles it
        if confirmed:
            self._finish_task(success=True, confirmed=True)
            return
        self._failure(obs, frame)

    def _on_subgoal_terminal(self, status: str) -> None:
        pass

    def _failure(self, obs: Observation, frame: TextFrame) -> None:
        if self.replanned:
            self._finish_task(success=False)
            return
        self.replanned = True
        self.stats["replans"] += 1
        if self._replan(obs, frame):
            return
        self._finish_task(success=False)

    def _replan(self, obs: Observation, frame: TextFrame) -> bool:
        subgoal = self.plan[self.sub_index] if self.sub_index < len(self.plan) else None
        failure = (
            f"task: {self.task}\n"
            + (f"failed subgoal: {subgoal.render()}\n" if subgoal else "")
            + f"plan so far: {'; '.join(s.render() for s in self.plan)}\n"
            + frame.text
        )
        self.stats["explainer_calls"] += 1
        explainer_messages: list[Message] = [{"role": "user", "content": failure}]
        explanation = self._ask(self._system("explainer"), explainer_messages)
        explainer_messages.append({"role": "assistant", "content": explanation})
        explainer_messages.append(
            {
                "role": "user",
                "content": render_prompt("replanner", {"task": self.task}),
            }
        )
        reply = self._ask(self._system("planner"), explainer_messages)
        try:
            plan = parse_plan(reply)
        except SubgoalError as err:
            log.warning("replan for %r unusable: %s", self.task, err)
            return False
        self._install_plan(plan, skill_key(obs), reused=False)
        return True

    def _finish_task(self, success: bool, confirmed: bool = False) -> None:
        if success:
            self.completed_tasks.append(self.task)
            self.stats["tasks_completed"] += 1
            if confirmed and not self.plan_reused and self.plan:
                self.skills.add(
                    SkillRecord(
                        task=self.task,
                        key=self.plan_key,
                        plan=tuple(self.plan),
                    )
                )
                self.stats["skills_stored"] += 1
        else:
            self.failed_tasks.append(self.task)
            self.stats["tasks_failed"] += 1
        self._clear_task()


class InductionPipelineAgent(SkillPipelineAgent):
    """Pipeline that induces game mechanisms after every terminal subgoal."""

    def __init__(
        self,
        gateway: Gateway,
        skills: Optional[SkillLibrary] = None,
        rules: Optional[RuleLibrary] = None,
        examples: Optional[dict[str, str]] = None,
        persist_dir: Optional[str | Path] = None,
        temperature: float = DEFAULT_TEMPERATURE,
        max_tokens: int = DEFAULT_MAX_TOKENS,
    ):
        super().__init__(
            gateway,
            skills=skills,
            examples=examples,
            persist_dir=persist_dir,
            temperature=temperature,
            max_tokens=max_tokens,
        )
        self.rules = rules if rules is not None else self._load_rules()

    def _load_rules(self) -> RuleLibrary:
        if self.persist_dir:
            path = self.persist_dir / "rules.jsonl"
            if path.exists():
                return RuleLibrary.load(path)
        return RuleLibrary()

    def _persist(self) -> None:
        super()._persist()
        if self.persist_dir:
            self.rules.save(self.persist_dir / "rules.jsonl")

    def _rules_suffix(self) -> str:
        if not len(self.rules):
            return ""
        return (
            "\n\nGame mechanisms learned so far:\n"
            + self.rules.render(max_tokens=RULE_TEXT_BUDGET)
        )

    def _on_subgoal_terminal(self, status: str) -> None:
        self.stats["induction_calls"] += 1
        subgoal = self.plan[self.sub_index] if self.sub_index < len(self.plan) else None
        header = f"subgoal: {subgoal.render()}\n" if subgoal else ""
        trajectory = f"{header}terminal status: {status}\n" + "\n".join(self.segment)
        system = render_prompt(
            "induction",
            {
                "examples": load_prompt("induction_examples"),
                "history trajectory": trajectory,
            },
        )
        reply = self.gateway.complete(
            request(system, (), self.temperature, self.max_tokens)
        ).text
        mechanisms = _MECHANISM_RE.findall(reply)
        if not mechanisms:
            log.warning("induction reply without Mechanism line; segment skipped")
            return
        span = (
            (self.segment_span[0], self.segment_span[1])
            if self.segment_span[0] is not None
            else (0, 0)
        )
        for text in mechanisms:
            self.rules.add(text, episode=self.episode_index, span=span)


def skill_library_agent(gateway: Gateway, **kwargs) -> SkillPipelineAgent:
    return SkillPipelineAgent(gateway, **kwargs)


def ifr_agent(gateway: Gateway, **kwargs) -> InductionPipelineAgent:
    return InductionPipelineAgent(gateway, **kwargs)
