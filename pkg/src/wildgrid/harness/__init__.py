"""Agent harness: episode runner, scripted baselines, LLM pipelines."""

from .base import (
    FAILED,
    SUCCEED,
    Agent,
    RandomAgent,
    StepRecord,
    Trajectory,
    random_agent,
    run_episode,
)
from .gateway import (
    CassetteGateway,
    Gateway,
    GatewayRequest,
    GatewayResponse,
    HttpGateway,
    ScriptedGateway,
)
from .history import STEP_BUDGET, TOKEN_BUDGET, trim_history
from .oracle import InfeasibleWorld, OracleAgent, oracle_agent
from .pipeline import (
    LEARNING_EPISODES,
    TASK_POOL,
    InductionPipelineAgent,
    SkillPipelineAgent,
    achievement_for,
    ifr_agent,
    skill_library_agent,
)
from .react import ReactAgent, ReflexionAgent, react_agent, reflexion_agent
from .rules import RuleLibrary, RuleRecord, evaluate_rules, normalize_rule
from .skills import SkillKey, SkillLibrary, SkillRecord, skill_key
from .subgoals import (
    SUBGOAL_TIMEOUT,
    Subgoal,
    SubgoalError,
    parse_plan,
    parse_subgoal,
)

__all__ = [
    "Agent",
    "CassetteGateway",
    "FAILED",
    "Gateway",
    "GatewayRequest",
    "GatewayResponse",
    "HttpGateway",
    "InductionPipelineAgent",
    "InfeasibleWorld",
    "LEARNING_EPISODES",
    "OracleAgent",
    "RandomAgent",
    "ReactAgent",
    "ReflexionAgent",
    "RuleLibrary",
    "RuleRecord",
    "STEP_BUDGET",
    "SUBGOAL_TIMEOUT",
    "ScriptedGateway",
    "SkillKey",
    "SkillLibrary",
    "SkillPipelineAgent",
    "SkillRecord",
    "StepRecord",
    "SUCCEED",
    "Subgoal",
    "SubgoalError",
    "TASK_POOL",
    "TOKEN_BUDGET",
    "Trajectory",
    "achievement_for",
    "evaluate_rules",
    "ifr_agent",
    "normalize_rule",
    "oracle_agent",
    "parse_plan",
    "parse_subgoal",
    "random_agent",
    "react_agent",
    "reflexion_agent",
    "run_episode",
    "skill_key",
    "skill_library_agent",
    "trim_history",
]
