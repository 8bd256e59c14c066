"""Deterministic gridworld simulation."""

from . import params
from .rng import Dice
from .sim import Engine, EpisodeFinished, MAKE_ACTIONS, PLACE_ACTIONS
from .state import (
    AgentState,
    Cell,
    DIRECTIONS,
    Entity,
    GameState,
    NEIGHBOUR_OFFSETS,
    Observation,
    StepResult,
)
from .worldgen import GenerationError, generate

__all__ = [
    "AgentState",
    "Cell",
    "DIRECTIONS",
    "Dice",
    "Engine",
    "Entity",
    "EpisodeFinished",
    "GameState",
    "GenerationError",
    "MAKE_ACTIONS",
    "NEIGHBOUR_OFFSETS",
    "Observation",
    "PLACE_ACTIONS",
    "StepResult",
    "params",
    "generate",
]
