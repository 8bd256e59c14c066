"""Shared builders for the test suite: synthetic observations, rule
variants of the default world, and scripted gateway plumbing."""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from wildgrid.config import CollectRule, builtin_world
from wildgrid.engine import params
from wildgrid.engine.state import Cell, Observation
from wildgrid.harness import ScriptedGateway
from wildgrid.harness.templates import load_prompt

VIEW_ROWS = 2 * params.VIEW_DY + 1
VIEW_COLS = 2 * params.VIEW_DX + 1


def make_view(
    fill: str = "grass",
    cells: Optional[dict[tuple[int, int], Cell]] = None,
) -> tuple[tuple[Cell, ...], ...]:
    """A full local view of `fill` material with point overrides.

    `cells` is keyed by agent-relative (dx, dy) offsets, y growing north.
    """
    cells = cells or {}
    rows = []
    for dy in range(params.VIEW_DY, -params.VIEW_DY - 1, -1):
        row = []
        for dx in range(-params.VIEW_DX, params.VIEW_DX + 1):
            row.append(cells.get((dx, dy), Cell(fill)))
        rows.append(tuple(row))
    return tuple(rows)


def make_obs(
    fill: str = "grass",
    cells: Optional[dict[tuple[int, int], Cell]] = None,
    facing: tuple[int, int] = (0, -1),
    standing: str = "grass",
    inventory: tuple[tuple[str, int], ...] = (),
    last_action: Optional[str] = None,
    health: int = 9,
    food: int = 9,
    drink: int = 9,
    energy: int = 9,
    sleeping: bool = False,
) -> Observation:
    return Observation(
        view=make_view(fill, cells),
        facing=facing,
        standing=standing,
        health=health,
        food=food,
        drink=drink,
        energy=energy,
        inventory=inventory,
        last_action=last_action,
        sleeping=sleeping,
    )


def deadlock_world():
    """Default rules except chopping trees needs the wood pickaxe, which
    itself needs wood: the canonical unobtainable-bootstrap cycle."""
    base = builtin_world("default")
    collect = tuple(
        replace(rule, require=(("wood_pickaxe", 1),))
        if rule.target == "tree"
        else rule
        for rule in base.collect
    )
    return replace(base, collect=collect)


def swap_collect(cfg, target: str, rule: CollectRule):
    """Replace the collect rule for one target material."""
    return replace(
        cfg,
        collect=tuple(rule if r.target == target else r for r in cfg.collect),
    )


class PromptScript:
    """Reply callable for ScriptedGateway that dispatches on which prompt
    template the request's system text was rendered from."""

    def __init__(self, handlers: dict[str, object]):
        # handler: reply string, list of replies (consumed), or callable(req)
        self.handlers = dict(handlers)
        self._prefixes = {}
        for name in self.handlers:
            template = load_prompt(name)
            brace = template.find("{")
            # some templates share openings; match the longest stable prefix
            self._prefixes[name] = template if brace < 0 else template[:brace]

    def __call__(self, req) -> str:
        best = None
        for name, prefix in self._prefixes.items():
            if req.system.startswith(prefix):
                if best is None or len(prefix) > len(self._prefixes[best]):
                    best = name
        if best is None:
            raise AssertionError(
                f"no handler for system prompt: {req.system[:60]!r}"
            )
        handler = self.handlers[best]
        if callable(handler):
            return handler(req)
        if isinstance(handler, list):
            return handler.pop(0) if len(handler) > 1 else handler[0]
        return handler


def prompt_gateway(handlers: dict[str, object]) -> ScriptedGateway:
    return ScriptedGateway(PromptScript(handlers))
