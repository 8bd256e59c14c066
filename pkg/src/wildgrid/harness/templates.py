"""Prompt template loading and slot filling.

Templates live as plain text files next to the code so they can be read
and diffed without running anything. Slot names may contain spaces
(for example ``{history trajectory}``), so filling is a literal
replacement rather than ``str.format``.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

PROMPT_NAMES = (
    "react",
    "reflexion",
    "proposer",
    "planner",
    "explainer",
    "replanner",
    "controller",
    "induction",
    "induction_examples",
)


@lru_cache(maxsize=None)
def load_prompt(name: str) -> str:
    if name not in PROMPT_NAMES:
        raise KeyError(f"unknown prompt template {name!r}")
    path = resources.files("wildgrid.harness").joinpath("prompts", f"{name}.txt")
    return path.read_text(encoding="utf-8")


def fill(template: str, slots: dict[str, str]) -> str:
    """Replace ``{slot}`` markers; unknown markers are left untouched."""
    text = template
    for key, value in slots.items():
        text = text.replace("{" + key + "}", str(value))
    return text


def render_prompt(name: str, slots: dict[str, str] | None = None) -> str:
    return fill(load_prompt(name), slots or {})
