"""Observation-to-text rendering: golden frames, ordering, token counts."""

from pathlib import Path

import pytest

from wildgrid.describe import DARKNESS, describe, estimate_tokens
from wildgrid.engine.state import Cell

from helpers import make_obs

DATA = Path(__file__).parent / "data"


def golden(name):
    return (DATA / name).read_text(encoding="utf-8")


def test_full_frame_matches_golden():
    obs = make_obs(
        fill="path",
        cells={
            (-1, 0): Cell("tree"),
            (0, -1): Cell("stone"),
            (-1, -1): Cell("stone"),
            (-1, 1): Cell("stone"),
            (-3, 0): Cell("water"),
            (-3, 3): Cell("sand"),
        },
        facing=(-1, 0),
        standing="path",
        last_action="move_left",
    )
    frame = describe(obs, person="first")
    assert frame.text == golden("frame_full.txt")
    assert frame.tokens == estimate_tokens(frame.text)


def test_nearby_block_listing_matches_golden():
    obs = make_obs(
        fill="path",
        cells={(-2, -1): Cell("stone"), (-3, 0): Cell("tree")},
        facing=(-1, 0),
        standing="path",
    )
    frame = describe(obs, person="first")
    assert "\n".join(frame.lines[2:4]) == golden("frame_nearby.txt")


def test_line_order_without_action():
    frame = describe(make_obs(), person="first")
    assert frame.lines[0] == "I am on the grass."
    assert frame.lines[1] == "I see: (object with coordinate)"
    assert frame.lines[-2].startswith("My status: <health: 9/9")
    assert frame.lines[-1] == "I have nothing in your inventory."


def test_second_person_wording():
    obs = make_obs(last_action="do", inventory=(("wood", 2),))
    frame = describe(obs, person="second")
    assert frame.lines[0] == "You took action do."
    assert frame.lines[1] == "You are on the grass."
    assert frame.lines[2] == "You see: (object with coordinate)"
    assert frame.lines[3] == "grass is in front of you."
    assert frame.lines[-2].startswith("Your status:")
    assert frame.lines[-1] == "Your inventory: <wood: 2>"


def test_inventory_follows_fixed_order():
    obs = make_obs(inventory=(("wood", 1), ("iron", 3), ("wood_sword", 1)))
    frame = describe(obs)
    assert frame.lines[-1] == "My inventory: <wood: 1, iron: 3, wood_sword: 1>"


def test_out_of_bounds_renders_as_darkness():
    obs = make_obs(cells={(0, -1): Cell(None), (1, 0): Cell(None)}, facing=(0, -1))
    frame = describe(obs)
    assert f"{DARKNESS} is in front of me." in frame.lines
    coords = next(line for line in frame.lines if line.startswith("<"))
    assert f"{DARKNESS}(0, -1)" in coords
    assert f"{DARKNESS}(1, 0)" in coords


def test_neighbour_listing_order_is_fixed():
    frame = describe(make_obs())
    coords = next(line for line in frame.lines if line.startswith("<"))
    assert coords.startswith(
        "<grass(-1, 0), grass(1, 0), grass(0, -1), grass(0, 1), "
        "grass(-1, -1), grass(1, -1), grass(-1, 1), grass(1, 1)>"
    )


def test_objects_shadow_their_material():
    obs = make_obs(cells={(1, 0): Cell("grass", "cow"), (3, 2): Cell("grass", "zombie")})
    frame = describe(obs)
    coords = next(line for line in frame.lines if line.startswith("<"))
    assert "cow(1, 0)" in coords
    assert "zombie(3, 2)" in coords
    assert "grass(1, 0)" not in coords


def test_far_listing_keeps_nearest_material_instance():
    # two stones beyond the ring: only the closer one is listed
    obs = make_obs(cells={(2, 0): Cell("stone"), (4, 3): Cell("stone")})
    frame = describe(obs)
    coords = next(line for line in frame.lines if line.startswith("<"))
    assert "stone(2, 0)" in coords
    assert "stone(4, 3)" not in coords


def test_far_listing_sorts_by_distance():
    obs = make_obs(
        cells={
            (4, 0): Cell("water"),
            (0, 2): Cell("tree"),
            (-2, -2): Cell("stone"),
        }
    )
    frame = describe(obs)
    coords = next(line for line in frame.lines if line.startswith("<"))
    # chebyshev first, then manhattan: tree (2, 2) < stone (2, 4) < water (4, 4)
    assert coords.index("tree(") < coords.index("stone(") < coords.index("water(")


def test_every_listed_material_shown_once():
    frame = describe(make_obs(fill="sand"))
    coords = next(line for line in frame.lines if line.startswith("<"))
    assert coords.count("sand(") == 8  # ring only; no far duplicate


def test_token_estimator_counts_words_and_punctuation():
    assert estimate_tokens("I am on the grass.") == 6
    assert estimate_tokens("wood: 2, stone: 1") == 7
    assert estimate_tokens("") == 0
    assert estimate_tokens("anything", tokenizer=lambda text: 42) == 42


def test_frame_token_count_matches_text():
    obs = make_obs(last_action="noop", inventory=(("sapling", 1),))
    frame = describe(obs)
    assert frame.tokens == estimate_tokens(frame.text)
    assert frame.text == "\n".join(frame.lines)
