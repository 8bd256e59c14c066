"""Closed vocabularies shared by every layer: materials, items, creatures,
actions, and achievements.

The game never invents names at runtime; all rule tables and observations
draw from the tuples below, so parsers and serializers can validate against
them and tests can enumerate them exhaustively.
"""

from __future__ import annotations

# --- terrain materials (exactly the ten the map may contain) ---
MATERIALS = (
    "water",
    "grass",
    "stone",
    "path",
    "sand",
    "tree",
    "lava",
    "coal",
    "iron",
    "diamond",
)

# Materials produced by the base noise fabric; everything else is sprinkled
# next to its configured host material afterwards.
BASE_MATERIALS = ("grass", "sand", "stone", "path")
SPECIAL_MATERIALS = ("coal", "iron", "diamond", "lava", "tree", "water")

# Liquids support drinking and are never removed by collection.
LIQUIDS = ("water", "lava")

# --- inventory items ---
TOOLS = (
    "wood_pickaxe",
    "stone_pickaxe",
    "iron_pickaxe",
    "wood_sword",
    "stone_sword",
    "iron_sword",
)
RESOURCES = ("wood", "stone", "coal", "iron", "diamond", "sapling")

# "drink" may appear as a collect yield; it routes to the drink stat instead
# of the inventory.
ITEMS = RESOURCES + ("drink",) + TOOLS

# Display order for inventories (observation frames and server payloads):
# sapling leads, then raw resources, then tools.
INVENTORY_ORDER = ("sapling", "wood", "stone", "coal", "iron", "diamond") + TOOLS

# --- creatures and placeable objects ---
CREATURES = ("cow", "zombie", "skeleton", "plant")
PLACEABLE = ("stone", "table", "furnace", "plant")
OBJECTS = ("table", "furnace") + CREATURES

# --- actions (17, fixed order; index is the wire id) ---
ACTIONS = (
    "noop",
    "move_left",
    "move_right",
    "move_up",
    "move_down",
    "do",
    "sleep",
    "place_stone",
    "place_table",
    "place_furnace",
    "place_plant",
    "make_wood_pickaxe",
    "make_stone_pickaxe",
    "make_iron_pickaxe",
    "make_wood_sword",
    "make_stone_sword",
    "make_iron_sword",
)

ACTION_INDEX = {name: i for i, name in enumerate(ACTIONS)}

# --- achievements (22, fixed order) ---
ACHIEVEMENTS = (
    "collect_coal",
    "collect_diamond",
    "collect_drink",
    "collect_iron",
    "collect_sapling",
    "collect_stone",
    "collect_wood",
    "defeat_skeleton",
    "defeat_zombie",
    "eat_plant",
    "kill_cow",
    "make_iron_pickaxe",
    "make_iron_sword",
    "make_stone_pickaxe",
    "make_stone_sword",
    "make_wood_pickaxe",
    "make_wood_sword",
    "place_furnace",
    "place_plant",
    "place_stone",
    "place_table",
    "wake_up",
)

# Collect yields that unlock an achievement when gained.
COLLECT_UNLOCKS = {
    "wood": "collect_wood",
    "stone": "collect_stone",
    "coal": "collect_coal",
    "iron": "collect_iron",
    "diamond": "collect_diamond",
    "sapling": "collect_sapling",
    "drink": "collect_drink",
}

DEFEAT_UNLOCKS = {
    "cow": "kill_cow",
    "zombie": "defeat_zombie",
    "skeleton": "defeat_skeleton",
    "plant": "eat_plant",
}

# Keys of the terrain_neighbour section. "player" names the spawn material.
NEIGHBOUR_KEYS = ("coal", "iron", "diamond", "lava", "tree", "player", "water")

# Materials that may carry an ignitability flag.
IGNITABLE_KEYS = ("wood", "coal", "iron", "diamond", "stone")

WORLD_NAMES = (
    "default",
    "terrain",
    "survival",
    "task_dep",
    "terr_surv",
    "terr_task",
    "surv_task",
    "all_three",
)
