"""Engine tuning constants.

The rule documents define *what* mechanics do; everything about *rates*
(decay periods, spawn pressure, creature stats, terrain densities) lives
here so tests can pin one authoritative set of numbers.
"""

WORLD_SIZE = 64
EPISODE_LIMIT = 10000

# Local view half-extents: columns dx in [-4, 4], rows dy in [-3, 3].
VIEW_DX = 4
VIEW_DY = 3

# --- stat dynamics (periods in ticks) ---
FOOD_DECAY_PERIOD = 25
DRINK_DECAY_PERIOD = 20
ENERGY_DECAY_PERIOD = 30
REGEN_PERIOD = 25       # +1 health when food, drink and energy are all > 0
STARVE_PERIOD = 15      # -1 health per stat sitting at 0
MAX_STAT = 9

# --- day cycle ---
DAY_LENGTH = 300
NIGHT_START = 200       # ticks [NIGHT_START, DAY_LENGTH) of each cycle are night

# --- creatures ---
COW_COUNT = 12
SKELETON_COUNT = 5
ZOMBIE_CAP = 4
SKELETON_CAP = 7
ZOMBIE_SPAWN_PROB = 0.05    # per night tick while below cap
SKELETON_SPAWN_PROB = 0.01  # per tick while below cap
SPAWN_MIN_DIST = 6          # Chebyshev ring around the agent for spawns
SPAWN_MAX_DIST = 14
ZOMBIE_DAYLIGHT_DESPAWN_DIST = 10
CHASE_RADIUS = 8
NPC_MOVE_PROB = 0.5
MELEE_COOLDOWN = 5
ARROW_RANGE = 5
ARROW_COOLDOWN = 8
PLANT_RIPEN_TICKS = 100

CREATURE_HP = {"cow": 3, "zombie": 5, "skeleton": 3, "plant": 1}

# Attack strength by best sword held (checked in this order).
SWORD_DAMAGE = (("iron_sword", 5), ("stone_sword", 3), ("wood_sword", 2))
BARE_HAND_DAMAGE = 1

# --- world generation ---
# Fraction cuts for the base noise fabric.
SAND_FRACTION = 0.15
GRASS_FRACTION = 0.45   # grass occupies (SAND, SAND+GRASS]
PATH_FRACTION_OF_STONE = 0.18

# Target cell counts for sprinkled special materials. Iron carries
# extra stock: worlds that route 10%-probability sapling drops through
# it need around twenty minable cells to satisfy the supply check.
SPECIAL_TARGETS = {
    "water": 56,
    "tree": 48,
    "coal": 24,
    "iron": 28,
    "diamond": 12,
    "lava": 12,
}

# Minimum instances of each special that must be collectable from the
# spawn's connected walkable region; generation retries otherwise.
REACHABLE_SPECIAL_MIN = 2
GENERATION_RETRIES = 12
