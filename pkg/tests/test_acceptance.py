"""End-to-end acceptance checks, one test per shipping criterion.

Each test asserts the criterion with its stated tolerance and records a
measured-values line that pytest prints in the terminal summary.
"""

import itertools
import json
import random
import statistics
import subprocess
import sys
import time
from dataclasses import replace
from pathlib import Path

import pytest

from conftest import ACCEPTANCE_RESULTS
from wildgrid.config import (
    builtin_world,
    diff_configs,
    fixture_text,
    parse_config,
    parse_overlay,
    serialize_config,
    world_names,
)
from wildgrid.describe import describe, estimate_tokens
from wildgrid.engine import Engine
from wildgrid.engine.state import Cell
from wildgrid.harness import (
    InductionPipelineAgent,
    RandomAgent,
    ReactAgent,
    ReflexionAgent,
    RuleLibrary,
    ScriptedGateway,
    SkillPipelineAgent,
    StepRecord,
    TOKEN_BUDGET,
    evaluate_rules,
    oracle_agent,
    run_episode,
    skill_key,
)
from wildgrid.items import ACTIONS
from wildgrid.metrics import ScoreSummary, episode_reward, score
from wildgrid.sampler import (
    AXES,
    ModificationSpec,
    SOLID_ITEMS,
    SOLID_SOURCES,
    SamplingExhausted,
    sample_world,
)
from wildgrid.verify import (
    Witness,
    build_tech_tree,
    closure_achievements,
    evaluate,
    explore_orders,
    verify,
)

from helpers import deadlock_world, make_obs, prompt_gateway

DATA = Path(__file__).parent / "data"


def test_fixture_conformance():
    """All 8 built-in worlds parse, round-trip byte-exactly, and verify."""
    started = time.perf_counter()
    default = builtin_world("default")
    for name in world_names():
        text = fixture_text(name)
        if name == "default":
            cfg = parse_config(text)
        else:
            cfg = parse_overlay(text, default)
        assert cfg == builtin_world(name)

        canonical = serialize_config(cfg)
        assert serialize_config(parse_config(canonical)) == canonical

        report = verify(cfg)
        assert report.passed, f"{name}: {report.render()}"
        for section in ("feasibility", "accessibility", "balance", "supply"):
            assert getattr(report, section).passed, f"{name}: {section}"
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    ACCEPTANCE_RESULTS["fixture conformance"] = (
        f"8/8 worlds parse, round-trip byte-exact, verify pass in {elapsed:.2f}s"
    )


def test_deadlock_rejection():
    """The wood/wood_pickaxe bootstrap cycle fails feasibility exactly."""
    report = verify(deadlock_world())
    assert not report.passed
    assert not report.feasibility.passed
    assert report.feasibility.witnesses == (
        Witness(
            kind="cycle",
            subject=("wood", "wood_pickaxe"),
            detail="mutual prerequisites: wood <-> wood_pickaxe",
        ),
    )
    ACCEPTANCE_RESULTS["deadlock rejection"] = (
        "wood <-> wood_pickaxe cycle reported as the exact feasibility witness"
    )


def test_sampler_soundness():
    """500 verified samples across every axis combination, plus the
    variant guarantees, inside the two-minute budget."""
    started = time.perf_counter()
    combos = [
        frozenset(c)
        for n in range(1, len(AXES) + 1)
        for c in itertools.combinations(AXES, n)
    ]
    assert len(combos) == 7

    collected = 0
    skipped = 0
    bijections = 0
    seed = 0
    while collected < 500:
        for axes in combos:
            if collected >= 500:
                break
            try:
                cfg = sample_world(ModificationSpec(axes, "visual_misleading", seed))
            except SamplingExhausted:
                skipped += 1
                continue
            assert verify(cfg, seed=seed).passed, f"axes={sorted(axes)} seed={seed}"

            furnace = cfg.place_rule("furnace")
            for item, _count in furnace.uses:
                assert not cfg.ignitable(item)

            if "task_dependency" in axes:
                gained = []
                for source in SOLID_SOURCES:
                    items = [item for item, _ in cfg.collect_rule(source).receive]
                    assert len(items) == 1
                    gained.extend(items)
                assert sorted(gained) == sorted(SOLID_ITEMS)
                bijections += 1
            collected += 1
        seed += 1

    # empirical secondary-drop frequency over 1e5 engine rolls
    cfg = sample_world(
        ModificationSpec(frozenset({"task_dependency"}), "probabilistic", 2)
    )
    rule = next(
        cfg.collect_rule(m)
        for m in ("stone", "coal", "iron", "diamond")
        if len({item for item, _ in cfg.collect_rule(m).receive}) == 2
    )
    extra = next(item for item, y in rule.receive if y.probability < 1.0)
    assert next(y for item, y in rule.receive if item == extra).probability == 0.10

    engine = Engine(cfg, seed=0)
    engine.reset()
    state = engine.state
    agent = state.agent
    for tool, count in rule.require:
        agent.inventory[tool] = count
    for facing in ((0, -1), (0, 1), (-1, 0), (1, 0)):
        fx, fy = agent.x + facing[0], agent.y + facing[1]
        if state.in_bounds(fx, fy):
            agent.facing = facing
            break
    rolls = 100_000
    for _ in range(rolls):
        entity = state.entity_at.get((fx, fy))
        if entity is not None:
            state.remove_entity(entity)
        state.objects.pop((fx, fy), None)
        state.set_material(fx, fy, rule.target)
        engine._do()
    rate = agent.count(extra) / rolls
    assert 0.08 <= rate <= 0.12

    elapsed = time.perf_counter() - started
    assert elapsed < 120.0
    ACCEPTANCE_RESULTS["sampler soundness"] = (
        f"500/500 sampled worlds verify in {elapsed:.1f}s "
        f"({skipped} exhausted seeds skipped, {bijections} bijections checked); "
        f"secondary drop rate {rate:.4f} in [0.08, 0.12]"
    )


def trajectory_fingerprint(world="default", seed=0, agent_seed=7, steps=300):
    """Digest of a full replay: per-step rewards, unlocks, and end state."""
    import hashlib

    engine = Engine(builtin_world(world), seed)
    engine.reset()
    rng = random.Random(agent_seed)
    log = []
    unlocked = set()
    for _ in range(steps):
        action = rng.choice(ACTIONS)
        result = engine.step(action)
        unlocked.update(result.info["newly_unlocked"])
        log.append(
            {
                "action": action,
                "reward": result.reward,
                "tick": result.info["tick"],
                "unlocked": list(result.info["newly_unlocked"]),
                "health": result.observation.health,
                "done": result.done,
            }
        )
        if result.done:
            break
    payload = {
        "log": log,
        "rewards": sum(step["reward"] for step in log),
        "unlocked": sorted(unlocked),
        "snapshot": engine.state.snapshot(),
    }
    blob = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def test_determinism_across_runs_and_restarts():
    """Same (config, seed, actions) replays bit-identically, including in
    fresh interpreter processes."""
    first = trajectory_fingerprint()
    second = trajectory_fingerprint()
    assert first == second

    code = (
        f"import sys; sys.path.insert(0, {str(DATA.parent)!r}); "
        "import test_acceptance as t; print(t.trajectory_fingerprint())"
    )
    restarts = []
    for _ in range(2):
        proc = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True,
            text=True,
            check=True,
        )
        restarts.append(proc.stdout.strip().splitlines()[-1])
    assert restarts == [first, first]

    # the runner path agrees step for step as well
    runs = [
        run_episode(
            builtin_world("default"),
            seed=3,
            agent=RandomAgent(11),
            max_steps=400,
            world="default",
        )
        for _ in range(2)
    ]
    assert [s.to_dict() for s in runs[0].steps] == [
        s.to_dict() for s in runs[1].steps
    ]
    assert runs[0].reward == runs[1].reward
    assert set(runs[0].unlocked) == set(runs[1].unlocked)
    ACCEPTANCE_RESULTS["determinism"] = (
        f"4/4 replay fingerprints identical ({first[:12]}...)"
    )


def test_metrics_exactness():
    """Score formula boundary cases plus exact reward recomputation on
    100 random-agent episodes."""
    assert score([0.0] * 22) == 0.0
    assert score([100.0] * 22) == pytest.approx(100.0, abs=1e-9)
    single = score([100.0] + [0.0] * 21)
    assert single == pytest.approx(0.2334, abs=1e-4)
    assert single == pytest.approx(101.0 ** (1.0 / 22.0) - 1.0, abs=1e-12)

    agent = RandomAgent(0)
    names = list(world_names())
    exact = 0
    for index in range(100):
        name = names[index % len(names)]
        trajectory = run_episode(
            builtin_world(name),
            seed=index,
            agent=agent,
            max_steps=150,
            world=name,
        )
        recomputed = episode_reward([s.to_dict() for s in trajectory.steps])
        if recomputed == trajectory.reward:
            exact += 1
    assert exact == 100
    ACCEPTANCE_RESULTS["metrics exactness"] = (
        f"score cases 0/100/0.2334 exact; {exact}/100 episode rewards "
        "recompute to the streamed value exactly"
    )


def test_descriptor_goldens_and_token_range():
    """Both reference frames byte-exact; 1000 random-play frames have
    token estimates almost always inside [100, 200]."""
    full = describe(
        make_obs(
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
        ),
        person="first",
    )
    assert full.text == (DATA / "frame_full.txt").read_text(encoding="utf-8")

    nearby = describe(
        make_obs(
            fill="path",
            cells={(-2, -1): Cell("stone"), (-3, 0): Cell("tree")},
            facing=(-1, 0),
            standing="path",
        ),
        person="first",
    )
    assert "\n".join(nearby.lines[2:4]) == (
        (DATA / "frame_nearby.txt").read_text(encoding="utf-8")
    )

    cfg = builtin_world("default")
    rng = random.Random(123)
    in_range = 0
    frames = 0
    seed = 0
    engine = Engine(cfg, seed)
    engine.reset()
    while frames < 1000:
        result = engine.step(rng.choice(ACTIONS))
        if result.done:
            seed += 1
            engine = Engine(cfg, seed)
            engine.reset()
            continue
        frame = describe(result.observation, person="second")
        assert frame.tokens == estimate_tokens(frame.text)
        if 100 <= frame.tokens <= 200:
            in_range += 1
        frames += 1
    assert in_range >= 950
    ACCEPTANCE_RESULTS["descriptor goldens"] = (
        f"2/2 reference frames byte-exact; {in_range}/1000 frames in "
        "[100, 200] tokens (>= 950 required)"
    )


def test_playability_oracle():
    """The solver unlocks >= 10 achievements (median of 5 seeds) in every
    world and beats random play's score everywhere."""
    medians = {}
    for name in world_names():
        cfg = builtin_world(name)
        oracle_runs = [
            run_episode(
                cfg, seed=s, agent=oracle_agent(cfg), max_steps=10000, world=name
            )
            for s in range(5)
        ]
        random_runs = [
            run_episode(cfg, seed=s, agent=RandomAgent(0), max_steps=10000, world=name)
            for s in range(5)
        ]
        medians[name] = statistics.median(len(t.unlocked) for t in oracle_runs)
        oracle_score = ScoreSummary.from_trials(
            [t.to_trial() for t in oracle_runs]
        ).score
        random_score = ScoreSummary.from_trials(
            [t.to_trial() for t in random_runs]
        ).score
        assert medians[name] >= 10, f"{name}: median {medians[name]}"
        assert random_score < oracle_score, f"{name}: {random_score} vs {oracle_score}"
    low = min(medians.values())
    high = max(medians.values())
    ACCEPTANCE_RESULTS["playability oracle"] = (
        f"oracle medians {low}..{high} of 22 across 8 worlds (>= 10 required); "
        "random score strictly lower in 8/8"
    )


def _feed(agent, action, unlocked=()):
    agent.on_step_result(
        StepRecord(
            index=0,
            requested=action,
            action=action,
            reward=1.0 * len(unlocked),
            health=9,
            unlocked=tuple(unlocked),
            done=False,
        )
    )


def test_pipeline_mechanics_offline():
    """Scripted-gateway checks for every dialogue and pipeline mechanism."""
    # ReAct separates THINK from ACTION and returns the parsed action
    react = ReactAgent(ScriptedGateway(["THINK: scout first", "ACTION: move_up"]))
    react.on_episode_start("default", 0)
    obs = make_obs()
    frame = describe(obs, person="second")
    assert react.act(obs, frame) == "move_up"
    assert [m["role"] for m in react.messages] == ["user", "assistant", "assistant"]

    # Reflexion reflects on exactly the step where the raw history first
    # exceeds the default budget: 400-token observations plus 3-token
    # replies cross 3896 on the 10th turn (3624 -> 4027)
    from wildgrid.describe import TextFrame
    from wildgrid.harness.templates import load_prompt

    body = " ".join(f"w{i}" for i in range(392))
    big = TextFrame(lines=(body,), tokens=estimate_tokens(body))

    def serve(req):
        if req.system.startswith(load_prompt("reflexion")[:40]):
            return "REFLECTION: keep moving"
        return "ACTION: noop"

    reflexion = ReflexionAgent(ScriptedGateway(serve))
    assert reflexion.budget == TOKEN_BUDGET == 3896
    reflexion.on_episode_start("default", 0)
    for turn in range(1, 10):
        reflexion.act(obs, big)
        assert reflexion.reflection_count == 0, f"turn {turn}"
    reflexion.act(obs, big)
    assert reflexion.reflection_count == 1

    # the skill library stores confirmed plans only and reuses them on an
    # exact (task, situation) key without consulting the planner again
    confirmed = SkillPipelineAgent(
        prompt_gateway(
            {
                "proposer": "Task: wake up",
                "planner": "sleep()",
                "controller": ["Action: sleep", "SUCCEED", "Action: noop"],
            }
        )
    )
    confirmed.on_episode_start("default", 0)
    assert confirmed.act(obs, frame) == "sleep"
    _feed(confirmed, "sleep", unlocked=("wake_up",))
    confirmed.act(obs, frame)
    assert confirmed.stats["skills_stored"] == 1
    assert confirmed.stats["skills_reused"] == 1
    assert confirmed.stats["planner_calls"] == 1
    assert confirmed.skills.lookup("wake up", skill_key(obs)) is not None

    unconfirmed = SkillPipelineAgent(
        prompt_gateway(
            {
                "proposer": "Task: collect wood",
                "planner": 'mine("tree", 1)',
                "explainer": "the tree resisted",
                "controller": ["Action: do", "SUCCEED", "Action: do", "SUCCEED",
                               "Action: noop"],
            }
        )
    )
    unconfirmed.on_episode_start("default", 0)
    unconfirmed.act(obs, frame)
    _feed(unconfirmed, "do")
    unconfirmed.act(obs, frame)
    _feed(unconfirmed, "do")
    unconfirmed.act(obs, frame)
    assert unconfirmed.stats["skills_stored"] == 0
    assert len(unconfirmed.skills) == 0
    assert unconfirmed.stats["tasks_failed"] == 1

    # induction fires once per subgoal terminal; the rule library grows
    # monotonically and duplicate-free across the 5 learning episodes
    controller_queue = []
    episode = {"index": 0}
    induction = InductionPipelineAgent(
        prompt_gateway(
            {
                "proposer": "Task: wake up",
                "planner": "sleep()",
                "controller": lambda req: (
                    controller_queue.pop(0) if controller_queue else "Action: noop"
                ),
                "induction": lambda req: (
                    f"Mechanism: fact from episode {episode['index']}.\n"
                    "Mechanism: sleep always restores energy."
                ),
            }
        )
    )
    sizes = []
    for index in range(1, 6):
        episode["index"] = index
        controller_queue[:] = ["Action: sleep", "SUCCEED"]
        induction.on_episode_start("default", index)
        induction.act(obs, frame)
        _feed(induction, "sleep", unlocked=("wake_up",))
        induction.act(obs, frame)
        sizes.append(len(induction.rules))
    assert induction.stats["induction_calls"] == induction.stats["subgoal_terminals"]
    assert induction.stats["induction_calls"] == 5
    assert sizes == sorted(sizes)
    assert sizes == [2, 3, 4, 5, 6]
    keys = [r.key for r in induction.rules]
    assert len(keys) == len(set(keys))

    # a rule library equal to the ground-truth delta renderings scores
    # perfect precision and recall for every modified world
    default = builtin_world("default")
    pairs = 0
    for name in world_names():
        if name == "default":
            continue
        truth = [d.text for d in diff_configs(default, builtin_world(name))]
        library = RuleLibrary()
        for text in truth:
            library.add(text)
        assert evaluate_rules(library, truth) == (1.0, 1.0), name
        pairs += 1
    assert pairs == 7
    ACCEPTANCE_RESULTS["pipeline mechanics"] = (
        "react parses THINK/ACTION; reflexion trips at 3896 on turn 10 exactly; "
        "skills store confirmed-only and reuse on exact key; induction 1/terminal "
        "with monotone dedup over 5 episodes; evaluate_rules (1.0, 1.0) on 7/7 deltas"
    )


def _quiet_npcs(cfg, keep=()):
    """Drop kill/defeat/eat achievements for all creatures not in `keep`."""
    npcs = []
    for kind, spec in cfg.npc:
        if kind in keep:
            npcs.append((kind, spec))
        else:
            npcs.append((kind, replace(spec, eatable=False, defeatable=False)))
    return replace(cfg, npc=tuple(npcs))


def test_engine_oracle_equivalence_small_scale():
    """Dependency-graph feasibility matches exhaustive order search on
    restricted configs."""
    base = builtin_world("default")
    tree = base.collect_rule("tree")
    stone = base.collect_rule("stone")
    grass = base.collect_rule("grass")
    table = base.place_rule("table")
    plant = base.place_rule("plant")
    wood_pickaxe = next(r for r in base.make if r.name == "wood_pickaxe")
    stone_pickaxe = next(r for r in base.make if r.name == "stone_pickaxe")

    zero_grass = replace(
        grass,
        receive=tuple(
            (item, replace(y, probability=0.0)) for item, y in grass.receive
        ),
    )
    spawning_tree = replace(
        tree, leaves=replace(tree.leaves, objects=(("plant", 0.5),))
    )

    variants = {
        "single collect": (
            replace(base, collect=(tree,), place=(), make=()),
            {"wake_up", "kill_cow", "defeat_zombie", "defeat_skeleton",
             "collect_wood"},
        ),
        "tool chain": (
            _quiet_npcs(
                replace(
                    base,
                    collect=(tree, stone),
                    place=(table,),
                    make=(wood_pickaxe,),
                )
            ),
            {"wake_up", "collect_wood", "place_table", "make_wood_pickaxe",
             "collect_stone"},
        ),
        "circular requirement": (
            _quiet_npcs(
                replace(
                    base,
                    collect=(
                        tree,
                        replace(stone, require=(("stone_pickaxe", 1),)),
                    ),
                    place=(table,),
                    make=(stone_pickaxe,),
                )
            ),
            {"wake_up", "collect_wood", "place_table"},
        ),
        "zero-probability yield": (
            _quiet_npcs(
                replace(base, collect=(tree, zero_grass), place=(plant,), make=())
            ),
            {"wake_up", "collect_wood"},
        ),
        "plant spawned by collection": (
            _quiet_npcs(
                replace(base, collect=(spawning_tree,), place=(), make=()),
                keep=("plant",),
            ),
            {"wake_up", "collect_wood", "eat_plant"},
        ),
    }

    for label, (cfg, expected) in variants.items():
        truth = evaluate(build_tech_tree(cfg))
        from_graph = {
            name[4:] for name, ok in truth.items()
            if name.startswith("ach:") and ok
        }
        assert len(expected) <= 6, label
        assert from_graph == expected, label
        assert closure_achievements(cfg) == expected, label
        assert explore_orders(cfg) == expected, label
    ACCEPTANCE_RESULTS["engine/oracle equivalence"] = (
        "5/5 restricted configs: dependency graph == fixed point == "
        "exhaustive order search"
    )
