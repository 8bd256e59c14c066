"""Operator entry points: gen, verify, run, eval, describe, serve, worlds.

Exit codes: 0 success, 1 domain failure (failed check, death of a
precondition), 2 usage or parse errors. Every command prints a banner
with the flags that reproduce it.
"""

from __future__ import annotations

import json
import statistics
import sys
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .config import ConfigError, WorldConfig, builtin_world, parse_config, serialize_config, world_names
from .describe import describe
from .engine import Engine
from .harness import (
    LEARNING_EPISODES,
    CassetteGateway,
    HttpGateway,
    ScriptedGateway,
    Trajectory,
    ifr_agent,
    oracle_agent,
    random_agent,
    react_agent,
    reflexion_agent,
    run_episode,
    skill_library_agent,
)
from .items import ACHIEVEMENTS
from .metrics import ScoreSummary, TrajectoryError, episode_reward, group_trials, leaderboard
from .sampler import AXES, COLLECT_VARIANTS, ModificationSpec, SamplingExhausted, sample_world
from .verify import verify as verify_config

AGENTS = ("random", "oracle", "react", "reflexion", "skill", "ifr")
LLM_AGENTS = ("react", "reflexion", "skill", "ifr")

_AXIS_ALIASES = {
    "task": "task_dependency",
    "task_dep": "task_dependency",
}


def _banner(verb: str, **flags) -> None:
    parts = [f"--{k.replace('_', '-')}={v}" for k, v in flags.items() if v is not None]
    click.echo(f"# wildgrid {verb} {' '.join(parts)} (v{__version__})")


def _load_config(ref: str) -> WorldConfig:
    """A world name or a path to a config file."""
    if ref in world_names():
        return builtin_world(ref)
    path = Path(ref)
    if not path.exists():
        raise click.UsageError(f"unknown world or missing file: {ref}")
    try:
        return parse_config(path.read_text())
    except ConfigError as err:
        click.echo(f"parse failure: {err}", err=True)
        sys.exit(2)


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Gridworld simulator tools."""


@main.command()
@click.option("--axes", required=True, help="comma-separated modification axes")
@click.option("--variant", default="visual_misleading", type=click.Choice(COLLECT_VARIANTS))
@click.option("--seed", default=0, type=int)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def gen(axes: str, variant: str, seed: int, out: Optional[str]) -> None:
    """Sample a world along the given axes and verify it."""
    _banner("gen", axes=axes, variant=variant, seed=seed, out=out)
    names = set()
    for token in axes.replace("+", ",").split(","):
        token = token.strip()
        if not token:
            continue
        names.add(_AXIS_ALIASES.get(token, token))
    bad = names - set(AXES)
    if bad or not names:
        raise click.UsageError(f"axes must be drawn from {AXES}; got {axes!r}")
    try:
        cfg = sample_world(ModificationSpec(axes=frozenset(names), collect_variant=variant, seed=seed))
    except SamplingExhausted as err:
        click.echo(f"sampling exhausted: {err}", err=True)
        sys.exit(1)
    report = verify_config(cfg)
    text = serialize_config(cfg)
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text)
    click.echo(report.render())
    sys.exit(0 if report.passed else 1)


@main.command(name="verify")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", default=0, type=int, help="seed for the map-stock check")
def verify_cmd(path: str, seed: int) -> None:
    """Verify a config file against all four playability principles."""
    _banner("verify", path=path, seed=seed)
    try:
        cfg = parse_config(Path(path).read_text())
    except ConfigError as err:
        click.echo(f"parse failure: {err}", err=True)
        sys.exit(2)
    report = verify_config(cfg, seed=seed)
    click.echo(report.render())
    sys.exit(0 if report.passed else 1)


def _build_gateway(spec: Optional[str]):
    if spec is None:
        raise click.UsageError("LLM agents need --gateway (live | cassette:PATH | record:PATH | scripted:PATH)")
    if spec == "live":
        return HttpGateway()
    kind, _, arg = spec.partition(":")
    if kind == "cassette" and arg:
        return CassetteGateway(arg)
    if kind == "record" and arg:
        return CassetteGateway(arg, live=HttpGateway())
    if kind == "scripted" and arg:
        lines = [ln for ln in Path(arg).read_text().splitlines() if ln.strip()]
        return ScriptedGateway([ln.replace("\\n", "\n") for ln in lines], loop=True)
    raise click.UsageError(f"bad --gateway {spec!r}")


def _build_agent(name: str, cfg: WorldConfig, seed: int, gateway_spec: Optional[str]):
    if name == "random":
        return random_agent(seed)
    if name == "oracle":
        return oracle_agent(cfg)
    gateway = _build_gateway(gateway_spec)
    if name == "react":
        return react_agent(gateway)
    if name == "reflexion":
        return reflexion_agent(gateway)
    if name == "skill":
        return skill_library_agent(gateway)
    return ifr_agent(gateway)


@main.command()
@click.option("--world", default="default", help="world name or config path")
@click.option("--agent", "agent_name", default="random", type=click.Choice(AGENTS))
@click.option("--trials", default=20, type=int, help="episodes for scripted agents")
@click.option("--seed", default=0, type=int, help="base seed; trial i uses seed+i")
@click.option("--gateway", "gateway_spec", default=None, help="live | cassette:PATH | record:PATH | scripted:PATH")
@click.option("--episodes", default=LEARNING_EPISODES, type=int, help="learning episodes for library agents")
@click.option("--max-steps", default=10000, type=int)
@click.option("--out", type=click.Path(file_okay=False), default=None, help="trajectory directory")
def run(
    world: str,
    agent_name: str,
    trials: int,
    seed: int,
    gateway_spec: Optional[str],
    episodes: int,
    max_steps: int,
    out: Optional[str],
) -> None:
    """Run episodes and print a summary table."""
    _banner(
        "run",
        world=world,
        agent=agent_name,
        trials=trials,
        seed=seed,
        gateway=gateway_spec,
        episodes=episodes,
        max_steps=max_steps,
        out=out,
    )
    cfg = _load_config(world)
    try:
        agent = _build_agent(agent_name, cfg, seed, gateway_spec)
    except ValueError as err:
        click.echo(f"gateway unavailable: {err}", err=True)
        sys.exit(1)
    count = episodes if agent_name in ("skill", "ifr") else trials
    out_dir = Path(out) if out else Path("runs") / f"{Path(world).stem}_{agent_name}_s{seed}"
    out_dir.mkdir(parents=True, exist_ok=True)
    trial_records = []
    for index in range(count):
        log_path = out_dir / f"trial_{index:03d}.jsonl"
        trajectory = run_episode(
            cfg,
            seed=seed + index,
            agent=agent,
            max_steps=max_steps,
            world=Path(world).stem,
            log_path=log_path,
        )
        trial_records.append(trajectory.to_trial())
        click.echo(
            f"trial {index}: seed={seed + index} steps={trajectory.step_count} "
            f"reward={trajectory.reward:g} unlocked={len(trajectory.unlocked)}"
        )
    summary = ScoreSummary.from_trials(trial_records)
    (out_dir / "summary.json").write_text(json.dumps(summary.to_dict(), indent=2) + "\n")
    click.echo(leaderboard(group_trials(trial_records)))
    click.echo(f"trajectories in {out_dir}")


@main.command(name="eval")
@click.argument("traj_dir", type=click.Path(exists=True, file_okay=False))
def eval_cmd(traj_dir: str) -> None:
    """Summarize a directory of trajectory files."""
    _banner("eval", traj_dir=traj_dir)
    paths = sorted(Path(traj_dir).glob("*.jsonl"))
    if not paths:
        raise click.UsageError(f"no trajectory files in {traj_dir}")
    trials = []
    for path in paths:
        try:
            trajectory = Trajectory.load(path)
            recomputed = episode_reward([s.to_dict() for s in trajectory.steps])
        except (TrajectoryError, ValueError, KeyError) as err:
            click.echo(f"corrupt trajectory {path.name}: {err}", err=True)
            sys.exit(1)
        if recomputed != trajectory.reward:
            click.echo(
                f"corrupt trajectory {path.name}: logged reward "
                f"{trajectory.reward} != recomputed {recomputed}",
                err=True,
            )
            sys.exit(1)
        trials.append(trajectory.to_trial())
    summary = ScoreSummary.from_trials(trials)
    rewards = [t.reward for t in trials]
    sd = statistics.stdev(rewards) if len(rewards) > 1 else 0.0
    click.echo(f"trials: {len(trials)}")
    click.echo(f"reward: {statistics.fmean(rewards):.2f} +- {sd:.2f}")
    click.echo(f"score: {summary.score:.2f}")
    click.echo("success rates:")
    for name, rate in zip(ACHIEVEMENTS, summary.s):
        click.echo(f"  {name:<20s} {rate:5.1f}")


@main.command(name="describe")
@click.option("--world", default="default")
@click.option("--seed", default=0, type=int)
@click.option("--steps", default=0, type=int, help="noop steps before rendering")
@click.option("--person", default="first", type=click.Choice(("first", "second")))
def describe_cmd(world: str, seed: int, steps: int, person: str) -> None:
    """Print the textual observation for a fresh (or advanced) episode."""
    _banner("describe", world=world, seed=seed, steps=steps, person=person)
    cfg = _load_config(world)
    engine = Engine(cfg, seed)
    obs = engine.reset()
    for _ in range(steps):
        obs = engine.step("noop").observation
    frame = describe(obs, person=person)
    click.echo(frame.text)
    click.echo(f"# {frame.tokens} tokens")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(host: str, port: int) -> None:
    """Serve the lobby and play endpoints."""
    import uvicorn

    from .server import create_app

    _banner("serve", host=host, port=port)
    uvicorn.run(create_app(), host=host, port=port)


@main.command()
def worlds() -> None:
    """List the built-in world names."""
    for name in world_names():
        click.echo(name)


if __name__ == "__main__":
    main()
