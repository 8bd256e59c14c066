"""Game service: lobby endpoints over HTTP, live episodes over a WebSocket.

Every server-to-client message carries the protocol version. Frames are
structured render models (cell ids, status, inventory), never pixels;
rendering belongs to the client. One session owns one engine, so
concurrent sessions cannot share state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import (
    ConfigError,
    WorldConfig,
    builtin_world,
    parse_config,
    serialize_config,
    world_names,
)
from .engine import Engine, EpisodeFinished
from .engine.state import Observation
from .items import ACTION_INDEX
from .sampler import ModificationSpec, SamplingExhausted, sample_world
from .verify import verify

PROTOCOL_VERSION = 1


@dataclass
class Session:
    world: str
    seed: int
    engine: Engine
    last_obs: Observation

    @property
    def tick(self) -> int:
        return self.engine.state.tick


def _resolve_config(world: Optional[str], config_text: Optional[str]) -> tuple[str, WorldConfig]:
    if config_text:
        return ("inline", parse_config(config_text))
    if world is None:
        raise KeyError("hello needs a world name or an inline config")
    if world not in world_names():
        raise KeyError(f"unknown world {world!r}")
    return (world, builtin_world(world))


def open_session(
    world: Optional[str] = None,
    seed: int = 0,
    config_text: Optional[str] = None,
) -> tuple[Session, dict]:
    """Start an episode; returns the session and its initial frame."""
    name, cfg = _resolve_config(world, config_text)
    engine = Engine(cfg, seed)
    obs = engine.reset()
    session = Session(world=name, seed=seed, engine=engine, last_obs=obs)
    return session, _frame(session, obs, reward=0.0, unlocked=(), done=False)


def handle_action(session: Session, action: str) -> dict:
    """Apply one action; exactly one frame per accepted action."""
    if action not in ACTION_INDEX:
        return _error("invalid_action", f"unknown action {action!r}")
    try:
        result = session.engine.step(action)
    except EpisodeFinished:
        return _error("episode_finished", "episode is over; send reset")
    session.last_obs = result.observation
    return _frame(
        session,
        result.observation,
        reward=result.reward,
        unlocked=tuple(result.info["newly_unlocked"]),
        done=result.done,
    )


def reset_session(session: Session, seed: Optional[int] = None) -> dict:
    if seed is not None:
        session.seed = seed
    obs = session.engine.reset(seed)
    session.last_obs = obs
    return _frame(session, obs, reward=0.0, unlocked=(), done=False)


def _frame(
    session: Session,
    obs: Observation,
    reward: float,
    unlocked: tuple[str, ...],
    done: bool,
) -> dict:
    view = [
        [{"material": cell.material, "obj": cell.obj} for cell in row]
        for row in obs.view
    ]
    return {
        "v": PROTOCOL_VERSION,
        "type": "frame",
        "tick": session.tick,
        "world": session.world,
        "seed": session.seed,
        "view": view,
        "facing": list(obs.facing),
        "standing": obs.standing,
        "status": {
            "health": obs.health,
            "food": obs.food,
            "drink": obs.drink,
            "energy": obs.energy,
        },
        "inventory": [[name, count] for name, count in obs.inventory],
        "sleeping": obs.sleeping,
        "reward": reward,
        "unlocked": list(unlocked),
        "done": done,
    }


def _error(code: str, text: str) -> dict:
    return {"v": PROTOCOL_VERSION, "type": "error", "code": code, "text": text}


def _bye() -> dict:
    return {"v": PROTOCOL_VERSION, "type": "bye"}


def create_app() -> FastAPI:
    app = FastAPI(title="wildgrid", version="0.1.0")

    @app.get("/worlds")
    def worlds() -> dict:
        return {"v": PROTOCOL_VERSION, "worlds": list(world_names())}

    @app.post("/sample")
    def sample(payload: dict) -> dict:
        try:
            spec = ModificationSpec(
                axes=frozenset(payload.get("axes", ())),
                collect_variant=payload.get("variant", "visual_misleading"),
                seed=int(payload.get("seed", 0)),
            )
            cfg = sample_world(spec)
        except (ValueError, SamplingExhausted) as err:
            return _error("bad_sample", str(err))
        return {
            "v": PROTOCOL_VERSION,
            "config": serialize_config(cfg),
            "report": verify(cfg).to_dict(),
        }

    @app.post("/verify")
    def verify_world(payload: dict) -> dict:
        text = payload.get("config")
        if not text:
            return _error("bad_request", "payload needs a 'config' field")
        try:
            cfg = parse_config(text)
        except ConfigError as err:
            return _error("parse_failure", str(err))
        return {"v": PROTOCOL_VERSION, "report": verify(cfg).to_dict()}

    @app.websocket("/play")
    async def play(ws: WebSocket) -> None:
        await ws.accept()
        session: Optional[Session] = None
        try:
            while True:
                msg = await ws.receive_json()
                kind = msg.get("type")
                if kind == "hello":
                    try:
                        session, frame = open_session(
                            world=msg.get("world"),
                            seed=int(msg.get("seed", 0)),
                            config_text=msg.get("config"),
                        )
                    except (KeyError, ConfigError) as err:
                        await ws.send_json(_error("unknown_world", str(err)))
                        continue
                    await ws.send_json(frame)
                elif kind == "action":
                    if session is None:
                        await ws.send_json(_error("no_session", "send hello first"))
                        continue
                    await ws.send_json(handle_action(session, msg.get("name", "")))
                elif kind == "reset":
                    if session is None:
                        await ws.send_json(_error("no_session", "send hello first"))
                        continue
                    seed = msg.get("seed")
                    await ws.send_json(
                        reset_session(session, int(seed) if seed is not None else None)
                    )
                elif kind == "bye":
                    await ws.send_json(_bye())
                    await ws.close()
                    return
                else:
                    await ws.send_json(
                        _error("bad_message", f"unknown message type {kind!r}")
                    )
        except WebSocketDisconnect:
            return

    return app


app = create_app()
