"""Language-model gateway: one request shape, pluggable transports.

Transports:
  - ScriptedGateway: canned replies for offline, deterministic tests.
  - CassetteGateway: record/replay of live traffic keyed by request hash.
  - HttpGateway: a chat-completions endpoint configured via environment
    variables (WILDGRID_GATEWAY_URL, WILDGRID_GATEWAY_KEY,
    WILDGRID_GATEWAY_MODEL).
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Protocol, Sequence, Union

log = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 0.7
DEFAULT_MAX_TOKENS = 512

ENV_URL = "WILDGRID_GATEWAY_URL"
ENV_KEY = "WILDGRID_GATEWAY_KEY"
ENV_MODEL = "WILDGRID_GATEWAY_MODEL"

# {"role": "user" | "assistant", "content": ...}
Message = dict[str, str]


@dataclass(frozen=True)
class GatewayRequest:
    system: str
    messages: tuple[Message, ...]
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS

    def fingerprint(self) -> str:
        """Stable hash of the request content, used as the cassette key."""
        payload = json.dumps(
            {
                "system": self.system,
                "messages": list(self.messages),
                "temperature": self.temperature,
                "max_tokens": self.max_tokens,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class GatewayResponse:
    text: str


class Gateway(Protocol):
    def complete(self, request: GatewayRequest) -> GatewayResponse: ...


def request(
    system: str,
    messages: Sequence[Message],
    temperature: float = DEFAULT_TEMPERATURE,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> GatewayRequest:
    return GatewayRequest(
        system=system,
        messages=tuple(dict(m) for m in messages),
        temperature=temperature,
        max_tokens=max_tokens,
    )


class ScriptedGateway:
    """Replies from a fixed list or a callable; records every request."""

    def __init__(
        self,
        replies: Union[Sequence[str], Callable[[GatewayRequest], str]],
        loop: bool = False,
    ):
        self._lock = threading.Lock()
        self.requests: list[GatewayRequest] = []
        self.loop = loop
        if callable(replies):
            self._fn: Optional[Callable[[GatewayRequest], str]] = replies
            self._queue: list[str] = []
        else:
            self._fn = None
            self._queue = list(replies)
        self._cursor = 0

    def complete(self, request: GatewayRequest) -> GatewayResponse:
        with self._lock:
            self.requests.append(request)
            if self._fn is not None:
                return GatewayResponse(self._fn(request))
            if self._cursor >= len(self._queue):
                if not (self.loop and self._queue):
                    raise RuntimeError("scripted gateway ran out of replies")
                self._cursor = 0
            text = self._queue[self._cursor]
            self._cursor += 1
            return GatewayResponse(text)


class CassetteGateway:
    """Replays recorded completions; records through `live` when given.

    The cassette is a JSON-lines file of {"key", "text"} entries. Repeated
    identical requests replay in recording order.
    """

    def __init__(self, path: str | Path, live: Optional[Gateway] = None):
        self.path = Path(path)
        self.live = live
        self._lock = threading.Lock()
        self._tape: dict[str, list[str]] = {}
        self._served: dict[str, int] = {}
        if self.path.exists():
            with self.path.open() as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    entry = json.loads(line)
                    self._tape.setdefault(entry["key"], []).append(entry["text"])

    def complete(self, request: GatewayRequest) -> GatewayResponse:
        key = request.fingerprint()
        with self._lock:
            served = self._served.get(key, 0)
            recorded = self._tape.get(key, [])
            if served < len(recorded):
                self._served[key] = served + 1
                return GatewayResponse(recorded[served])
            if self.live is None:
                raise KeyError(f"no cassette entry for request {key[:12]}")
            response = self.live.complete(request)
            self._tape.setdefault(key, []).append(response.text)
            self._served[key] = served + 1
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a") as fh:
                fh.write(json.dumps({"key": key, "text": response.text}) + "\n")
            return response


class HttpGateway:
    """Live chat-completions endpoint; settings come from the environment."""

    def __init__(
        self,
        url: Optional[str] = None,
        api_key: Optional[str] = None,
        model: Optional[str] = None,
        timeout: float = 60.0,
    ):
        self.url = url or os.environ.get(ENV_URL)
        self.api_key = api_key or os.environ.get(ENV_KEY)
        self.model = model or os.environ.get(ENV_MODEL, "gpt-4")
        self.timeout = timeout
        if not self.url:
            raise ValueError(f"no gateway endpoint; set {ENV_URL}")

    def complete(self, request: GatewayRequest) -> GatewayResponse:
        body = {
            "model": self.model,
            "messages": [{"role": "system", "content": request.system}]
            + list(request.messages),
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        req = urllib.request.Request(
            self.url, data=json.dumps(body).encode("utf-8"), headers=headers
        )
        with urllib.request.urlopen(req, timeout=self.timeout) as resp:
            payload = json.loads(resp.read().decode("utf-8"))
        try:
            text = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ValueError(f"malformed completion payload: {payload!r}") from exc
        return GatewayResponse(text)
