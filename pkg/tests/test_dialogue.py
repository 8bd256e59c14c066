"""Prompt templates, gateway transports, history trimming, and the
dialogue agents (act-from-text and its reflective variant)."""

import logging

import pytest

from wildgrid.describe import TextFrame, estimate_tokens
from wildgrid.harness import (
    CassetteGateway,
    GatewayRequest,
    ScriptedGateway,
    trim_history,
)
from wildgrid.harness.gateway import request
from wildgrid.harness.history import history_tokens
from wildgrid.harness.react import (
    ReactAgent,
    ReflexionAgent,
    normalize_action,
    parse_reply,
)
from wildgrid.harness.templates import (
    PROMPT_NAMES,
    fill,
    load_prompt,
    render_prompt,
)

from helpers import make_obs


# --- templates ---


def test_all_prompt_templates_load():
    for name in PROMPT_NAMES:
        text = load_prompt(name)
        assert isinstance(text, str)
        assert text.strip()


def test_unknown_template_raises():
    with pytest.raises(KeyError, match="unknown prompt template"):
        load_prompt("nonexistent")


def test_fill_is_literal_and_keeps_unknown_markers():
    out = fill("a {x} b {two words} c {keep}", {"x": "1", "two words": "2"})
    assert out == "a 1 b 2 c {keep}"


def test_render_prompt_fills_named_slots():
    rendered = render_prompt("replanner", {"task": "collect wood"})
    assert rendered == load_prompt("replanner").replace("{task}", "collect wood")
    assert "{task}" not in rendered


def test_render_prompt_without_slots_is_the_template():
    assert render_prompt("react") == load_prompt("react")


# --- scripted gateway ---


def test_scripted_gateway_serves_replies_in_order():
    gw = ScriptedGateway(["one", "two"])
    req = request("sys", [{"role": "user", "content": "hi"}])
    assert gw.complete(req).text == "one"
    assert gw.complete(req).text == "two"
    assert len(gw.requests) == 2


def test_scripted_gateway_exhaustion():
    gw = ScriptedGateway(["only"])
    req = request("sys", [])
    gw.complete(req)
    with pytest.raises(RuntimeError, match="ran out of replies"):
        gw.complete(req)


def test_scripted_gateway_loops_when_asked():
    gw = ScriptedGateway(["a", "b"], loop=True)
    req = request("sys", [])
    texts = [gw.complete(req).text for _ in range(5)]
    assert texts == ["a", "b", "a", "b", "a"]


def test_scripted_gateway_callable_sees_the_request():
    gw = ScriptedGateway(lambda req: f"echo:{req.messages[-1]['content']}")
    reply = gw.complete(request("sys", [{"role": "user", "content": "ping"}]))
    assert reply.text == "echo:ping"
    assert gw.requests[0].system == "sys"


def test_request_helper_freezes_messages():
    msgs = [{"role": "user", "content": "hi"}]
    req = request("sys", msgs)
    msgs[0]["content"] = "mutated"
    assert req.messages == ({"role": "user", "content": "hi"},)
    assert req.temperature == pytest.approx(0.7)
    assert req.max_tokens == 512


# --- fingerprints and cassettes ---


def test_fingerprint_is_stable_and_content_sensitive():
    a = request("sys", [{"role": "user", "content": "hi"}])
    b = request("sys", [{"role": "user", "content": "hi"}])
    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != request("sys", []).fingerprint()
    hot = GatewayRequest(system="sys", messages=a.messages, temperature=0.9)
    assert a.fingerprint() != hot.fingerprint()


def test_cassette_records_then_replays_byte_equal(tmp_path):
    tape = tmp_path / "tape.jsonl"
    live = ScriptedGateway(["first reply", "second reply"])
    recorder = CassetteGateway(tape, live=live)
    req_a = request("sys", [{"role": "user", "content": "a"}])
    req_b = request("sys", [{"role": "user", "content": "b"}])
    assert recorder.complete(req_a).text == "first reply"
    assert recorder.complete(req_b).text == "second reply"
    assert tape.exists()

    replayer = CassetteGateway(tape)
    assert replayer.complete(req_b).text == "second reply"
    assert replayer.complete(req_a).text == "first reply"


def test_cassette_replays_repeats_in_recording_order(tmp_path):
    tape = tmp_path / "tape.jsonl"
    recorder = CassetteGateway(tape, live=ScriptedGateway(["v1", "v2"]))
    req = request("sys", [{"role": "user", "content": "same"}])
    recorder.complete(req)
    recorder.complete(req)

    replayer = CassetteGateway(tape)
    assert replayer.complete(req).text == "v1"
    assert replayer.complete(req).text == "v2"
    with pytest.raises(KeyError, match="no cassette entry"):
        replayer.complete(req)


# --- history trimming ---


def _msg(role, content):
    return {"role": role, "content": content}


def test_trim_history_zero_budget_and_empty():
    assert trim_history([], budget=100) == []
    assert trim_history([_msg("user", "hello")], budget=0) == []


def test_trim_history_keeps_whole_message_suffix():
    msgs = [
        _msg("user", "a b c d e f"),  # 6 tokens
        _msg("assistant", "x y"),  # 2 tokens
        _msg("user", "p q r"),  # 3 tokens
    ]
    assert trim_history(msgs, budget=5) == msgs[1:]
    assert trim_history(msgs, budget=11) == msgs
    assert trim_history(msgs, budget=10) == msgs[1:]


def test_trim_history_caps_user_steps():
    msgs = []
    for i in range(1, 13):
        msgs.append(_msg("user", f"u{i}"))
        msgs.append(_msg("assistant", f"a{i}"))
    kept = trim_history(msgs, budget=10**6)
    users = [m["content"] for m in kept if m["role"] == "user"]
    assert users == [f"u{i}" for i in range(3, 13)]
    assert kept[0] == _msg("assistant", "a2")


def test_history_tokens_sums_contents():
    msgs = [_msg("user", "a b"), _msg("assistant", "c d e")]
    assert history_tokens(msgs) == estimate_tokens("a b") + estimate_tokens("c d e")


# --- reply parsing ---


@pytest.mark.parametrize(
    "text,expected",
    [
        ("ACTION: move_left", ("action", "move_left")),
        ("  action : Move Left  ", ("action", "move_left")),
        ("ACTION: `do`.", ("action", "do")),
        ("I will rest now.\nACTION: sleep\nGood night.", ("action", "sleep")),
        ("THINK: probe first\nACTION: place_stone", ("action", "place_stone")),
        ("ACTION: fly", ("invalid", None)),
        ("THINK: what is nearby?", ("think", None)),
        ("no marker at all", ("invalid", None)),
    ],
)
def test_parse_reply(text, expected):
    assert parse_reply(text) == expected


def test_normalize_action_strips_wrapping():
    assert normalize_action(' "Move Left" ') == "move_left"
    assert normalize_action("`sleep`.") == "sleep"


# --- the dialogue agent ---


def _frame(text):
    return TextFrame(lines=(text,), tokens=estimate_tokens(text))


def test_react_agent_thinks_then_acts():
    gw = ScriptedGateway(["THINK: scan the area", "ACTION: move_left"])
    agent = ReactAgent(gw)
    agent.on_episode_start("default", 0)
    action = agent.act(make_obs(), _frame("grass everywhere"))
    assert action == "move_left"
    assert [m["role"] for m in agent.messages] == ["user", "assistant", "assistant"]
    assert len(gw.requests) == 2
    assert gw.requests[0].system == load_prompt("react")
    assert gw.requests[0].messages[-1]["content"] == "grass everywhere"


def test_react_agent_retries_once_on_garbage():
    gw = ScriptedGateway(["???", "ACTION: do"])
    agent = ReactAgent(gw)
    agent.on_episode_start("default", 0)
    assert agent.act(make_obs(), _frame("obs")) == "do"


def test_react_agent_gives_up_after_two_garbage_replies(caplog):
    gw = ScriptedGateway(["???", "still nothing"])
    agent = ReactAgent(gw)
    agent.on_episode_start("default", 0)
    with caplog.at_level(logging.WARNING):
        assert agent.act(make_obs(), _frame("obs")) == "noop"
    assert "using noop" in caplog.text


def test_react_agent_bounds_pure_think_loops(caplog):
    gw = ScriptedGateway(["THINK: still thinking"] * ReactAgent.MAX_QUERIES)
    agent = ReactAgent(gw)
    agent.on_episode_start("default", 0)
    with caplog.at_level(logging.WARNING):
        assert agent.act(make_obs(), _frame("obs")) == "noop"
    assert len(gw.requests) == ReactAgent.MAX_QUERIES
    assert "no ACTION" in caplog.text


# --- the reflective agent ---

# four words + reward/score suffix = 12 tokens per observation turn
_OBS = _frame("alpha beta gamma delta")


def _reflexion_gateway(reflections):
    queue = list(reflections)

    def serve(req):
        if req.system.startswith(load_prompt("reflexion")[:40]):
            return queue.pop(0) if len(queue) > 1 else queue[0]
        return "ACTION: noop"

    return ScriptedGateway(serve)


def test_reflection_fires_exactly_when_budget_trips():
    gw = _reflexion_gateway(["REFLECTION: mind the budget"])
    agent = ReflexionAgent(gw, budget=20)
    agent.on_episode_start("default", 0)

    agent.act(make_obs(), _OBS)
    assert agent.reflection_count == 0  # 12 tokens, under budget

    agent.act(make_obs(), _OBS)  # 12 + 3 + 12 = 27 > 20
    assert agent.reflection_count == 1
    roles = [m["role"] for m in agent.messages]
    assert roles == ["assistant", "user", "assistant"]
    assert agent.messages[0]["content"] == "REFLECTION: mind the budget"


def test_no_reflection_under_a_large_budget():
    gw = _reflexion_gateway(["REFLECTION: unused"])
    agent = ReflexionAgent(gw, budget=10**6)
    agent.on_episode_start("default", 0)
    for _ in range(5):
        agent.act(make_obs(), _OBS)
    assert agent.reflection_count == 0


def test_reflection_window_keeps_last_three():
    insights = [f"REFLECTION: insight {i}" for i in range(1, 6)]
    gw = _reflexion_gateway(insights)
    agent = ReflexionAgent(gw, budget=20)
    agent.on_episode_start("default", 0)
    for _ in range(5):
        agent.act(make_obs(), _OBS)
    assert agent.reflection_count == 4
    assert agent.reflections == insights[:4]
    # window restarted on the 4th reflection: last three + newest user turn
    kept = [m["content"] for m in agent.messages if m["role"] == "assistant"]
    assert kept[:3] == insights[1:4]


def test_reflection_text_starts_at_the_marker():
    gw = _reflexion_gateway(["Sure, here it goes.\nREFLECTION: avoid lava"])
    agent = ReflexionAgent(gw, budget=20)
    agent.on_episode_start("default", 0)
    agent.act(make_obs(), _OBS)
    agent.act(make_obs(), _OBS)
    assert agent.reflections == ["REFLECTION: avoid lava"]


def test_reflection_without_marker_keeps_raw_text(caplog):
    gw = _reflexion_gateway(["no marker here", "still none"])
    agent = ReflexionAgent(gw, budget=20)
    agent.on_episode_start("default", 0)
    agent.act(make_obs(), _OBS)
    with caplog.at_level(logging.WARNING):
        agent.act(make_obs(), _OBS)
    assert agent.reflections == ["still none"]
    assert "keeping raw text" in caplog.text


def test_reflexion_observation_carries_reward_and_score():
    gw = _reflexion_gateway(["REFLECTION: unused"])
    agent = ReflexionAgent(gw, budget=10**6)
    agent.on_episode_start("default", 0)
    agent.act(make_obs(), _OBS)
    content = agent.messages[0]["content"]
    assert content.endswith("reward: 0.0\nscore: 0")
    assert content.startswith("alpha beta gamma delta")


def test_reflexion_prompt_carries_the_trajectory():
    gw = _reflexion_gateway(["REFLECTION: noted"])
    agent = ReflexionAgent(gw, budget=20)
    agent.on_episode_start("default", 0)
    agent.act(make_obs(), _OBS)
    agent.act(make_obs(), _OBS)
    reflect_reqs = [
        r
        for r in gw.requests
        if r.system.startswith(load_prompt("reflexion")[:40])
    ]
    assert len(reflect_reqs) == 1
    assert "alpha beta gamma delta" in reflect_reqs[0].system
    assert reflect_reqs[0].messages == ()
