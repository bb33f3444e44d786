import json

import httpx
import pytest

from sclplan.controller import Mode, run_episode
from sclplan.llm import (
    ActionParseError,
    BackendError,
    ChatTurn,
    CompletionUsage,
    GoalUnavailable,
    LiveClient,
    LLMPlanner,
    RecordingClient,
    ScriptedClient,
    TransportError,
    make_backend,
)
from sclplan.llm.agent import extract_action
from sclplan.llm.client import ScriptExhausted, load_script
from sclplan.llm.prompts import EXAMPLE_DELIMITER
from sclplan.pddl import Literal
from sclplan.sim import HouseholdEnv, load_domain, load_suite

TURNS = [ChatTurn("system", "be brief"), ChatTurn("user", "what now?")]


def test_chat_turn_validation():
    with pytest.raises(ValueError):
        ChatTurn("robot", "hi")
    with pytest.raises(ValueError):
        ChatTurn("user", "")


def test_usage_arithmetic():
    u = CompletionUsage(3, 4) + CompletionUsage(1, 2)
    assert (u.prompt_tokens, u.completion_tokens, u.total) == (4, 6, 10)
    with pytest.raises(ValueError):
        CompletionUsage(-1, 0)


def test_scripted_keyed_then_wildcard():
    client = ScriptedClient([("t:react:0", "go to desk-1"), ("*", "finish"), ("t:react:0", "again")])
    assert client.complete(TURNS, "t:react:0")[0] == "go to desk-1"
    assert client.complete(TURNS, "t:react:0")[0] == "again"
    text, usage = client.complete(TURNS, "t:react:1")
    assert text == "finish"
    # whitespace-token proxy: "be brief" + "what now?" and "finish"
    assert (usage.prompt_tokens, usage.completion_tokens) == (4, 1)
    with pytest.raises(ScriptExhausted):
        client.complete(TURNS, "t:react:2")
    with pytest.raises(ValueError):
        client.complete([], "t:react:3")


def test_recording_round_trip(tmp_path):
    path = tmp_path / "rec.jsonl"
    inner = ScriptedClient([("*", "alpha"), ("*", "beta")])
    rec = RecordingClient(inner, path, key_prefix="")
    out = [rec.complete(TURNS, "t:goal:0")[0], rec.complete(TURNS, "t:react:0")[0]]
    entries = load_script(path)
    assert [(e.key, e.response) for e in entries] == [("t:goal:0", "alpha"), ("t:react:0", "beta")]
    replay = ScriptedClient(entries)
    assert [replay.complete(TURNS, "t:goal:0")[0], replay.complete(TURNS, "t:react:0")[0]] == out


def test_recording_in_memory():
    rec = RecordingClient(ScriptedClient([("*", "x")]), None)
    rec.complete(TURNS)
    assert [(e.key, e.response) for e in rec.records] == [("*", "x")]


def live(handler, **kw):
    return LiveClient("http://llm.test/v1", "sk-test", "model-x", transport=httpx.MockTransport(handler), **kw)


def test_live_client_request_and_usage():
    seen = {}

    def handler(request):
        seen["url"] = str(request.url)
        seen["auth"] = request.headers.get("authorization")
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json={"choices": [{"message": {"content": "Action: finish"}}],
                                         "usage": {"prompt_tokens": 17, "completion_tokens": 3}})

    text, usage = live(handler).complete(TURNS, "ignored:key:0")
    assert text == "Action: finish"
    assert (usage.prompt_tokens, usage.completion_tokens) == (17, 3)
    assert seen["url"] == "http://llm.test/v1/chat/completions"
    assert seen["auth"] == "Bearer sk-test"
    assert seen["body"]["model"] == "model-x" and seen["body"]["temperature"] == 0
    assert seen["body"]["messages"][1] == {"role": "user", "content": "what now?"}


def test_live_client_proxy_usage_without_usage_block():
    def handler(request):
        return httpx.Response(200, json={"choices": [{"message": {"content": "one two"}}]})

    _, usage = live(handler).complete(TURNS)
    assert usage == CompletionUsage(4, 2)


@pytest.mark.parametrize("response", [
    httpx.Response(500, text="boom"),
    httpx.Response(200, text="not json"),
    httpx.Response(200, json={"choices": []}),
])
def test_live_client_errors(response):
    with pytest.raises(TransportError):
        live(lambda request: response).complete(TURNS)


def test_live_client_needs_config(monkeypatch):
    monkeypatch.delenv("LLM_API_BASE", raising=False)
    monkeypatch.delenv("LLM_MODEL", raising=False)
    with pytest.raises(TransportError):
        LiveClient()


def test_extract_action_takes_last_action_line():
    reply = "Thought: the mug is in the cabinet.\nAction: go to sink-1\nAction: go to cabinet-1"
    a = extract_action("alfworld", reply)
    assert (a.name, a.arguments) == ("go-to", ("cabinet-1",))
    assert extract_action("alfworld", "Thought: done.\nAction: finish").is_finish
    with pytest.raises(ActionParseError) as err:
        extract_action("alfworld", "Thought: hmm\nAction: juggle mug-1")
    assert err.value.raw_text == "juggle mug-1"


def test_goal_retry_then_success():
    domain = load_domain("alfworld")
    client = ScriptedClient([("t:goal:0", "(and (isShiny mug-1))"), ("t:goal:1", "(and (isclean mug-1))")])
    planner = LLMPlanner(client, "alfworld", "t")
    assert planner.generate_goal("clean the mug", domain, ["mug-1"]) == (Literal(("isclean", "mug-1")),)
    assert planner.calls == 2 and planner.take_usage().total > 0 and planner.take_usage().total == 0


def test_goal_gives_up_after_retries():
    client = ScriptedClient([("*", "no idea")] * 3)
    planner = LLMPlanner(client, "alfworld", "t", retries=2)
    with pytest.raises(GoalUnavailable):
        planner.generate_goal("clean the mug", load_domain("alfworld"), ["mug-1"])
    assert planner.calls == 3


class Spy:
    """Wraps a client and keeps every prompt it was sent."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = []

    def complete(self, turns, key=None):
        self.calls.append((key, [t.content for t in turns]))
        return self.inner.complete(turns, key)


def scripted_episode(task, mode):
    react = [(f"{task.id}:react:{i}", f"Thought: next.\nAction: {a}") for i, a in enumerate(task.reference)]
    goal = [(f"{task.id}:goal:{i}", "(and " + " ".join(
        f"({' '.join(lit.atom)})" if lit.positive else f"(not ({' '.join(lit.atom)}))" for lit in task.success)
        + ")") for i in range(3)]
    spy = Spy(ScriptedClient(react + goal))
    llm = LLMPlanner(spy, task.action_set, task.id)
    result = run_episode(HouseholdEnv(), load_domain(task.action_set), llm, task, mode)
    return result, spy.calls


@pytest.mark.parametrize("mode", [Mode.REACT, Mode.REACT_PV, Mode.SCLPLAN])
def test_prompts_are_zero_shot(mode):
    task = load_suite("complex").tasks[0]
    _, calls = scripted_episode(task, mode)
    assert calls
    for _, contents in calls:
        assert all(EXAMPLE_DELIMITER not in c for c in contents)


def test_react_prompts_identical_across_modes():
    """With only valid actions, ReAct and ReAct+PV send the same prompts."""
    task = load_suite("robot").task("robot-can-apple-swap")
    a, calls_a = scripted_episode(task, Mode.REACT)
    b, calls_b = scripted_episode(task, Mode.REACT_PV)
    assert a.success and b.success
    assert calls_a == calls_b


def test_backend_descriptors():
    assert make_backend("synthetic:weak").descriptor == "synthetic:weak:0"
    assert make_backend("synthetic:strong:3:5").descriptor == "synthetic:strong:3:5"
    for bad in ("synthetic:clever", "synthetic:weak:x", "synthetic:weak:0:-1", "carrier-pigeon", "scripted:"):
        with pytest.raises(BackendError):
            make_backend(bad)
