"""Chat-completion clients: live HTTP, scripted replay, and a recorder.

Every client exposes ``complete(turns, key=None) -> (text, CompletionUsage)``.
``key`` is the replay fingerprint ``"<task>:<phase>:<index>"``; live clients
ignore it.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path

import httpx

ROLES = ("system", "user", "assistant")
WILDCARD = "*"


class TransportError(RuntimeError):
    pass


class ScriptExhausted(LookupError):
    pass


@dataclass(frozen=True)
class ChatTurn:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"bad role {self.role!r}")
        if not self.content:
            raise ValueError("chat turn content must be non-empty")


@dataclass(frozen=True)
class CompletionUsage:
    prompt_tokens: int = 0
    completion_tokens: int = 0

    def __post_init__(self):
        if self.prompt_tokens < 0 or self.completion_tokens < 0:
            raise ValueError("token counts must be non-negative")

    @property
    def total(self) -> int:
        return self.prompt_tokens + self.completion_tokens

    def __add__(self, other: CompletionUsage) -> CompletionUsage:
        return CompletionUsage(self.prompt_tokens + other.prompt_tokens,
                               self.completion_tokens + other.completion_tokens)


ZERO = CompletionUsage()


def count_tokens(text: str) -> int:
    """Whitespace token count; a proxy, not a real tokenizer."""
    return len(text.split())


def proxy_usage(turns, response: str) -> CompletionUsage:
    return CompletionUsage(sum(count_tokens(t.content) for t in turns), count_tokens(response))


def _check_turns(turns) -> None:
    if not turns:
        raise ValueError("complete() needs at least one chat turn")


def complete(client, turns, key: str | None = None) -> tuple[str, CompletionUsage]:
    return client.complete(list(turns), key)


# -- scripted replay ---------------------------------------------------------


@dataclass(frozen=True)
class ScriptEntry:
    key: str
    response: str


def load_script(path: str | Path) -> list[ScriptEntry]:
    entries = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                entries.append(ScriptEntry(d["key"], d["response"]))
    return entries


class ScriptedClient:
    """Replays responses: keyed entries by fingerprint, wildcard entries in order."""

    def __init__(self, entries):
        self.keyed: dict[str, list[str]] = {}
        self.wild: list[str] = []
        for e in entries:
            e = e if isinstance(e, ScriptEntry) else ScriptEntry(*e)
            if e.key == WILDCARD:
                self.wild.append(e.response)
            else:
                self.keyed.setdefault(e.key, []).append(e.response)
        self.cursor = 0

    def complete(self, turns, key: str | None = None) -> tuple[str, CompletionUsage]:
        _check_turns(turns)
        queue = self.keyed.get(key) if key is not None else None
        if queue:
            text = queue.pop(0)
        elif self.cursor < len(self.wild):
            text = self.wild[self.cursor]
            self.cursor += 1
        else:
            raise ScriptExhausted(f"no scripted response left for {key or 'next call'}")
        return text, proxy_usage(turns, text)


class RecordingClient:
    """Proxies another client and appends each exchange to a script file."""

    _lock = threading.Lock()

    def __init__(self, inner, path: str | Path | None, key_prefix: str = ""):
        self.inner = inner
        self.path = Path(path) if path is not None else None  # None: keep records in memory only
        self.key_prefix = key_prefix
        self.records: list[ScriptEntry] = []

    def complete(self, turns, key: str | None = None) -> tuple[str, CompletionUsage]:
        text, usage = self.inner.complete(turns, key)
        entry = ScriptEntry(self.key_prefix + (key or WILDCARD), text)
        self.records.append(entry)
        if self.path is None:
            return text, usage
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a") as fh:
                fh.write(json.dumps({"key": entry.key, "response": entry.response}) + "\n")
        return text, usage


# -- live HTTP ---------------------------------------------------------------


class LiveClient:
    """OpenAI-style /chat/completions endpoint."""

    def __init__(self, base: str | None = None, api_key: str | None = None, model: str | None = None,
                 max_in_flight: int = 4, timeout: float = 60.0, transport=None):
        self.base = (base or os.environ.get("LLM_API_BASE", "")).rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get("LLM_API_KEY", "")
        self.model = model or os.environ.get("LLM_MODEL", "")
        if not self.base or not self.model:
            raise TransportError("LLM_API_BASE and LLM_MODEL must be set for the live backend")
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._http = httpx.Client(timeout=timeout, transport=transport)

    def complete(self, turns, key: str | None = None) -> tuple[str, CompletionUsage]:
        _check_turns(turns)
        body = {"model": self.model, "messages": [{"role": t.role, "content": t.content} for t in turns],
                "temperature": 0}
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        with self._slots:
            try:
                resp = self._http.post(f"{self.base}/chat/completions", json=body, headers=headers)
                resp.raise_for_status()
                data = resp.json()
            except (httpx.HTTPError, ValueError) as err:
                raise TransportError(str(err)) from err
        try:
            text = data["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as err:
            raise TransportError(f"malformed completion response: {err}") from err
        u = data.get("usage") or {}
        if "prompt_tokens" in u:
            usage = CompletionUsage(int(u.get("prompt_tokens", 0)), int(u.get("completion_tokens", 0)))
        else:
            usage = proxy_usage(turns, text)
        return text, usage
