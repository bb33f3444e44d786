"""Backend descriptors: how each episode gets its completion client.

  scripted:PATH             replay recorded scripts (a file, or a directory
                            holding ``<suite>-<mode>.jsonl``)
  record:PATH               proxy the live endpoint and append to PATH
  live                      live endpoint from LLM_API_BASE / LLM_MODEL
  synthetic:PROFILE[:SEED[:VARIANTS]]
                            emulated backbone (weak, medium, strong, perfect);
                            VARIANTS > 0 gives each repeat its own draw stream

A script whose keys carry ``@<variant>`` after the task id is sampled: each
episode picks one recorded variant from (seed, task, repeat).
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from pathlib import Path

from .client import LiveClient, RecordingClient, ScriptedClient, TransportError, load_script
from .synthetic import PROFILES, SyntheticClient


class BackendError(RuntimeError):
    pass


@dataclass(frozen=True)
class Episode:
    """Completion client for one episode plus the task id used in replay keys."""

    client: object
    key_id: str


_VARIANT = re.compile(r"^(?P<task>[^:@]+)@(?P<v>\d+):")


class Backend:
    descriptor = ""
    deterministic = True

    def episode(self, task, env, suite: str, mode: str, repeat: int, seed: int) -> Episode:
        raise NotImplementedError


class ScriptedBackend(Backend):
    def __init__(self, path: str):
        self.descriptor = f"scripted:{path}"
        self.path = Path(path)
        if not self.path.exists():
            raise BackendError(f"script path {path} does not exist")
        self._cache: dict[Path, dict[str, list]] = {}

    def _file(self, suite: str, mode: str) -> Path:
        if self.path.is_file():
            return self.path
        f = self.path / f"{suite}-{mode}.jsonl"
        if not f.exists():
            raise BackendError(f"no script {f.name} under {self.path}")
        return f

    def _by_task(self, f: Path) -> dict[str, list]:
        if f not in self._cache:
            grouped: dict[str, list] = {}
            for e in load_script(f):
                grouped.setdefault(e.key.split(":", 1)[0], []).append(e)
            self._cache[f] = grouped
        return self._cache[f]

    def variants(self, suite: str, mode: str, task_id: str) -> list[int]:
        grouped = self._by_task(self._file(suite, mode))
        found = sorted(int(k.split("@", 1)[1]) for k in grouped if k.startswith(task_id + "@"))
        return found

    def episode(self, task, env, suite, mode, repeat, seed) -> Episode:
        grouped = self._by_task(self._file(suite, mode))
        key_id = task.id
        variants = self.variants(suite, mode, task.id)
        if variants:
            v = random.Random(f"sample:{seed}:{task.id}:{repeat}").choice(variants)
            key_id = f"{task.id}@{v}"
        return Episode(ScriptedClient(grouped.get(key_id, [])), key_id)


class LiveBackend(Backend):
    descriptor = "live"
    deterministic = False

    def __init__(self, max_in_flight: int = 4):
        try:
            self.client = LiveClient(max_in_flight=max_in_flight)
        except TransportError as err:
            raise BackendError(str(err)) from err

    def episode(self, task, env, suite, mode, repeat, seed) -> Episode:
        return Episode(self.client, task.id)


class RecordBackend(Backend):
    """Proxy an inner backend and append every exchange to one script file."""

    deterministic = False

    def __init__(self, path: str, inner: Backend | None = None):
        self.descriptor = f"record:{path}"
        self.path = Path(path)
        self.inner = inner

    def episode(self, task, env, suite, mode, repeat, seed) -> Episode:
        inner = self.inner or LiveBackend()
        self.inner = inner
        ep = inner.episode(task, env, suite, mode, repeat, seed)
        return Episode(RecordingClient(ep.client, self.path), ep.key_id)


class SyntheticBackend(Backend):
    def __init__(self, profile: str, seed: int = 0, variants: int = 0):
        if profile not in PROFILES:
            raise BackendError(f"unknown synthetic profile {profile!r}; pick one of {', '.join(PROFILES)}")
        if variants < 0:
            raise BackendError("variants must be non-negative")
        self.descriptor = f"synthetic:{profile}:{seed}" + (f":{variants}" if variants else "")
        self.profile = profile
        self.seed = seed
        self.variants = variants  # > 0: one independent draw stream per variant

    def episode(self, task, env, suite, mode, repeat, seed) -> Episode:
        if self.variants:
            v = repeat % self.variants
            return Episode(SyntheticClient(env, self.profile, f"{self.seed}/{v}"), f"{task.id}@{v}")
        return Episode(SyntheticClient(env, self.profile, self.seed), task.id)


def make_backend(descriptor: str) -> Backend:
    kind, _, rest = descriptor.partition(":")
    if kind == "scripted" and rest:
        return ScriptedBackend(rest)
    if kind == "record" and rest:
        return RecordBackend(rest)
    if kind == "live":
        return LiveBackend()
    if kind == "synthetic" and rest:
        profile, _, tail = rest.partition(":")
        seed, _, variants = tail.partition(":")
        try:
            return SyntheticBackend(profile, int(seed or 0), int(variants or 0))
        except ValueError:
            raise BackendError(f"bad backend descriptor {descriptor!r}") from None
    raise BackendError(f"bad backend descriptor {descriptor!r}")
