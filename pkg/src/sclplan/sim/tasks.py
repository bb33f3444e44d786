"""Benchmark task fixtures and suite loading."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from ..pddl import Domain, Goal, parse_domain, parse_goal
from ..world import SceneGraph

ACTION_SETS = ("alfworld", "thor", "robot")
DEFAULT_MAX_STEPS = {"simple": 50, "complex": 75, "robot": 50}


class UnknownTask(LookupError):
    pass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Dialogue:
    """A person who hands over what they hold once they have been given a drink."""

    human: str
    wants: str = "isdrink"  # static predicate the gift must carry
    ask: str = "Could you bring me something to drink first?"
    thanks: str = "Thank you! Here, take what you came for."


@dataclass(frozen=True)
class TaskSpec:
    id: str
    nl_goal: str
    action_set: str
    layout: SceneGraph
    success: Goal
    max_steps: int = 50
    reference: tuple[str, ...] = ()  # one known-good action sequence
    dialogue: Dialogue | None = None
    layout_name: str = ""

    def __post_init__(self):
        if self.action_set not in ACTION_SETS:
            raise ConfigError(f"unknown action set {self.action_set!r}")


@dataclass(frozen=True)
class Suite:
    id: str
    action_set: str
    tasks: tuple[TaskSpec, ...] = field(default_factory=tuple)

    def task(self, task_id: str) -> TaskSpec:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise UnknownTask(task_id)


def data_path(*parts: str) -> Path:
    return Path(str(resources.files("sclplan") / "data")).joinpath(*parts)


@lru_cache(maxsize=None)
def load_domain(action_set: str) -> Domain:
    if action_set not in ACTION_SETS:
        raise ConfigError(f"unknown action set {action_set!r}")
    return parse_domain(data_path("domains", f"{action_set}.pddl").read_text())


def _layout(spec, base: Path) -> tuple[SceneGraph, str]:
    if isinstance(spec, dict):
        return SceneGraph.from_json(spec), ""
    path = base / spec
    if not path.exists():
        path = data_path("layouts", spec if spec.endswith(".json") else spec + ".json")
    if not path.exists():
        raise UnknownTask(f"layout {spec} not found")
    return SceneGraph.from_json(json.loads(path.read_text())), Path(spec).stem


def task_from_json(d: dict, action_set: str, base: Path, max_steps: int) -> TaskSpec:
    layout, name = _layout(d["layout"], base)
    domain = load_domain(action_set)
    success = d["success"]
    if isinstance(success, list):
        success = "(and " + " ".join(success) + ")"
    dialogue = Dialogue(**d["dialogue"]) if d.get("dialogue") else None
    return TaskSpec(
        id=d["id"],
        nl_goal=d["nl_goal"],
        action_set=action_set,
        layout=layout,
        success=parse_goal(success, domain),
        max_steps=int(d.get("max_steps", max_steps)),
        reference=tuple(d.get("reference", ())),
        dialogue=dialogue,
        layout_name=name,
    )


def load_suite(name_or_path: str) -> Suite:
    """Load a bundled suite by name (simple, complex, robot) or a suite JSON path."""
    path = Path(name_or_path)
    if not path.exists():
        path = data_path("suites", f"{name_or_path}.json")
        if not path.exists():
            raise ConfigError(f"unknown suite {name_or_path!r}")
    data = json.loads(path.read_text())
    action_set = data["action_set"]
    max_steps = int(data.get("max_steps", DEFAULT_MAX_STEPS.get(data["id"], 50)))
    tasks = tuple(task_from_json(t, action_set, path.parent, max_steps) for t in data["tasks"])
    ids = [t.id for t in tasks]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"duplicate task ids in suite {data['id']}")
    return Suite(data["id"], action_set, tasks)
