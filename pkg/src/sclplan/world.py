"""The agent's belief state and its translation into PDDL problems.

Only discovered entities ever reach the planner.  A goal that names an
entity the agent has not seen yet raises UnknownGoalObject, which is how
exploration is handed back to the language model.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

from .pddl import Domain, Goal, Problem, SemanticError
from .pddl.model import ROOT_TYPE

log = logging.getLogger(__name__)

RELATIONS = ("in", "on", "at")
NOWHERE = "nowhere"


class UnknownGoalObject(Exception):
    def __init__(self, name: str):
        super().__init__(f"goal mentions {name}, which has not been discovered")
        self.name = name


@dataclass(frozen=True)
class Entity:
    id: str
    cls: str
    static: frozenset[tuple[str, bool]] = frozenset()
    dynamic: frozenset[tuple[str, bool]] = frozenset()

    def has(self, pred: str) -> bool:
        return (pred, True) in self.static or (pred, True) in self.dynamic

    def value(self, pred: str) -> bool | None:
        for name, v in (*self.static, *self.dynamic):
            if name == pred:
                return v
        return None

    def set_dynamic(self, pred: str, value: bool) -> Entity:
        rest = frozenset(p for p in self.dynamic if p[0] != pred)
        return replace(self, dynamic=rest | {(pred, value)})

    def true_facts(self) -> list[str]:
        return sorted({p for p, v in (*self.static, *self.dynamic) if v})

    @classmethod
    def from_json(cls, d: dict) -> Entity:
        return cls(
            d["id"].lower(),
            d.get("class", d["id"].rsplit("-", 1)[0]).lower(),
            frozenset((k.lower(), bool(v)) for k, v in d.get("static", {}).items()),
            frozenset((k.lower(), bool(v)) for k, v in d.get("dynamic", {}).items()),
        )

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "class": self.cls,
            "static": dict(sorted(self.static)),
            "dynamic": dict(sorted(self.dynamic)),
        }


@dataclass(frozen=True)
class AgentState:
    location: str = NOWHERE
    holding: str | None = None
    flags: frozenset[str] = frozenset()


Relation = tuple[str, str, str]


@dataclass(frozen=True)
class Observation:
    text: str
    success: bool = True
    revealed: tuple[Entity, ...] = ()
    fact_deltas: tuple[tuple[str, str, bool], ...] = ()
    relation_deltas: tuple[tuple[str, str, str, bool], ...] = ()
    agent: AgentState | None = None
    removed: tuple[str, ...] = ()
    id: int | str | None = None


@dataclass(frozen=True)
class SceneGraph:
    entities: dict[str, Entity] = field(default_factory=dict)
    relations: frozenset[Relation] = frozenset()
    agent: AgentState = AgentState()
    discovered: frozenset[str] = frozenset()
    merged: frozenset = frozenset()

    def __post_init__(self):
        for s, rel, o in self.relations:
            if rel not in RELATIONS or s not in self.entities or o not in self.entities:
                raise ValueError(f"bad relation {(s, rel, o)}")
        h = self.agent.holding
        if h is not None and (h not in self.entities or not self.entities[h].has("pickupable")):
            raise ValueError(f"agent cannot be holding {h}")

    def container_of(self, entity_id: str) -> str | None:
        for s, rel, o in sorted(self.relations):
            if s == entity_id and rel in ("in", "on"):
                return o
        return None

    def contents(self, entity_id: str) -> list[str]:
        return sorted(s for s, rel, o in self.relations if o == entity_id and rel in RELATIONS)

    def visible_entities(self) -> list[Entity]:
        return [self.entities[i] for i in sorted(self.discovered) if i in self.entities]

    @classmethod
    def from_json(cls, data: dict) -> SceneGraph:
        entities = {}
        for d in data.get("entities", []):
            e = Entity.from_json(d)
            if e.id in entities:
                raise ValueError(f"duplicate entity id {e.id}")
            entities[e.id] = e
        relations = frozenset(tuple(x.lower() for x in r) for r in data.get("relations", []))
        a = data.get("agent", {})
        agent = AgentState(
            (a.get("location") or NOWHERE).lower(),
            a["holding"].lower() if a.get("holding") else None,
            frozenset(f.lower() for f in a.get("flags", [])),
        )
        discovered = data.get("discovered")
        disc = frozenset(entities) if discovered is None else frozenset(x.lower() for x in discovered)
        return cls(entities, relations, agent, disc)

    def to_json(self) -> dict:
        return {
            "entities": [self.entities[k].to_json() for k in sorted(self.entities)],
            "relations": [list(r) for r in sorted(self.relations)],
            "agent": {
                "location": self.agent.location,
                "holding": self.agent.holding,
                "flags": sorted(self.agent.flags),
            },
            "discovered": sorted(self.discovered),
        }


def load_scene(path: str | Path) -> SceneGraph:
    return SceneGraph.from_json(json.loads(Path(path).read_text()))


def pddl_type(entity: Entity, domain: Domain) -> str:
    """Most specific domain type this entity can be given."""
    if domain.has_type(entity.cls):
        return entity.cls
    if entity.cls == "room" and domain.has_type("room"):
        return "room"
    if entity.has("isreceptacle") and not entity.has("pickupable") and domain.has_type("receptacle"):
        return "receptacle"
    for t in ("item", "entity"):
        if domain.has_type(t):
            return t
    return ROOT_TYPE


def scene_atoms(scene: SceneGraph, only: frozenset[str] | None = None) -> set[tuple[str, ...]]:
    """Ground atoms describing ``scene``, restricted to entities in ``only``."""
    keep = scene.discovered if only is None else only
    atoms: set[tuple[str, ...]] = set()
    for eid in keep:
        e = scene.entities.get(eid)
        if e is None:
            continue
        for pred in e.true_facts():
            atoms.add((pred, eid))
    for s, rel, o in scene.relations:
        if s in keep and o in keep:
            atoms.add((rel, s, o))
    if scene.agent.location in keep:
        atoms.add(("agentat", scene.agent.location))
    if scene.agent.holding is None:
        atoms.add(("handempty",))
    elif scene.agent.holding in keep:
        atoms.add(("holding", scene.agent.holding))
    for flag in scene.agent.flags:
        atoms.add((flag,))
    return atoms


def to_problem(scene: SceneGraph, domain: Domain, goal: Goal = (), name: str = "task",
               full: bool = False) -> Problem:
    """Build the planning problem for ``goal`` over the discovered scene.

    ``full`` ignores the discovered mask (ground-truth planning).
    """
    keep = frozenset(scene.entities) if full else scene.discovered & frozenset(scene.entities)
    objects = tuple((eid, pddl_type(scene.entities[eid], domain)) for eid in sorted(keep))
    init = scene_atoms(scene, keep)
    for atom in init:
        schema = domain.predicate(atom[0])
        if schema is None or schema.arity != len(atom) - 1:
            raise SemanticError(f"scene fact {atom} has no matching predicate in {domain.name}")
    for lit in goal:
        for arg in lit.args:
            if arg not in keep:
                raise UnknownGoalObject(arg)
    return Problem(domain.name, objects, frozenset(init), tuple(goal), name)


def merge_observation(scene: SceneGraph, obs: Observation) -> SceneGraph:
    if obs.id is not None and obs.id in scene.merged:
        return scene
    entities = dict(scene.entities)
    relations = set(scene.relations)
    discovered = set(scene.discovered)
    for eid in obs.removed:
        entities.pop(eid, None)
        discovered.discard(eid)
        relations = {r for r in relations if eid not in (r[0], r[2])}
    for e in obs.revealed:
        entities[e.id] = e
        discovered.add(e.id)
    for eid, pred, value in obs.fact_deltas:
        e = entities.get(eid)
        if e is None:
            log.warning("skipping delta for unknown entity %s", eid)
            continue
        if any(p == pred for p, _ in e.static):
            log.warning("skipping delta on static predicate %s of %s", pred, eid)
            continue
        entities[eid] = e.set_dynamic(pred, value)
    for s, rel, o, present in obs.relation_deltas:
        if s not in entities or o not in entities:
            log.warning("skipping relation delta over unknown entity %s/%s", s, o)
            continue
        (relations.add if present else relations.discard)((s, rel, o))
    agent = obs.agent if obs.agent is not None else scene.agent
    merged = scene.merged | {obs.id} if obs.id is not None else scene.merged
    return SceneGraph(entities, frozenset(relations), agent, frozenset(discovered), merged)
