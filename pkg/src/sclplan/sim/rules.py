"""Implicit physics for the thor-style kitchen.

Each rule looks at the ground-truth scene and either returns an updated
scene or None when it does not apply.  The simulator fires the table to
a fixpoint after every step; every rule is monotone, so the fixpoint is
reached after a handful of firings.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

from ..world import Entity, SceneGraph

MAX_FIRINGS = 100

# how many slices each sliceable class falls into; other classes give 2
SLICE_COUNT = {"bread": 3, "apple": 2, "tomato": 2, "lettuce": 2, "potato": 2}


class RuleLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Rule:
    name: str
    description: str
    apply: Callable[[SceneGraph], "SceneGraph | None"]


def containers(scene: SceneGraph, eid: str) -> list[str]:
    """Chain of enclosing entities, innermost first."""
    chain = []
    cur = scene.container_of(eid)
    while cur is not None and cur not in chain:
        chain.append(cur)
        cur = scene.container_of(cur)
    return chain


def _set_facts(scene: SceneGraph, changes: list[tuple[str, str, bool]]) -> SceneGraph | None:
    entities = dict(scene.entities)
    changed = False
    for eid, pred, value in changes:
        e = entities[eid]
        if e.value(pred) is not value and not (value is False and e.value(pred) is None):
            entities[eid] = e.set_dynamic(pred, value)
            changed = True
    return replace(scene, entities=entities) if changed else None


def _on(scene: SceneGraph, pred: str) -> list[str]:
    return sorted(e.id for e in scene.entities.values() if e.has(pred) and e.has("istoggled"))


def _clean(scene: SceneGraph):
    if not _on(scene, "watersource"):
        return None
    changes = []
    for e in sorted(scene.entities.values(), key=lambda x: x.id):
        if e.has("pickupable") and not e.has("isclean"):
            if any(scene.entities[c].has("cleansource") for c in containers(scene, e.id)):
                changes.append((e.id, "isclean", True))
    return _set_facts(scene, changes)


def _heat(scene: SceneGraph):
    sources = set(_on(scene, "heatsource"))
    if not sources:
        return None
    changes = []
    for e in sorted(scene.entities.values(), key=lambda x: x.id):
        if not e.has("pickupable") or not sources.intersection(containers(scene, e.id)):
            continue
        changes += [(e.id, "ishot", True), (e.id, "iscold", False)]
        if e.has("cookable"):
            changes.append((e.id, "iscooked", True))
    return _set_facts(scene, changes)


def _brew(scene: SceneGraph):
    changes = []
    for b in _on(scene, "brewer"):
        for x in scene.contents(b):
            if scene.entities[x].has("isreceptacle"):
                changes.append((x, "isfilled", True))
    return _set_facts(scene, changes)


def slice_ids(entity_id: str, count: int) -> list[str]:
    return [f"{entity_id}-slice-{i}" for i in range(1, count + 1)]


def _slice(scene: SceneGraph):
    """Replace a freshly sliced whole object by its slices."""
    target = next((e for e in sorted(scene.entities.values(), key=lambda x: x.id)
                   if e.has("sliceable") and e.has("issliced")), None)
    if target is None:
        return None
    count = SLICE_COUNT.get(target.cls, 2)
    static = {("pickupable", True)}
    if target.has("cookable"):
        static.add(("cookable", True))
    entities = dict(scene.entities)
    del entities[target.id]
    relations = {r for r in scene.relations if target.id not in (r[0], r[2])}
    outer = [(s, rel, o) for s, rel, o in scene.relations if s == target.id]
    discovered = set(scene.discovered) - {target.id}
    for sid in slice_ids(target.id, count):
        entities[sid] = Entity(sid, f"{target.cls}slice", frozenset(static),
                               frozenset({("issliced", True)} | {p for p in target.dynamic if p[0] != "issliced"}))
        relations.update((sid, rel, o) for _, rel, o in outer)
        if target.id in scene.discovered:
            discovered.add(sid)
    agent = scene.agent
    if agent.location == target.id:
        agent = replace(agent, location=scene.container_of(target.id) or "nowhere")
    return SceneGraph(entities, frozenset(relations), agent, frozenset(discovered), scene.merged)


THOR_RULES = (
    Rule("faucet-clean", "a running faucet cleans anything inside a sink basin", _clean),
    Rule("heat", "a switched-on stove, toaster or microwave heats (and cooks) what it contains", _heat),
    Rule("brew", "a switched-on coffee machine fills the mug placed in it", _brew),
    Rule("slice", "a sliced object is replaced by its slices in the same place", _slice),
)

RULES = {"alfworld": (), "thor": THOR_RULES, "robot": ()}


def run_rules(scene: SceneGraph, rules) -> tuple[SceneGraph, list[str]]:
    """Fire ``rules`` until none applies; returns the scene and the firing log."""
    fired: list[str] = []
    progress = True
    while progress:
        progress = False
        for rule in rules:
            new = rule.apply(scene)
            if new is None:
                continue
            fired.append(rule.name)
            if len(fired) > MAX_FIRINGS:
                raise RuleLimitExceeded(f"more than {MAX_FIRINGS} rule firings in one step")
            scene = new
            progress = True
    return scene, fired


def chill(scene: SceneGraph, waiting: frozenset[str]) -> tuple[SceneGraph, frozenset[str]]:
    """Objects that spent a full step inside a closed cooler turn cold.

    ``waiting`` holds the objects that were already inside a closed cooler
    at the end of the previous step.
    """
    inside = set()
    for e in scene.entities.values():
        if e.has("pickupable") and any(
            scene.entities[c].has("coolsource") and not scene.entities[c].has("isopen")
            for c in containers(scene, e.id)
        ):
            inside.add(e.id)
    changes = []
    for eid in sorted(inside & waiting):
        changes += [(eid, "iscold", True), (eid, "ishot", False)]
    new = _set_facts(scene, changes) if changes else None
    return (new or scene), frozenset(inside)
