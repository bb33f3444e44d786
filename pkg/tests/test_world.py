import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sclplan.pddl import Literal, ground
from sclplan.sim.tasks import data_path, load_domain
from sclplan.world import (
    AgentState,
    Entity,
    Observation,
    SceneGraph,
    UnknownGoalObject,
    load_scene,
    merge_observation,
    scene_atoms,
    to_problem,
)


def ent(eid, static=(), dynamic=()):
    return Entity(eid, eid.rsplit("-", 1)[0], frozenset((p, True) for p in static),
                  frozenset((p, True) for p in dynamic))


def apple_table():
    es = {e.id: e for e in (ent("table-1", ["isreceptacle"], ["isopen"]), ent("apple-1", ["pickupable"]),
                            ent("fridge-1", ["isreceptacle", "openable"]))}
    return SceneGraph(es, frozenset({("apple-1", "in", "table-1")}), AgentState("table-1"),
                      frozenset({"table-1", "apple-1"}))


def test_empty_scene_empty_goal(thor):
    p = to_problem(SceneGraph(), thor)
    assert p.objects == ()
    assert ground(thor, p).is_goal(ground(thor, p).init_mask)


def test_goal_over_undiscovered_entity(thor):
    with pytest.raises(UnknownGoalObject) as err:
        to_problem(apple_table(), thor, (Literal(("in", "apple-1", "fridge-1")),))
    assert err.value.name == "fridge-1"


def independent_atom_count(data: dict) -> int:
    """Count facts straight from the fixture JSON."""
    n = 0
    ids = {e["id"] for e in data["entities"]}
    for e in data["entities"]:
        n += sum(1 for v in e.get("static", {}).values() if v)
        n += sum(1 for v in e.get("dynamic", {}).values() if v)
    n += sum(1 for s, _, o in data["relations"] if s in ids and o in ids)
    agent = data.get("agent", {})
    n += 1 if agent.get("location") in ids else 0
    n += 1 if agent.get("holding") else 1  # holding atom, or handempty
    return n


@pytest.mark.parametrize("name", ["thor-kitchen-1", "thor-kitchen-2", "robot-lab"])
def test_fixture_init_count_matches_oracle(name):
    path = data_path("layouts", f"{name}.json")
    scene = load_scene(path)
    domain = load_domain("robot" if name.startswith("robot") else "thor")
    problem = to_problem(scene, domain)
    assert len(problem.init) == independent_atom_count(json.loads(path.read_text()))
    assert len(problem.objects) == len(scene.entities)


def test_merge_reveals_grow_discovered():
    s = apple_table()
    obs = Observation("You open fridge-1.", revealed=(ent("egg-1", ["pickupable"]), ent("milk-1", ["pickupable"])))
    assert len(merge_observation(s, obs).discovered) == len(s.discovered) + 2


def test_merge_delta_reaches_problem(thor):
    s = apple_table()
    s = merge_observation(s, Observation("", revealed=(ent("fridge-1", ["isreceptacle", "openable"]),)))
    s = merge_observation(s, Observation("", fact_deltas=(("fridge-1", "isopen", True),)))
    assert ("isopen", "fridge-1") in to_problem(s, thor).init


def test_merge_idempotent():
    s = apple_table()
    obs = Observation("", revealed=(ent("egg-1", ["pickupable"]),), fact_deltas=(("table-1", "isopen", False),),
                      id=7)
    once = merge_observation(s, obs)
    assert merge_observation(once, obs) == once


def test_merge_skips_unknown_and_static():
    s = apple_table()
    obs = Observation("", fact_deltas=(("ghost-1", "isopen", True), ("apple-1", "pickupable", False)),
                      relation_deltas=(("ghost-1", "in", "table-1", True),))
    out = merge_observation(s, obs)
    assert out.entities == s.entities and out.relations == s.relations


def test_to_problem_is_discovered_only(thor):
    p = to_problem(apple_table(), thor)
    assert {o for o, _ in p.objects} == {"table-1", "apple-1"}
    full = to_problem(apple_table(), thor, full=True)
    assert "fridge-1" in {o for o, _ in full.objects}


def test_schema_closure_on_layouts():
    for layout in data_path("layouts").glob("*.json"):
        scene = load_scene(layout)
        domain = load_domain("robot" if layout.stem.startswith("robot") else "thor")
        for atom in to_problem(scene, domain).init:
            schema = domain.predicate(atom[0])
            assert schema is not None and schema.arity == len(atom) - 1


def test_scene_json_round_trip():
    scene = load_scene(data_path("layouts", "thor-kitchen-1.json"))
    assert SceneGraph.from_json(scene.to_json()) == scene


def test_scene_invariants():
    with pytest.raises(ValueError):
        SceneGraph({"a-1": ent("a-1")}, frozenset({("a-1", "in", "b-1")}))
    with pytest.raises(ValueError):
        SceneGraph({"a-1": ent("a-1")}, agent=AgentState("nowhere", "a-1"))


facts = st.sampled_from(["isopen", "isclean", "ishot", "iscold", "istoggled"])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["table-1", "apple-1", "fridge-1"]), facts, st.booleans()), max_size=10),
       st.booleans())
def test_init_bijection_after_merges(deltas, reveal_fridge):
    """An atom is in init iff the fact holds in the merged scene."""
    s = apple_table()
    if reveal_fridge:
        s = merge_observation(s, Observation("", revealed=(s.entities["fridge-1"],)))
    for i, d in enumerate(deltas):
        s = merge_observation(s, Observation("", fact_deltas=(d,), id=i))
    domain = load_domain("thor")
    init = to_problem(s, domain).init
    for eid in s.discovered:
        for pred in ("isopen", "isclean", "ishot", "iscold", "istoggled"):
            assert ((pred, eid) in init) == s.entities[eid].has(pred)
    assert init == frozenset(scene_atoms(s))
