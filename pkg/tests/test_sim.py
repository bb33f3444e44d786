import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sclplan.pddl import ground
from sclplan.search import Solved, solve
from sclplan.sim import HouseholdEnv, action_catalog, load_domain, load_suite, parse_action_text
from sclplan.sim.catalog import ground_to_parsed, render
from sclplan.sim.rules import chill, run_rules, THOR_RULES
from sclplan.sim.tasks import ConfigError, UnknownTask
from sclplan.world import Entity, SceneGraph, AgentState, merge_observation, scene_atoms, to_problem

SUITES = {name: load_suite(name) for name in ("simple", "complex", "robot")}
ALL_TASKS = [t for s in SUITES.values() for t in s.tasks]


def ent(eid, static=(), dynamic=()):
    return Entity(eid, eid.rsplit("-", 1)[0], frozenset((p, True) for p in static),
                  frozenset((p, True) for p in dynamic))


def test_suite_sizes():
    assert len(SUITES["simple"].tasks) == 50
    assert len(SUITES["complex"].tasks) == 16
    assert len(SUITES["robot"].tasks) == 10


def test_unknown_suite_and_task():
    with pytest.raises(ConfigError):
        load_suite("nonexistent-suite")
    with pytest.raises(UnknownTask):
        SUITES["simple"].task("no-such-task")


@pytest.mark.parametrize("action_set,count", [("alfworld", 9), ("thor", 8), ("robot", 8)])
def test_catalog_matches_domain(action_set, count):
    catalog = action_catalog(action_set)
    domain = load_domain(action_set)
    assert len(catalog) == count
    assert {e.schema for e in catalog} == {a.name for a in domain.actions}
    for e in catalog:
        schema = domain.action(e.schema)
        shown = {v for _, v in e.slots}
        hidden = {v for v, _ in e.hidden}
        assert shown | hidden == set(schema.param_names)


def test_parse_action_examples():
    p = parse_action_text("alfworld", "Action: take apple-1 from table-1.")
    assert (p.name, p.arguments) == ("take", ("apple-1", "table-1"))
    p = parse_action_text("alfworld", "put apple-1 on fridge-1")
    assert (p.name, p.arguments) == ("put", ("apple-1", "fridge-1"))
    p = parse_action_text("thor", "PickupObject(egg-1)")
    assert (p.name, p.arguments) == ("pickupobject", ("egg-1",))
    assert parse_action_text("robot", "DropObject").name == "dropobject"
    assert parse_action_text("thor", "finish").is_finish
    assert parse_action_text("thor", "dance wildly") is None


def test_step_before_reset():
    with pytest.raises(RuntimeError):
        HouseholdEnv().step("go to table-1")


def test_reset_rejects_non_task():
    with pytest.raises(UnknownTask):
        HouseholdEnv().reset("simple-01")


def known_good(task):
    """The task's reference, or a ground-truth plan when it has none."""
    if task.reference:
        return list(task.reference)
    env = HouseholdEnv()
    env.reset(task)
    domain = load_domain(task.action_set)
    out = solve(ground(domain, to_problem(env.state.scene, domain, task.success, full=True)))
    assert isinstance(out, Solved)
    return [render(task.action_set, ground_to_parsed(a, domain, task.action_set)) for a in out.plan]


@pytest.mark.parametrize("task", ALL_TASKS, ids=lambda t: t.id)
def test_known_good_sequence_reaches_goal(task):
    env = HouseholdEnv()
    env.reset(task)
    assert not env.check_goal()
    for text in known_good(task):
        assert env.step(text).success, text
    assert env.check_goal()


def test_failed_action_leaves_scene():
    task = SUITES["simple"].tasks[0]
    env = HouseholdEnv()
    env.reset(task)
    before = env.state.scene
    out = env.step("take ghost-9 from nowhere-1")
    assert not out.success and out.observation.text.startswith("Nothing happens")
    assert env.state.scene == before


def test_chill_needs_a_full_step():
    fridge = ent("fridge-1", ["isreceptacle", "openable", "coolsource"])
    apple = ent("apple-1", ["pickupable"], ["ishot"])
    scene = SceneGraph({"fridge-1": fridge, "apple-1": apple}, frozenset({("apple-1", "in", "fridge-1")}),
                       AgentState("fridge-1"), frozenset({"fridge-1", "apple-1"}))
    once, waiting = chill(scene, frozenset())
    assert waiting == {"apple-1"} and not once.entities["apple-1"].has("iscold")
    twice, _ = chill(once, waiting)
    assert twice.entities["apple-1"].has("iscold") and not twice.entities["apple-1"].has("ishot")
    opened = replace(scene, entities={**scene.entities, "fridge-1": fridge.set_dynamic("isopen", True)})
    after, waiting = chill(opened, frozenset({"apple-1"}))
    assert waiting == frozenset() and not after.entities["apple-1"].has("iscold")


def test_slice_rule_replaces_object():
    tomato = ent("tomato-1", ["pickupable", "sliceable"], ["issliced"])
    counter = ent("counter-1", ["isreceptacle"], ["isopen"])
    scene = SceneGraph({"tomato-1": tomato, "counter-1": counter}, frozenset({("tomato-1", "in", "counter-1")}),
                       AgentState("counter-1"), frozenset({"tomato-1", "counter-1"}))
    out, fired = run_rules(scene, THOR_RULES)
    assert fired == ["slice"]
    assert set(out.entities) == {"counter-1", "tomato-1-slice-1", "tomato-1-slice-2"}
    assert ("tomato-1-slice-2", "in", "counter-1") in out.relations
    assert out.entities["tomato-1-slice-1"].has("issliced")


def test_slice_task_observation():
    task = SUITES["complex"].task("slice-tomato-k1")
    env = HouseholdEnv()
    env.reset(task)
    texts = [env.step(a).observation for a in task.reference]
    sliced = next(o for o in texts if "tomato-1" in o.removed)
    assert "tomato-1 is now in pieces" in sliced.text
    assert {e.id for e in sliced.revealed} >= {"tomato-1-slice-1", "tomato-1-slice-2"}


def test_toggle_heats_contents():
    task = SUITES["complex"].task("cook-egg-k1")
    env = HouseholdEnv()
    env.reset(task)
    texts = [env.step(a).observation.text for a in task.reference]
    assert any("is now hot" in t for t in texts)


def test_dialogue_reveals_bag():
    task = SUITES["robot"].task("robot-get-bag")
    env = HouseholdEnv()
    env.reset(task)
    human = task.dialogue.human
    env.step(f"MoveToObject {human}")
    first = env.step(f"SpeakToHuman {human}")
    assert task.dialogue.ask in first.observation.text
    hidden = {e for e in env.state.scene.contents(human)} - env.state.scene.discovered
    assert hidden
    for text in task.reference:
        env.step(text)
    assert hidden <= env.state.scene.discovered
    assert env.check_goal()


def test_seeded_layout_shuffle_is_deterministic():
    task = SUITES["complex"].tasks[0]
    a, b = HouseholdEnv(), HouseholdEnv()
    assert a.reset(task, seed=3) == b.reset(task, seed=3)
    assert a.state.scene == b.state.scene


def catalog_actions(env, rng):
    """Random command over known objects, drawn from the catalog."""
    st_ = env.state
    known = sorted(st_.scene.discovered)
    entry = rng.choice(action_catalog(st_.task.action_set))
    return entry.render([rng.choice(known) for _ in entry.slots])


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(ALL_TASKS[::3]), st.integers(min_value=0, max_value=10_000), st.integers(0, 1))
def test_belief_matches_ground_truth(task, seed, follow_reference):
    """Merged observations reproduce the discovered part of the true scene."""
    rng = random.Random(seed)
    env = HouseholdEnv()
    belief = merge_observation(SceneGraph(), env.reset(task))
    assert scene_atoms(belief) == scene_atoms(env.state.scene)
    steps = known_good(task) if follow_reference else []
    steps += [catalog_actions(env, rng) for _ in range(15)]
    for text in steps:
        if not env.state.scene.discovered:
            break
        belief = merge_observation(belief, env.step(text).observation)
        assert scene_atoms(belief) == scene_atoms(env.state.scene), text
