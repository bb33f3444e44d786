import copy
import random

import pytest

from sclplan.controller import (
    Budgets,
    Mode,
    Provenance,
    Repair,
    Unsatisfiable,
    Valid,
    precondition_verify,
    run_episode,
)
from sclplan.llm import LLMPlanner, ScriptedClient
from sclplan.sim import HouseholdEnv, action_catalog, load_domain, load_suite, parse_action_text
from sclplan.sim.catalog import ground_to_parsed, render
from sclplan.world import SceneGraph, merge_observation

SUITES = {name: load_suite(name) for name in ("simple", "complex", "robot")}


def random_command(scene, action_set, rng):
    known = sorted(scene.discovered)
    entry = rng.choice(action_catalog(action_set))
    return entry.render([rng.choice(known) for _ in entry.slots])


def pv_corpus(n_tasks_per_suite=6, per_state=6, walk=12, seed=0):
    """(env, belief, command) triples drawn along random walks through the suites."""
    rng = random.Random(seed)
    for suite in SUITES.values():
        for task in suite.tasks[:n_tasks_per_suite]:
            env = HouseholdEnv()
            belief = merge_observation(SceneGraph(), env.reset(task))
            for _ in range(walk):
                snapshot = copy.deepcopy(env)
                for _ in range(per_state):
                    yield snapshot, belief, random_command(belief, task.action_set, rng)
                step = (rng.choice(task.reference) if task.reference and rng.random() < 0.5
                        else random_command(belief, task.action_set, rng))
                belief = merge_observation(belief, env.step(step).observation)


CORPUS = list(pv_corpus())


def test_corpus_is_large_and_mixed():
    verdicts = []
    for env, belief, text in CORPUS:
        set_ = env.state.task.action_set
        verdicts.append(type(precondition_verify(parse_action_text(set_, text), belief, env.domain, set_)))
    assert len(CORPUS) >= 500
    assert {Valid, Repair, Unsatisfiable} <= set(verdicts)


def test_valid_iff_simulator_accepts():
    for env, belief, text in CORPUS:
        set_ = env.state.task.action_set
        verdict = precondition_verify(parse_action_text(set_, text), belief, env.domain, set_)
        probe = copy.deepcopy(env)
        accepted = probe.step(text).success
        assert isinstance(verdict, Valid) == accepted, (env.state.task.id, text, verdict)


def test_repair_then_action_succeeds():
    repairs = 0
    for env, belief, text in CORPUS:
        set_ = env.state.task.action_set
        action = parse_action_text(set_, text)
        verdict = precondition_verify(action, belief, env.domain, set_)
        if not isinstance(verdict, Repair):
            continue
        repairs += 1
        probe = copy.deepcopy(env)
        for act in verdict.plan:
            assert probe.step(render(set_, ground_to_parsed(act, env.domain, set_))).success
        assert probe.step(text).success, (env.state.task.id, text)
    assert repairs >= 50


def test_finish_is_always_valid():
    env, belief, _ = CORPUS[0]
    set_ = env.state.task.action_set
    assert precondition_verify(parse_action_text(set_, "finish"), belief, env.domain, set_) == Valid()


def test_unknown_object_is_unsatisfiable():
    env, belief, _ = CORPUS[0]
    set_ = env.state.task.action_set
    cmd = action_catalog(set_)[0].render(["ghost-1"] * len(action_catalog(set_)[0].slots))
    assert isinstance(precondition_verify(parse_action_text(set_, cmd), belief, env.domain, set_), Unsatisfiable)


def scripted(task, react=(), goals=()):
    entries = [(f"{task.id}:react:{i}", f"Thought: go.\nAction: {a}") for i, a in enumerate(react)]
    entries += [(f"{task.id}:goal:{i}", g) for i, g in enumerate(goals)]
    return LLMPlanner(ScriptedClient(entries), task.action_set, task.id)


def goal_text(task):
    parts = [f"({' '.join(l.atom)})" if l.positive else f"(not ({' '.join(l.atom)}))" for l in task.success]
    return "(and " + " ".join(parts) + ")"


def test_pv_repairs_skipped_step():
    task = SUITES["robot"].task("robot-apple-red")
    # skip the walk to the apple: PV should insert it
    react = [a for a in task.reference if a != "MoveToObject apple-1"]
    res = run_episode(HouseholdEnv(), load_domain("robot"), scripted(task, react), task, Mode.REACT_PV)
    assert res.success
    assert Provenance.PV in {r.provenance for r in res.records}
    assert res.invalid_react_count >= 1 and res.invalid_corrected_count >= 1


def test_react_without_pv_fails_on_skipped_step():
    task = SUITES["robot"].task("robot-apple-red")
    react = [a for a in task.reference if a != "MoveToObject apple-1"] + ["finish"]
    res = run_episode(HouseholdEnv(), load_domain("robot"), scripted(task, react), task, Mode.REACT)
    assert not res.success
    assert any(not r.success for r in res.records)


def test_sclplan_with_correct_goal_uses_symbolic_plan():
    task = SUITES["simple"].task("simple-04")
    res = run_episode(HouseholdEnv(), load_domain("alfworld"), scripted(task, goals=[goal_text(task)] * 3),
                      task, Mode.SCLPLAN)
    assert res.goal_found_globally
    assert res.success
    assert {r.provenance for r in res.records} == {Provenance.GSP}


def test_symbolic_mode_never_calls_react():
    task = SUITES["simple"].tasks[0]
    res = run_episode(HouseholdEnv(), load_domain("alfworld"), scripted(task, goals=["(and (nonsense))"] * 3),
                      task, Mode.SYMBOLIC)
    assert not res.success and res.termination == "no-plan"
    assert res.react_predictions == 0 and res.records == []


def test_step_budget_respected():
    task = SUITES["simple"].tasks[0]
    react = ["go to desk-1"] * 20
    res = run_episode(HouseholdEnv(), load_domain("alfworld"), scripted(task, react), task, Mode.REACT,
                      Budgets(max_steps=5))
    assert res.env_steps == 5 and res.termination == "max-steps"


def test_script_exhaustion_ends_episode():
    task = SUITES["simple"].tasks[0]
    res = run_episode(HouseholdEnv(), load_domain("alfworld"), scripted(task), task, Mode.REACT)
    assert res.termination == "script-exhausted" and not res.success


@pytest.mark.parametrize("mode", [Mode.REACT, Mode.REACT_PV, Mode.SCLPLAN])
def test_transcript_counts_match_records(mode):
    task = SUITES["robot"].task("robot-soda-to-table")
    res = run_episode(HouseholdEnv(), load_domain("robot"),
                      scripted(task, task.reference, [goal_text(task)] * 3), task, mode)
    assert res.success
    assert sum(res.provenance_counts().values()) == res.env_steps == len(res.transcript().splitlines())
