import io
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sclplan.pddl import Literal, Problem, ground, parse_problem, validate_plan
from sclplan.search import (
    Budget,
    OracleBudgetExceeded,
    SearchConfig,
    Solved,
    Unsolvable,
    goal_count,
    solve,
    solve_oracle,
)

from conftest import PROBLEMS, corpus_task
from test_pddl import PICK_PLACE

APPLE_FRIDGE = PICK_PLACE.replace("(agentat table-1)", "(agentat room-1)").replace(
    "(:objects ", "(:objects room-1 - room ")


def test_init_goal_gives_empty_plan(alfworld):
    p = parse_problem(APPLE_FRIDGE, alfworld)
    task = ground(alfworld, Problem(p.domain_name, p.objects, p.init, (Literal(("agentat", "room-1")),)))
    out = solve(task)
    assert isinstance(out, Solved) and out.plan.cost == 0
    assert isinstance(solve_oracle(task), Solved)


def test_apple_fridge_matches_oracle_cost(alfworld):
    task = ground(alfworld, parse_problem(APPLE_FRIDGE, alfworld))
    out, ref = solve(task), solve_oracle(task)
    assert isinstance(out, Solved) and isinstance(ref, Solved)
    # go to table, take, go to fridge, open, put, close
    assert ref.plan.cost == 6
    assert out.plan.cost == ref.plan.cost
    assert validate_plan(task, out.plan).valid


def test_pruned_goal_atom_is_unsolvable(alfworld):
    p = parse_problem(APPLE_FRIDGE, alfworld)
    # nothing in the domain makes a receptacle pickupable
    task = ground(alfworld, Problem(p.domain_name, p.objects, p.init, (Literal(("pickupable", "fridge-1")),)))
    assert isinstance(solve(task), Unsolvable)
    assert isinstance(solve_oracle(task), Unsolvable)


def test_goal_count_examples(alfworld):
    p = parse_problem(APPLE_FRIDGE, alfworld)
    goal = (Literal(("agentat", "room-1")), Literal(("isopen", "fridge-1")))
    task = ground(alfworld, Problem(p.domain_name, p.objects, p.init, goal))
    assert goal_count(task, task.init_mask) == 1
    task = ground(alfworld, Problem(p.domain_name, p.objects, p.init, goal[:1]))
    assert goal_count(task, task.init_mask) == 0
    negs = (Literal(("isopen", "fridge-1"), False), Literal(("holding", "apple-1"), False))
    task = ground(alfworld, Problem(p.domain_name, p.objects, p.init, negs))
    assert goal_count(task, 0) == 0


@pytest.mark.parametrize("path", PROBLEMS, ids=lambda p: p.stem)
def test_corpus_soundness_and_oracle_agreement(path):
    task = corpus_task(path)
    out, ref = solve(task), solve_oracle(task)
    assert not isinstance(out, Budget)
    assert isinstance(out, Solved) == isinstance(ref, Solved)
    if isinstance(out, Solved):
        assert validate_plan(task, out.plan).valid
        assert out.plan.cost == len(out.plan)
        assert out.plan.cost >= ref.plan.cost


@pytest.mark.parametrize("path", PROBLEMS, ids=lambda p: p.stem)
def test_pruning_preserves_solvability(path):
    on, off = solve(corpus_task(path)), solve(corpus_task(path, prune=False))
    assert isinstance(on, Solved) == isinstance(off, Solved)


def test_corpus_has_both_outcomes():
    outcomes = [isinstance(solve(corpus_task(p)), Solved) for p in PROBLEMS]
    assert len(PROBLEMS) >= 30
    assert any(outcomes) and not all(outcomes)


def test_deterministic_plans():
    for path in PROBLEMS:
        a, b = solve(corpus_task(path)), solve(corpus_task(path))
        assert type(a) is type(b)
        if isinstance(a, Solved):
            assert [str(x) for x in a.plan] == [str(x) for x in b.plan]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(PROBLEMS), st.integers(min_value=1, max_value=60), st.integers(min_value=1, max_value=200))
def test_monotone_node_budget(path, small, extra):
    task = corpus_task(path)
    lo = solve(task, SearchConfig(node_budget=small, time_budget=60))
    hi = solve(task, SearchConfig(node_budget=small + extra, time_budget=60))
    if isinstance(lo, Solved):
        assert isinstance(hi, Solved)
    if isinstance(hi, Unsolvable):
        assert not isinstance(lo, Solved)


def test_node_budget_reported():
    task = corpus_task(next(p for p in PROBLEMS if p.stem == "gripper-4"))
    out = solve(task, SearchConfig(node_budget=2))
    assert isinstance(out, Budget) and out.reason == "node-limit"


def test_width_one_still_sound():
    for path in PROBLEMS:
        task = corpus_task(path)
        out = solve(task, SearchConfig(max_novelty_width=1))
        if isinstance(out, Solved):
            assert validate_plan(task, out.plan).valid


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(max_novelty_width=3)
    with pytest.raises(ValueError):
        SearchConfig(node_budget=0)


def test_oracle_guard():
    task = corpus_task(next(p for p in PROBLEMS if p.stem == "gripper-4"))
    with pytest.raises(OracleBudgetExceeded):
        solve_oracle(task, max_states=10)


def test_trace_lines_per_expansion():
    task = corpus_task(next(p for p in PROBLEMS if p.stem == "gripper-2"))
    buf = io.StringIO()
    out = solve(task, trace=buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == out.expanded
    assert lines[0].startswith("expand 1 novelty=")


def test_corpus_runtime_under_ten_seconds():
    tasks = [corpus_task(p) for p in PROBLEMS]
    start = time.perf_counter()
    for task in tasks:
        solve(task)
    assert time.perf_counter() - start < 10.0
