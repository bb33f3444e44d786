import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sclplan.pddl import (
    GoalParseError,
    Literal,
    ParseError,
    Plan,
    Problem,
    SemanticError,
    ground,
    parse_domain,
    parse_goal,
    parse_problem,
    serialize_domain,
    serialize_goal,
    serialize_problem,
    validate_plan,
)
from sclplan.pddl.model import is_variable

from conftest import PROBLEMS, corpus_task, domain_text

MINIMAL = """
(define (domain tiny)
  (:predicates (lit))
  (:action flip :parameters () :precondition () :effect (lit)))
"""

MOVE = """
(define (domain moves)
  (:requirements :strips :typing)
  (:types recep human - object)
  (:predicates (at ?r - recep))
  (:action move :parameters (?r - recep) :precondition () :effect (at ?r)))
"""

PICK_PLACE = """
(define (problem pick-place)
  (:domain alfworld)
  (:objects table-1 - receptacle fridge-1 - receptacle apple-1 - item)
  (:init (agentat table-1) (handempty) (in apple-1 table-1) (pickupable apple-1)
         (isreceptacle table-1) (isreceptacle fridge-1) (isopen table-1) (openable fridge-1)
         (coolsource fridge-1))
  (:goal (and (in apple-1 fridge-1) (not (isopen fridge-1)))))
"""


def test_minimal_domain():
    d = parse_domain(MINIMAL)
    assert len(d.predicates) == 1
    assert len(d.actions) == 1


def test_bundled_alfworld_has_nine_primitives(alfworld):
    names = [a.name for a in alfworld.actions]
    assert names == ["go-to", "open", "clean", "take", "close", "heat", "put", "toggle", "cool"]


def test_bundled_thor_and_robot_primitives():
    thor = parse_domain(domain_text("thor"))
    robot = parse_domain(domain_text("robot"))
    assert [a.name for a in thor.actions] == [
        "movetoobject", "openobject", "closeobject", "pickupobject", "placeobject", "sliceobject",
        "toggleobjecton", "toggleobjectoff"]
    assert [a.name for a in robot.actions] == [
        "sit", "stand", "movetoobject", "lookatobject", "pickupobject", "placeobject", "dropobject",
        "speaktohuman"]


def test_truncated_domain_reports_end_of_input():
    text = MINIMAL.rstrip()[:-1]
    with pytest.raises(ParseError) as err:
        parse_domain(text)
    lines = text.splitlines()
    assert err.value.line == len(lines)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as err:
        parse_domain("(define (domain x)\n  (:predicates (p))\n  (:action a :parameters ( :effect (p)))")
    assert err.value.line >= 1 and err.value.col >= 1
    assert "line" in str(err.value)


def test_identifiers_lowercased():
    d = parse_domain(MINIMAL.replace("(lit)", "(LIT)").replace("flip", "Flip"))
    assert d.action("flip") is not None
    assert d.predicate("lit") is not None


def test_empty_problem_is_vacuously_solvable():
    d = parse_domain(MINIMAL)
    p = parse_problem("(define (problem e) (:domain tiny) (:objects) (:init) (:goal (and)))", d)
    assert p.objects == () and p.goal == ()
    task = ground(d, p)
    assert task.is_goal(task.init_mask)


def test_undeclared_object_named_in_error(alfworld):
    with pytest.raises(SemanticError, match="apple-1"):
        parse_problem("(define (problem p) (:domain alfworld) (:objects table-1 - receptacle)"
                      " (:init (in apple-1 table-1)) (:goal (and)))", alfworld)


def test_problem_round_trip(alfworld):
    p = parse_problem(PICK_PLACE, alfworld)
    assert parse_problem(serialize_problem(p), alfworld) == p


@pytest.mark.parametrize("path", PROBLEMS, ids=lambda p: p.stem)
def test_corpus_round_trip(path):
    import re

    text = path.read_text()
    dname = re.search(r"\(:domain\s+([^\s)]+)", text).group(1)
    d = parse_domain(domain_text(dname))
    assert parse_domain(serialize_domain(d)) == d
    p = parse_problem(text, d)
    assert parse_problem(serialize_problem(p), d) == p


def test_bundled_domains_round_trip():
    for name in ("alfworld", "thor", "robot", "blocksworld", "gripper"):
        d = parse_domain(domain_text(name))
        assert parse_domain(serialize_domain(d)) == d


def test_goal_examples(alfworld):
    objects = ["bowl-1", "cabinet-2", "egg-1"]
    g = parse_goal("(and (isClean bowl-1) (in bowl-1 cabinet-2))", alfworld, objects)
    assert len(g) == 2
    assert g[0] == Literal(("isclean", "bowl-1"))
    assert parse_goal("The goal is: (isHot egg-1)", alfworld, objects) == (Literal(("ishot", "egg-1")),)
    with pytest.raises(GoalParseError, match="isshiny"):
        parse_goal("(and (isShiny bowl-1))", alfworld, objects)


def test_goal_prefers_conjunction(alfworld):
    text = "First (isopen fridge-1) matters, but the goal is (and (ishot egg-1) (in egg-1 fridge-1))."
    g = parse_goal(text, alfworld)
    assert len(g) == 2


def test_goal_without_expression(alfworld):
    with pytest.raises(GoalParseError):
        parse_goal("I cannot tell what the goal is.", alfworld)


def test_goal_unknown_object(alfworld):
    with pytest.raises(GoalParseError, match="mug-9"):
        parse_goal("(and (ishot mug-9))", alfworld, ["egg-1"])


def test_serialize_goal_format():
    assert serialize_goal(()) == "(and )"
    text = serialize_goal((Literal(("in", "b", "a")), Literal(("isopen", "a"), False)))
    assert text == "(and\n  (in b a)\n  (not (isopen a))\n)"


def test_move_grounds_per_receptacle():
    d = parse_domain(MOVE)
    p = parse_problem("(define (problem m) (:domain moves) (:objects r1 r2 - recep bob - human)"
                      " (:init) (:goal (and)))", d)
    task = ground(d, p)
    assert sorted(a.args for a in task.actions) == [("r1",), ("r2",)]


def oracle_ground_count(domain, problem) -> int:
    """Enumerate every typed binding, then keep what relaxed reachability allows."""
    static = {p.name for p in domain.predicates} - {a[0] for s in domain.actions
                                                    for a in (*s.add_effects, *s.del_effects)}
    objs = dict(problem.objects)
    candidates = []
    for schema in domain.actions:
        pools = [[o for o in objs if domain.is_subtype(objs[o], t)] for _, t in schema.params]
        for combo in itertools.product(*pools):
            b = dict(zip(schema.param_names, combo))
            ok = True
            pre = []
            for lit in schema.precondition:
                g = lit.substitute(b)
                if g.is_equality:
                    ok &= (g.args[0] == g.args[1]) == g.positive
                elif g.predicate in static:
                    ok &= (g.atom in problem.init) == g.positive
                elif g.positive:
                    pre.append(g.atom)
            if ok:
                adds = [tuple(b.get(x, x) for x in a) for a in schema.add_effects]
                candidates.append((pre, adds))
    reached = set(problem.init)
    alive = set()
    while True:
        grew = False
        for i, (pre, adds) in enumerate(candidates):
            if i not in alive and all(p in reached for p in pre):
                alive.add(i)
                reached.update(adds)
                grew = True
        if not grew:
            return len(alive)


def test_grounding_count_matches_oracle(alfworld):
    p = parse_problem(PICK_PLACE, alfworld)
    assert len(ground(alfworld, p).actions) == oracle_ground_count(alfworld, p)


@pytest.mark.parametrize("path", PROBLEMS[::4], ids=lambda p: p.stem)
def test_grounding_count_matches_oracle_on_corpus(path):
    import re

    text = path.read_text()
    d = parse_domain(domain_text(re.search(r"\(:domain\s+([^\s)]+)", text).group(1)))
    p = parse_problem(text, d)
    assert len(ground(d, p).actions) == oracle_ground_count(d, p)


@pytest.mark.parametrize("path", PROBLEMS, ids=lambda p: p.stem)
def test_grounding_soundness(path):
    task = corpus_task(path)
    n = len(task.atoms)
    objs = dict(task.objects) if task.objects else None
    for act in task.actions:
        assert all(0 <= i < n for i in (*act.pre, *act.neg_pre, *act.add, *act.dele))
        if objs:
            assert all(a in objs for a in act.args)


def test_validate_plan_examples(alfworld):
    p = parse_problem(PICK_PLACE, alfworld)
    task = ground(alfworld, p)
    by_name = {str(a): a for a in task.actions}
    trace = validate_plan(task, Plan())
    assert not trace.valid and trace.failed_index is None
    take = by_name["(take apple-1 table-1)"]
    # the second take needs the apple back on the table and a free hand
    trace = validate_plan(task, Plan((take, take)))
    assert trace.failed_index == 1
    assert ("handempty",) in trace.unmet


def test_validate_empty_plan_on_satisfied_goal():
    d = parse_domain(MINIMAL)
    task = ground(d, parse_problem("(define (problem e) (:domain tiny) (:init (lit)) (:goal (lit)))", d))
    assert validate_plan(task, Plan()).valid


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=10_000), max_size=12))
def test_validate_plan_is_total(picks):
    task = corpus_task(PROBLEMS[0])
    plan = Plan(tuple(task.actions[i % len(task.actions)] for i in picks))
    trace = validate_plan(task, plan)
    assert trace.failed_index is None or 0 <= trace.failed_index < len(plan)


names = st.from_regex(r"[a-z][a-z0-9]{0,5}-[1-9]", fullmatch=True)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["isopen", "ishot", "in", "holding"]), names, names,
                          st.booleans()), max_size=6))
def test_goal_serialize_round_trip(items):
    from sclplan.pddl import parse_domain as pd

    d = pd(domain_text("thor"))
    goal = tuple(Literal((p, a, b) if p == "in" else (p, a), pos) for p, a, b, pos in items)
    assert parse_goal(serialize_goal(goal), d) == goal


def test_variables_rejected_in_goal(alfworld):
    assert is_variable("?x")
    with pytest.raises(GoalParseError):
        parse_goal("(and (ishot ?x))", alfworld)


def test_problem_type_mismatch_rejected(alfworld):
    with pytest.raises(SemanticError):
        parse_problem("(define (problem p) (:domain alfworld) (:objects t - nosuchtype) (:init) (:goal (and)))",
                      alfworld)


def test_goal_equality_literal(alfworld):
    g = parse_goal("(and (not (= apple-1 mug-1)))", alfworld, ["apple-1", "mug-1"])
    assert g[0].is_equality and not g[0].positive
    p = Problem("alfworld", (("apple-1", "item"), ("mug-1", "item")), frozenset(), g)
    assert ground(alfworld, p).is_goal(0)
