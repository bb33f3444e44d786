"""Regenerate the PDDL problem corpus used by the planner acceptance tests.

    python3 tools/make_problems.py

Writes data/problems/*.pddl. Each problem names its domain, which lives in
data/domains. Problems stay small enough for exhaustive breadth-first
search, and some are unsolvable, in two flavours: goals the delete
relaxation already rules out, and goals that only exhaustive search can
refute.
"""

from __future__ import annotations

import random
from pathlib import Path

from sclplan.pddl import Literal, ground, parse_domain, serialize_problem
from sclplan.pddl.model import Problem

DATA = Path(__file__).resolve().parent.parent / "src" / "sclplan" / "data"
OUT = DATA / "problems"

BLOCKS = """\
; Four-operator blocks world.
(define (domain blocksworld)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x - block ?y - block) (ontable ?x - block) (clear ?x - block)
               (handempty) (holding ?x - block))
  (:action pick-up
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action put-down
    :parameters (?x - block)
    :precondition (holding ?x)
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y) (not (= ?x ?y)))
    :effect (and (on ?x ?y) (clear ?x) (handempty) (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
"""

GRIPPER = """\
; Two-handed robot ferrying balls between rooms.
(define (domain gripper)
  (:requirements :strips :typing :negative-preconditions)
  (:types room ball gripper)
  (:predicates (at-robby ?r - room) (at ?b - ball ?r - room) (free ?g - gripper)
               (carry ?b - ball ?g - gripper))
  (:action move
    :parameters (?from - room ?to - room)
    :precondition (and (at-robby ?from) (not (at-robby ?to)))
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (at ?b ?r) (at-robby ?r) (free ?g))
    :effect (and (carry ?b ?g) (not (at ?b ?r)) (not (free ?g))))
  (:action drop
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (carry ?b ?g) (at-robby ?r))
    :effect (and (at ?b ?r) (free ?g) (not (carry ?b ?g)))))
"""


def lit(*atom, positive=True) -> Literal:
    return Literal(tuple(atom), positive)


def random_walk_goal(domain, problem: Problem, rng: random.Random, steps: int, size: int):
    """Goal made of facts that differ from the start after a random walk."""
    task = ground(domain, problem)
    state = task.init_mask
    while state == task.init_mask:
        state = _walk(task, rng, steps)
    changed = state ^ task.init_mask
    diff = [i for i in range(len(task.atoms)) if changed >> i & 1]
    rng.shuffle(diff)
    goal = [Literal(task.atoms[i], bool(state >> i & 1)) for i in diff[:size]]
    return tuple(sorted(goal, key=lambda g: (g.atom, g.positive)))


def _walk(task, rng: random.Random, steps: int) -> int:
    state = task.init_mask
    for _ in range(steps):
        moves = [a for a in task.actions if a.applicable(state)]
        if not moves:
            break
        state = rng.choice(moves).apply(state)
    return state


# -- classic domains --------------------------------------------------------


def blocks_problem(name: str, n: int, rng: random.Random, goal=None) -> Problem:
    blocks = [f"b{i}" for i in range(1, n + 1)]
    order = blocks[:]
    rng.shuffle(order)
    init = {("handempty",)}
    towers = [[]]
    for b in order:
        if towers[-1] and rng.random() < 0.4:
            towers.append([])
        towers[-1].append(b)
    for tower in filter(None, towers):
        init.add(("ontable", tower[0]))
        for below, above in zip(tower, tower[1:]):
            init.add(("on", above, below))
        init.add(("clear", tower[-1]))
    base = Problem("blocksworld", tuple((b, "block") for b in blocks), frozenset(init), (), name)
    if goal is None:
        goal = random_walk_goal(parse_domain(BLOCKS), base, rng, 4 + 2 * n, 2 + n // 2)
    return Problem(base.domain_name, base.objects, base.init, goal, name)


def gripper_problem(name: str, balls: int, goal=None) -> Problem:
    objs = [("rooma", "room"), ("roomb", "room"), ("left", "gripper"), ("right", "gripper")]
    objs += [(f"ball{i}", "ball") for i in range(1, balls + 1)]
    init = {("at-robby", "rooma"), ("free", "left"), ("free", "right")}
    init |= {("at", f"ball{i}", "rooma") for i in range(1, balls + 1)}
    if goal is None:
        goal = tuple(lit("at", f"ball{i}", "roomb") for i in range(1, balls + 1))
    return Problem("gripper", tuple(objs), frozenset(init), goal, name)


# -- household domains ------------------------------------------------------


def household(set_: str, name: str, rng: random.Random, closed: bool, goal=None, size: int = 2,
              where: dict | None = None) -> Problem:
    """A small room: three receptacles, two items, the agent at the door."""
    domain = parse_domain((DATA / "domains" / f"{set_}.pddl").read_text())
    typed = set_ == "alfworld"
    recs = ["countertop-1", "cabinet-1", "table-1"]
    items = ["apple-1", "mug-1"]
    objs = [("room-1", "room" if typed else "entity")]
    objs += [(r, "receptacle" if typed else "entity") for r in recs]
    objs += [(i, "item" if typed else "entity") for i in items]
    init = {("agentat", "room-1"), ("handempty",)}
    for r in recs:
        init.add(("isreceptacle", r))
        if r == "cabinet-1":
            init.add(("openable", r))
            if not closed:
                init.add(("isopen", r))
        else:
            init.add(("isopen", r))
    for i in items:
        init.add(("pickupable", i))
        init.add(("in", i, (where or {}).get(i) or rng.choice(recs)))
    if set_ == "alfworld":
        init |= {("heatsource", "countertop-1"), ("cleansource", "table-1")}
    base = Problem(domain.name, tuple(objs), frozenset(init), (), name)
    if goal is None:
        goal = random_walk_goal(domain, base, rng, 12, size)
    return Problem(base.domain_name, base.objects, base.init, goal, name)


def build() -> dict[str, str]:
    rng = random.Random("problem-corpus")
    files: dict[str, Problem] = {}
    for i in range(8):
        files[f"blocks-{i + 1:02d}"] = blocks_problem(f"blocks-{i + 1}", 3 + i % 3, rng)
    files["blocks-cycle"] = blocks_problem("blocks-cycle", 3, rng,
                                           (lit("on", "b1", "b2"), lit("on", "b2", "b1")))
    files["blocks-self"] = blocks_problem("blocks-self", 3, rng, (lit("on", "b1", "b1"),))
    for n in (1, 2, 3, 4):
        files[f"gripper-{n}"] = gripper_problem(f"gripper-{n}", n)
    files["gripper-both-rooms"] = gripper_problem(
        "gripper-both-rooms", 2, (lit("at", "ball1", "rooma"), lit("at", "ball1", "roomb")))
    files["gripper-three-hands"] = gripper_problem(
        "gripper-three-hands", 3, tuple(lit("carry", f"ball{i}", g) for i, g in
                                        ((1, "left"), (2, "right"), (3, "left"))))
    for set_ in ("alfworld", "thor", "robot"):
        for i in range(4):
            files[f"{set_}-{i + 1:02d}"] = household(set_, f"{set_}-{i + 1}", rng, closed=i % 2 == 1,
                                                     size=1 + i % 3)
    files["alfworld-two-in-hand"] = household(
        "alfworld", "alfworld-two-in-hand", rng, False, (lit("holding", "apple-1"), lit("holding", "mug-1")))
    files["thor-hot"] = household("thor", "thor-hot", rng, False, (lit("ishot", "apple-1"),))
    files["robot-sealed-cabinet"] = household("robot", "robot-sealed-cabinet", rng, True,
                                              (lit("holding", "apple-1"),), where={"apple-1": "cabinet-1"})
    files["alfworld-already"] = household(
        "alfworld", "alfworld-already", rng, False, (lit("agentat", "room-1"), lit("handempty")))
    return {name: serialize_problem(p) for name, p in files.items()}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (DATA / "domains" / "blocksworld.pddl").write_text(BLOCKS)
    (DATA / "domains" / "gripper.pddl").write_text(GRIPPER)
    for old in OUT.glob("*.pddl"):
        old.unlink()
    problems = build()
    for name, text in sorted(problems.items()):
        (OUT / f"{name}.pddl").write_text(text)
    print(len(problems), "problems")


if __name__ == "__main__":
    main()
