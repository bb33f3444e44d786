"""Width-based best-first search BFS(f) and a breadth-first oracle.

BFS(f) orders the open list by ``(novelty, goal_count, insertion order)``.
A state's novelty is the size of the smallest atom tuple (up to
``max_novelty_width``) that no earlier generated state with an equal or
lower goal count contained; states with no new tuple get
``max_novelty_width + 1`` and are kept, so exhausting the open list proves
the task unsolvable.
"""

from __future__ import annotations

import heapq
import time
from collections import deque
from dataclasses import dataclass
from typing import TextIO, Union

from ..pddl.grounding import Plan, StripsTask, bits


class OracleBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    max_novelty_width: int = 2
    node_budget: int = 20_000  # the deterministic limit
    time_budget: float = 30.0  # wall-clock backstop only

    def __post_init__(self):
        if self.max_novelty_width not in (1, 2):
            raise ValueError("max_novelty_width must be 1 or 2")
        if self.node_budget <= 0 or self.time_budget <= 0:
            raise ValueError("budgets must be positive")


@dataclass(frozen=True)
class Solved:
    plan: Plan
    expanded: int = 0

    @property
    def cost(self) -> int:
        return self.plan.cost


@dataclass(frozen=True)
class Unsolvable:
    expanded: int = 0


@dataclass(frozen=True)
class Budget:
    reason: str  # "node-limit" or "time-limit"
    expanded: int = 0


SolveOutcome = Union[Solved, Unsolvable, Budget]


def goal_count(task: StripsTask, state: int) -> int:
    """Number of goal literals not satisfied in ``state``."""
    return (task.goal_pos & ~state).bit_count() + (task.goal_neg & state).bit_count()


def relaxed_reachable(task: StripsTask) -> bool:
    """Delete-relaxation test: can every positive goal atom ever be added?"""
    reached = task.init_mask
    pending = list(task.actions)
    while True:
        if (reached & task.goal_pos) == task.goal_pos:
            return True
        rest = []
        grown = reached
        for a in pending:
            if (grown & a.pre_mask) == a.pre_mask:
                grown |= a.add_mask
            else:
                rest.append(a)
        if grown == reached:
            return False
        reached, pending = grown, rest


def _extract(parents: dict, state: int, actions) -> Plan:
    steps = []
    while True:
        parent, idx = parents[state]
        if parent is None:
            break
        steps.append(actions[idx])
        state = parent
    steps.reverse()
    return Plan(tuple(steps))


class _Novelty:
    """Tracks, per atom tuple, the lowest goal count it was seen with.

    Pairs are only tracked over fluent atoms. A static atom is in every
    state, so a pair holding one is novel only when its other atom is novel
    on its own, which already gives novelty 1.
    """

    def __init__(self, width: int, n_atoms: int, fluents: int = -1):
        self.width = width
        self.n = n_atoms
        self.fluents = fluents
        self.singles: dict[int, int] = {}
        self.pairs: dict[int, int] = {}

    def evaluate(self, state: int, gc: int) -> int:
        atoms = bits(state)
        novelty = self.width + 1
        singles = self.singles
        for a in atoms:
            best = singles.get(a)
            if best is None or best > gc:
                singles[a] = gc
                novelty = 1
        if self.width >= 2:
            pairs = self.pairs
            n = self.n
            found = False
            atoms = bits(state & self.fluents) if self.fluents != -1 else atoms
            for i, a in enumerate(atoms):
                base = a * n
                for b in atoms[i + 1:]:
                    key = base + b
                    best = pairs.get(key)
                    if best is None or best > gc:
                        pairs[key] = gc
                        found = True
            if found and novelty > 2:
                novelty = 2
        return novelty


def solve(task: StripsTask, config: SearchConfig = SearchConfig(), trace: TextIO | None = None) -> SolveOutcome:
    init = task.init_mask
    if task.is_goal(init):
        return Solved(Plan(), 0)
    if not relaxed_reachable(task):
        return Unsolvable(0)

    actions = task.actions
    fluents = 0
    for act in actions:
        fluents |= act.add_mask | act.del_mask
    novelty = _Novelty(config.max_novelty_width, len(task.atoms), fluents)
    gc0 = goal_count(task, init)
    open_list = [(novelty.evaluate(init, gc0), gc0, 0, init)]
    parents: dict[int, tuple[int | None, int]] = {init: (None, -1)}
    counter = 1
    expanded = 0
    deadline = time.perf_counter() + config.time_budget
    while open_list:
        nov, gc, _, state = heapq.heappop(open_list)
        if expanded >= config.node_budget:
            return Budget("node-limit", expanded)
        if (expanded & 127) == 0 and time.perf_counter() > deadline:
            return Budget("time-limit", expanded)
        expanded += 1
        if trace is not None:
            names = " ".join("(" + " ".join(task.atoms[i]) + ")" for i in bits(state))
            trace.write(f"expand {expanded} novelty={nov} goals={gc} {names}\n")
        for idx, act in enumerate(actions):
            if (state & act.pre_mask) != act.pre_mask or (state & act.neg_mask):
                continue
            child = (state & ~act.del_mask) | act.add_mask
            if child in parents:
                continue
            parents[child] = (state, idx)
            if task.is_goal(child):
                return Solved(_extract(parents, child, actions), expanded)
            cgc = goal_count(task, child)
            heapq.heappush(open_list, (novelty.evaluate(child, cgc), cgc, counter, child))
            counter += 1
    return Unsolvable(expanded)


def solve_oracle(task: StripsTask, max_states: int = 1_000_000) -> SolveOutcome:
    """Plain breadth-first search; returns a shortest plan."""
    init = task.init_mask
    if task.is_goal(init):
        return Solved(Plan(), 0)
    actions = task.actions
    parents: dict[int, tuple[int | None, int]] = {init: (None, -1)}
    queue = deque([init])
    expanded = 0
    while queue:
        state = queue.popleft()
        expanded += 1
        for idx, act in enumerate(actions):
            if not act.applicable(state):
                continue
            child = act.apply(state)
            if child in parents:
                continue
            parents[child] = (state, idx)
            if task.is_goal(child):
                return Solved(_extract(parents, child, actions), expanded)
            if len(parents) > max_states:
                raise OracleBudgetExceeded(f"more than {max_states} states")
            queue.append(child)
    return Unsolvable(expanded)
