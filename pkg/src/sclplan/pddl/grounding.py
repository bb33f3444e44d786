"""Grounding of lifted domains into propositional STRIPS tasks.

States are Python ints used as bitsets over the atom universe; bit ``i``
is set when ``task.atoms[i]`` holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import GroundingError
from .model import Atom, Domain, Literal, Problem, is_variable

FALSE_ATOM: Atom = ("__false__",)


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True, slots=True)
class GroundAction:
    name: str
    args: tuple[str, ...]
    pre: frozenset[int]
    neg_pre: frozenset[int]
    add: frozenset[int]
    dele: frozenset[int]
    cost: int = 1
    pre_mask: int = field(default=0, compare=False, repr=False)
    neg_mask: int = field(default=0, compare=False, repr=False)
    add_mask: int = field(default=0, compare=False, repr=False)
    del_mask: int = field(default=0, compare=False, repr=False)

    def applicable(self, state: int) -> bool:
        return (state & self.pre_mask) == self.pre_mask and not (state & self.neg_mask)

    def apply(self, state: int) -> int:
        return (state & ~self.del_mask) | self.add_mask

    def __str__(self) -> str:
        return "(" + " ".join((self.name, *self.args)) + ")"


def make_action(name, args, pre, neg_pre, add, dele, cost=1) -> GroundAction:
    add = frozenset(add)
    # add wins over delete when a binding makes them collide
    dele = frozenset(dele) - add
    pre, neg_pre = frozenset(pre), frozenset(neg_pre)
    return GroundAction(name, tuple(args), pre, neg_pre, add, dele, cost,
                        mask_of(pre), mask_of(neg_pre), mask_of(add), mask_of(dele))


@dataclass(frozen=True)
class StripsTask:
    atoms: tuple[Atom, ...]
    actions: tuple[GroundAction, ...]
    init: frozenset[int]
    goal: tuple[tuple[int, bool], ...]
    objects: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "index", {a: i for i, a in enumerate(self.atoms)})
        object.__setattr__(self, "init_mask", mask_of(self.init))
        object.__setattr__(self, "goal_pos", mask_of(i for i, pos in self.goal if pos))
        object.__setattr__(self, "goal_neg", mask_of(i for i, pos in self.goal if not pos))

    def is_goal(self, state: int) -> bool:
        return (state & self.goal_pos) == self.goal_pos and not (state & self.goal_neg)

    def state_atoms(self, state: int) -> frozenset[Atom]:
        return frozenset(self.atoms[i] for i in bits(state))


@dataclass(frozen=True)
class Plan:
    actions: tuple[GroundAction, ...] = ()

    @property
    def cost(self) -> int:
        return sum(a.cost for a in self.actions)

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)


@dataclass(frozen=True)
class PlanTrace:
    states: tuple[int, ...]
    failed_index: int | None
    unmet: frozenset[Atom]
    goal_reached: bool

    @property
    def valid(self) -> bool:
        return self.failed_index is None and self.goal_reached


def validate_plan(task: StripsTask, plan) -> PlanTrace:
    """Replay ``plan`` from the initial state; never raises on bad plans."""
    state = task.init_mask
    states = [state]
    for i, act in enumerate(plan):
        if not act.applicable(state):
            missing = {task.atoms[j] for j in act.pre if not state >> j & 1}
            present = {("not", *task.atoms[j]) for j in act.neg_pre if state >> j & 1}
            return PlanTrace(tuple(states), i, frozenset(missing | present), False)
        state = act.apply(state)
        states.append(state)
    return PlanTrace(tuple(states), None, frozenset(), task.is_goal(state))


# -- grounding ---------------------------------------------------------------


def _objects_by_type(domain: Domain, problem: Problem) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for typ in [*domain.types, "object"]:
        out[typ] = [o for o, t in problem.objects if domain.is_subtype(t, typ)]
    return out


def _bindings(domain: Domain, schema, candidates, static_true, static_preds, prune):
    """Backtracking enumeration of typed bindings, checking each literal as
    soon as all its variables are bound."""
    names = schema.param_names
    # checks[k] holds the literals decidable once parameter k is bound;
    # checks[-1] (index len(names)) holds variable-free ones
    checks: list[list[Literal]] = [[] for _ in range(len(names) + 1)]
    for lit in schema.precondition:
        if not (lit.is_equality or (prune and lit.predicate in static_preds)):
            continue
        positions = [names.index(a) for a in lit.args if is_variable(a)]
        checks[max(positions) if positions else len(names)].append(lit)

    binding: dict[str, str] = {}
    lists = [candidates[t] for _, t in schema.params]

    def holds(lit: Literal) -> bool:
        g = lit.substitute(binding)
        if g.is_equality:
            return (g.args[0] == g.args[1]) == g.positive
        return (g.atom in static_true) == g.positive

    def rec(k: int):
        if k == len(names):
            yield dict(binding)
            return
        for obj in lists[k]:
            binding[names[k]] = obj
            if all(holds(lit) for lit in checks[k]):
                yield from rec(k + 1)
        binding.pop(names[k], None)

    if all(holds(lit) for lit in checks[len(names)]):
        yield from rec(0)


def ground(domain: Domain, problem: Problem, prune: bool = True) -> StripsTask:
    """Instantiate every schema over type-compatible objects.

    With ``prune`` (the default), static preconditions are checked against
    init while binding and the result is restricted to what delete-relaxed
    reachability from init can touch.
    """
    candidates = _objects_by_type(domain, problem)
    for _, typ in problem.objects:
        if typ not in candidates and not domain.has_type(typ):
            raise GroundingError(f"object type {typ} unknown to domain {domain.name}")
    static_preds = domain.static_predicates()
    static_true = {a for a in problem.init if a[0] in static_preds}

    lifted: list[tuple[str, tuple, list, list, list, list]] = []
    for schema in domain.actions:
        for b in _bindings(domain, schema, candidates, static_true, static_preds, prune):
            args = tuple(b[n] for n in schema.param_names)
            pre, neg = [], []
            for lit in schema.precondition:
                if lit.is_equality:
                    continue
                g = lit.substitute(b).atom
                if prune and g[0] in static_preds:
                    continue  # already checked true against init
                (pre if lit.positive else neg).append(g)
            adds = [Literal(a).substitute(b).atom for a in schema.add_effects]
            dels = [Literal(a).substitute(b).atom for a in schema.del_effects]
            lifted.append((schema.name, args, pre, neg, adds, dels))

    goal_atoms = [lit.atom for lit in problem.goal if not lit.is_equality]

    if prune:
        reached = set(problem.init)
        alive = [False] * len(lifted)
        changed = True
        while changed:
            changed = False
            for i, (_, _, pre, _, adds, _) in enumerate(lifted):
                if not alive[i] and all(p in reached for p in pre):
                    alive[i] = True
                    changed = True
                    reached.update(adds)
        lifted = [x for x, ok in zip(lifted, alive) if ok]
        universe = reached | {lit.atom for lit in problem.goal if lit.positive and not lit.is_equality}
    else:
        universe = set(problem.init) | set(goal_atoms)
        for _, _, pre, neg, adds, dels in lifted:
            universe.update(pre, neg, adds, dels)

    atoms = tuple(sorted(universe))
    index = {a: i for i, a in enumerate(atoms)}
    actions = []
    for name, args, pre, neg, adds, dels in lifted:
        actions.append(make_action(
            name, args,
            [index[a] for a in pre],
            [index[a] for a in neg if a in index],
            [index[a] for a in adds],
            [index[a] for a in dels if a in index],
        ))

    goal: list[tuple[int, bool]] = []
    for lit in problem.goal:
        if lit.is_equality:
            if (lit.args[0] == lit.args[1]) != lit.positive:
                goal.append((-1, True))
            continue
        if lit.atom in index:
            goal.append((index[lit.atom], lit.positive))
        elif lit.positive:
            raise GroundingError(f"goal atom {lit.atom} missing from universe")
        # a negative literal over an atom outside the universe always holds
    if any(i < 0 for i, _ in goal):
        # false equality in the goal: point it at an atom nothing can add
        atoms = atoms + (FALSE_ATOM,)
        goal = [(len(atoms) - 1 if i < 0 else i, p) for i, p in goal]
    return StripsTask(atoms, tuple(actions), frozenset(index[a] for a in problem.init if a in index),
                      tuple(goal), problem.objects)
