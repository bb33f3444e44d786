"""The hybrid planning loop and its ablation modes.

Each iteration: (1) make sure a symbolic goal exists, (2) plan globally and
execute, (3) on any failure ask the language model for one action, and
(4) verify that action's preconditions by planning to them, repairing the
state first when needed.  Success is always judged by the simulator.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Union

from .llm.agent import ActionParseError, GoalUnavailable, LLMPlanner
from .llm.client import ZERO, CompletionUsage, ScriptExhausted
from .pddl import Domain, Goal, Plan, SemanticError, ground
from .search import SearchConfig, Solved, solve
from .sim.catalog import BindingError, ParsedAction, ground_to_parsed, instantiate, render
from .sim.env import HouseholdEnv
from .sim.tasks import TaskSpec
from .world import Observation, SceneGraph, UnknownGoalObject, merge_observation, pddl_type, scene_atoms, to_problem


class Mode(enum.Enum):
    REACT = "react"
    REACT_PV = "react-pv"
    SCLPLAN = "sclplan"
    SYMBOLIC = "symbolic"

    @property
    def uses_goal(self) -> bool:
        return self in (Mode.SCLPLAN, Mode.SYMBOLIC)

    @property
    def uses_react(self) -> bool:
        return self is not Mode.SYMBOLIC

    @property
    def uses_pv(self) -> bool:
        return self in (Mode.REACT_PV, Mode.SCLPLAN)


class Provenance(str, enum.Enum):
    REACT = "ReAct"
    PV = "PV"
    GSP = "GSP"


@dataclass(frozen=True)
class StepRecord:
    action: str
    provenance: Provenance
    observation: str
    success: bool
    usage: CompletionUsage = ZERO
    valid_on_arrival: bool | None = None
    phase: str = ""

    def to_json(self, index: int) -> dict:
        return {
            "t": index,
            "phase": self.phase,
            "provenance": self.provenance.value,
            "action": self.action,
            "observation": self.observation,
            "success": self.success,
            "tokens": self.usage.total,
        }


@dataclass
class EpisodeResult:
    task_id: str
    mode: Mode
    success: bool = False
    records: list[StepRecord] = field(default_factory=list)
    total_tokens: int = 0
    goal_found_globally: bool = False
    react_predictions: int = 0
    invalid_react_count: int = 0
    invalid_corrected_count: int = 0
    llm_calls: int = 0
    termination: str = ""
    repeat: int = 0

    @property
    def env_steps(self) -> int:
        return len(self.records)

    def provenance_counts(self) -> dict[str, int]:
        counts = {p.value: 0 for p in Provenance}
        for r in self.records:
            counts[r.provenance.value] += 1
        return counts

    def transcript(self) -> str:
        return "".join(json.dumps(r.to_json(i), sort_keys=True) + "\n" for i, r in enumerate(self.records))


@dataclass(frozen=True)
class Budgets:
    max_steps: int | None = None  # None: the task's own limit
    max_llm_calls: int = 60
    max_goal_rounds: int = 3
    search: SearchConfig = SearchConfig()
    regenerate_goal: str = "on-failure"  # or "every-iteration"


# -- precondition verification ---------------------------------------------


@dataclass(frozen=True)
class Valid:
    pass


@dataclass(frozen=True)
class Repair:
    plan: Plan


@dataclass(frozen=True)
class Unsatisfiable:
    reason: str


Verdict = Union[Valid, Repair, Unsatisfiable]


def known_types(scene: SceneGraph, domain: Domain) -> dict[str, str]:
    return {e: pddl_type(scene.entities[e], domain) for e in scene.discovered if e in scene.entities}


def subgoal(action: ParsedAction, scene: SceneGraph, domain: Domain, action_set: str) -> Goal:
    """The action's preconditions under its bindings; raises BindingError."""
    _, pre = instantiate(action_set, domain, action, scene_atoms(scene), known_types(scene, domain))
    return tuple(pre)


def precondition_verify(action: ParsedAction, scene: SceneGraph, domain: Domain, action_set: str,
                        config: SearchConfig = SearchConfig()) -> Verdict:
    """Plan from the belief state to the action's preconditions.

    Cost 0 means the action is executable now; a longer plan is a repair.
    """
    if action.is_finish:
        return Valid()
    try:
        pre = subgoal(action, scene, domain, action_set)
    except BindingError as err:
        return Unsatisfiable(str(err))
    for lit in pre:
        if lit.is_equality and (lit.args[0] == lit.args[1]) != lit.positive:
            return Unsatisfiable(f"{lit} can never hold")
    goal = tuple(lit for lit in pre if not lit.is_equality)
    try:
        task = ground(domain, to_problem(scene, domain, goal))
    except (UnknownGoalObject, SemanticError) as err:
        return Unsatisfiable(str(err))
    outcome = solve(task, config)
    if not isinstance(outcome, Solved):
        return Unsatisfiable("its preconditions cannot be reached from the known state")
    return Valid() if outcome.cost == 0 else Repair(outcome.plan)


# -- execution helpers -------------------------------------------------------


class _Episode:
    def __init__(self, env: HouseholdEnv, domain: Domain, llm: LLMPlanner | None, task: TaskSpec,
                 mode: Mode, budgets: Budgets, scene: SceneGraph):
        self.env, self.domain, self.llm, self.task, self.mode = env, domain, llm, task, mode
        self.budgets = budgets
        self.scene = scene
        self.history: list[tuple[str | None, str]] = []
        self.result = EpisodeResult(task.id, mode)
        self.max_steps = budgets.max_steps or task.max_steps

    @property
    def out_of_steps(self) -> bool:
        return len(self.result.records) >= self.max_steps

    def execute(self, text: str, provenance: Provenance, phase: str, usage=ZERO,
                valid_on_arrival=None) -> Observation:
        res = self.env.step(text)
        obs = res.observation
        if valid_on_arrival == "observed":
            # without verification the simulator's verdict is the only judge
            valid_on_arrival = obs.success
        self.scene = merge_observation(self.scene, obs)
        self.result.records.append(StepRecord(text, provenance, obs.text, obs.success, usage,
                                              valid_on_arrival, phase))
        self.history.append((text, obs.text))
        return obs

    def note(self, text: str) -> None:
        self.history.append((None, text))

    def usage(self) -> CompletionUsage:
        return self.llm.take_usage() if self.llm is not None else ZERO

    def llm_exhausted(self) -> bool:
        return self.llm is None or self.llm.calls >= self.budgets.max_llm_calls


def execute_repair(ep: _Episode, repair: Plan, then: ParsedAction, usage: CompletionUsage) -> bool:
    """Run the repair plan (PV) then the original action (ReAct).

    Returns whether the original action was executed successfully.
    """
    set_ = ep.task.action_set
    for act in repair:
        if ep.out_of_steps:
            return False
        obs = ep.execute(render(set_, ground_to_parsed(act, ep.domain, set_)), Provenance.PV, "pv")
        if not obs.success:
            ep.note(f"repairing the state for {render(set_, then)} failed: {obs.text}")
            return False
    if ep.out_of_steps:
        return False
    obs = ep.execute(render(set_, then), Provenance.REACT, "react", usage, False)
    return obs.success


def _global_plan(ep: _Episode, goal: Goal):
    try:
        task = ground(ep.domain, to_problem(ep.scene, ep.domain, goal))
    except (UnknownGoalObject, SemanticError):
        return None
    outcome = solve(task, ep.budgets.search)
    return outcome.plan if isinstance(outcome, Solved) else None


def run_episode(env: HouseholdEnv, domain: Domain, llm: LLMPlanner | None, task: TaskSpec, mode: Mode,
                budgets: Budgets = Budgets(), seed: int = 0, scene: SceneGraph | None = None) -> EpisodeResult:
    """Run one task to completion or budget; never raises on agent failure."""
    obs0 = env.reset(task, seed)
    ep = _Episode(env, domain, llm, task, mode, budgets, merge_observation(scene or SceneGraph(), obs0))
    try:
        ep.result.termination = _loop(ep)
    except ScriptExhausted:
        ep.result.termination = "script-exhausted"
    r = ep.result
    r.success = env.check_goal()
    if llm is not None:
        r.total_tokens = llm.total.total
        r.llm_calls = llm.calls
    return r


def _loop(ep: _Episode) -> str:
    mode, task, domain, set_ = ep.mode, ep.task, ep.domain, ep.task.action_set
    goal: Goal | None = None
    stale = True
    goal_rounds = 0
    while True:
        if ep.env.check_goal():
            return "goal"
        if ep.out_of_steps:
            return "max-steps"

        # phase 1: symbolic goal
        if mode.uses_goal and (stale or ep.budgets.regenerate_goal == "every-iteration"):
            limit = 1 if mode is Mode.SYMBOLIC else ep.budgets.max_goal_rounds
            if goal_rounds < limit and not ep.llm_exhausted():
                goal_rounds += 1
                try:
                    goal = ep.llm.generate_goal(task.nl_goal, domain, sorted(ep.scene.discovered))
                except GoalUnavailable as err:
                    goal = None
                    ep.note(f"no usable goal: {err}")
            stale = False

        # phase 2: global symbolic plan
        if mode.uses_goal and goal is not None:
            plan = _global_plan(ep, goal)
            if plan is not None and len(plan) > 0:
                ep.result.goal_found_globally = True
                failed = False
                for act in plan:
                    if ep.out_of_steps:
                        return "max-steps"
                    obs = ep.execute(render(set_, ground_to_parsed(act, domain, set_)), Provenance.GSP, "gsp")
                    if not obs.success:
                        ep.note(f"the symbolic plan failed: {obs.text}")
                        failed = True
                        break
                if ep.env.check_goal():
                    return "goal"
                stale = True  # plan failed or its goal did not satisfy the task
                if not failed and mode is Mode.SYMBOLIC:
                    continue
            elif plan is not None:
                stale = True  # believed satisfied, yet the task is not done
        if mode is Mode.SYMBOLIC:
            # nothing else can change the state: the symbolic arm idles out
            return "no-plan"

        # phase 3: language-model action
        if ep.out_of_steps:
            return "max-steps"
        if ep.llm_exhausted():
            return "llm-budget"
        ep.result.react_predictions += 1
        try:
            action = ep.llm.react_next_action(task.nl_goal, ep.scene, ep.history)
        except ActionParseError as err:
            ep.result.invalid_react_count += 1
            ep.execute(err.raw_text or "(no action)", Provenance.REACT, "react", ep.usage(), False)
            continue
        if action.is_finish:
            ep.result.react_predictions -= 1  # a finish is not an action prediction
            ep.usage()
            return "finish"
        usage = ep.usage()
        text = render(set_, action)

        # phase 4: precondition verification
        if not mode.uses_pv:
            obs = ep.execute(text, Provenance.REACT, "react", usage, "observed")
            if not obs.success:
                ep.result.invalid_react_count += 1
            continue
        verdict = precondition_verify(action, ep.scene, domain, set_, ep.budgets.search)
        if isinstance(verdict, Valid):
            ep.execute(text, Provenance.REACT, "react", usage, True)
        elif isinstance(verdict, Repair):
            ep.result.invalid_react_count += 1
            if execute_repair(ep, verdict.plan, action, usage):
                ep.result.invalid_corrected_count += 1
        else:
            ep.result.invalid_react_count += 1
            ep.note(f"{text} cannot be carried out: {verdict.reason}")
