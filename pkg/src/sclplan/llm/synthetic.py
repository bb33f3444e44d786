"""Emulated language-model backbones of graded competence.

A synthetic client peeks at the simulator's ground truth to find a good
next action, then corrupts it with profile-dependent error modes that
mirror what real models get wrong: skipping a prerequisite, naming an
object that does not exist, wandering, looping on a failed action,
declaring victory early, and emitting unparsable text.  All randomness is
keyed on the seed, the task and how far the episode has progressed, so
every controller mode meets the same lapse at the same point of a task.

These clients exist to record the shipped scripts; they are not models.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from ..pddl import Literal, ground, serialize_goal
from ..search import SearchConfig, Solved, solve
from ..sim.catalog import BindingError, ParsedAction, entry_for, ground_to_parsed, instantiate, parse_action_text, render
from ..sim.env import HouseholdEnv, all_atoms, holds
from ..sim.rules import containers
from ..world import UnknownGoalObject, pddl_type, to_problem
from . import prompts
from .client import proxy_usage

FINISH = ParsedAction("finish", (), "", True)


@dataclass(frozen=True)
class Profile:
    name: str
    garbage: float = 0.0  # unparsable reply
    repeat: float = 0.0  # retry the action that just failed
    give_up: float = 0.0  # declare success right after a failure
    forget: float = 0.0  # episode-level lapse: blind to clean-up literals
    finish: float = 0.0  # declare success at a random point
    hallucinate: float = 0.0  # name an object that does not exist
    skip: float = 0.0  # jump ahead past an unmet prerequisite
    wander: float = 0.0  # walk somewhere irrelevant
    goal_garbage: float = 0.0  # goal reply without a usable expression
    goal_partial: float = 0.0  # goal drops one literal


PROFILES = {
    "perfect": Profile("perfect"),
    "strong": Profile("strong", garbage=0.01, repeat=0.1, skip=0.04, wander=0.02, goal_garbage=0.02),
    "medium": Profile("medium", garbage=0.04, repeat=0.35, give_up=0.05, forget=0.3, finish=0.01,
                      hallucinate=0.05, skip=0.15, wander=0.06, goal_garbage=0.15, goal_partial=0.1),
    "weak": Profile("weak", garbage=0.08, repeat=0.6, give_up=0.12, forget=0.6, finish=0.025,
                    hallucinate=0.1, skip=0.3, wander=0.1, goal_garbage=0.2, goal_partial=0.15),
}

_GARBAGE = (
    "Thought: I need to look around more carefully.\nAction: look around",
    "I think the best thing to do now is to explore the room.",
    "Thought: Let me check my inventory.\nAction: inventory",
)

_GOAL_GARBAGE = (
    "The goal is to complete the task as described.",
    "(and (isshiny {obj}))",
    "Goal: the object should end up where the task says.",
)


def _profile(name: str) -> Profile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown synthetic profile {name!r}") from None


class SyntheticClient:
    """Emulated backbone bound to one episode's simulator."""

    def __init__(self, env: HouseholdEnv, profile: str | Profile = "strong", seed: int | str = 0):
        self.env = env
        self.profile = profile if isinstance(profile, Profile) else _profile(profile)
        self.seed = seed
        self.last_reply: str | None = None
        self._plans: dict = {}
        self._attempts: dict[int, int] = {}

    # -- client protocol ---------------------------------------------------

    def complete(self, turns, key: str | None = None):
        if not turns:
            raise ValueError("complete() needs at least one chat turn")
        retry = len(turns) > 2
        if turns[0].content == prompts.GOAL_SYSTEM:
            text = self._goal_reply(random.Random(f"{self.profile.name}:{self.seed}:{key}"), retry)
        else:
            text = self._react_reply(self._progress_rng(), retry)
        return text, proxy_usage(turns, text)

    def _progress_rng(self) -> random.Random:
        """Draws keyed on task progress, so every mode meets the same lapse at the same point."""
        done = sum(ok for _, ok in self.env.state.log)
        attempt = self._attempts.get(done, 0)
        self._attempts[done] = attempt + 1
        return random.Random(f"{self.profile.name}:{self.seed}:{self.task.id}:{done}:{attempt}")

    # -- goal phase --------------------------------------------------------

    def _goal_reply(self, rng: random.Random, retry: bool) -> str:
        p = self.profile
        success = list(self.task.success)
        if rng.random() < p.goal_garbage * (0.5 if retry else 1.0):
            obj = next((a for lit in success for a in lit.args), "it")
            return rng.choice(_GOAL_GARBAGE).format(obj=obj)
        if len(success) > 1 and rng.random() < p.goal_partial:
            success.pop(rng.randrange(len(success)))
        return "The goal state is:\n" + serialize_goal(tuple(success))

    # -- react phase -------------------------------------------------------

    @property
    def task(self):
        return self.env.state.task

    def _react_reply(self, rng: random.Random, retry: bool) -> str:
        p = self.profile
        st = self.env.state
        failed = bool(st.log) and not st.log[-1][1]
        if rng.random() < p.garbage * (0.5 if retry else 1.0):
            return self._remember(rng.choice(_GARBAGE))
        if self.env.check_goal():
            return self._say(FINISH, "The task looks complete.")
        if failed and self.last_reply and rng.random() < p.repeat:
            return self._remember(self.last_reply)
        if failed and rng.random() < p.give_up:
            return self._say(FINISH, "I believe I am done.")
        if self._only_cleanup_left() and self._forgets():
            # blind to the clean-up: potter about until giving up
            stray = self._wander(rng) if rng.random() >= max(p.give_up, 0.05) else None
            if stray is None:
                return self._say(FINISH, "The main part of the task is done.")
            return self._say(stray, "Let me see if anything else needs doing.")
        if rng.random() < p.finish:
            return self._say(FINISH, "I think the task is complete.")
        ideal, later = self._ideal()
        if ideal.is_finish:
            return self._say(FINISH, "Nothing left to do.")
        if rng.random() < p.hallucinate:
            fake = self._hallucinate(ideal)
            if fake is not None:
                return self._say(fake, "This should be the right object.")
        if later is not None and rng.random() < p.skip:
            return self._say(later, "I can go straight to this.")
        if rng.random() < p.wander:
            stray = self._wander(rng)
            if stray is not None:
                return self._say(stray, "Let me check over there.")
        return self._say(ideal, "This is the next step toward the goal.")

    def _remember(self, text: str) -> str:
        self.last_reply = text
        return text

    def _say(self, action: ParsedAction, thought: str) -> str:
        line = "finish" if action.is_finish else render(self.task.action_set, action)
        return self._remember(f"Thought: {thought}\nAction: {line}")

    # -- ground-truth reasoning -------------------------------------------

    def _forgets(self) -> bool:
        """Drawn once per episode, so every mode sees the same lapse."""
        draw = random.Random(f"{self.profile.name}:{self.seed}:{self.task.id}:forget").random()
        return draw < self.profile.forget

    def _only_cleanup_left(self) -> bool:
        atoms = all_atoms(self.env.state.scene)
        unmet = [lit for lit in self.task.success if not holds(lit, atoms)]
        return bool(unmet) and all(not lit.positive for lit in unmet) and len(unmet) < len(self.task.success)

    def _plan(self, goal) -> list | None:
        scene = self.env.state.scene
        key = (frozenset(all_atoms(scene)), goal)
        if key not in self._plans:
            domain = self.env.domain
            try:
                gt = ground(domain, to_problem(scene, domain, goal, full=True))
            except UnknownGoalObject:
                self._plans[key] = None
            else:
                out = solve(gt, SearchConfig(node_budget=20_000, time_budget=120.0))
                self._plans[key] = list(out.plan) if isinstance(out, Solved) else None
        return self._plans[key]

    def _as_parsed(self, act) -> ParsedAction:
        return ground_to_parsed(act, self.env.domain, self.task.action_set)

    def _ideal(self) -> tuple[ParsedAction, ParsedAction | None]:
        """Best next action plus, when known, a later action that skips ahead."""
        plan = self._plan(self.task.success)
        if plan is not None:
            if not plan:
                return FINISH, None
            later = None
            for act in plan[1:4]:
                cand = self._known_or_none(self._as_parsed(act))
                if cand is not None and self._subplan(cand):
                    later = cand  # furthest prerequisite-violating step in reach
            step = self._navigate(self._as_parsed(plan[0]))
            if self._known_or_none(step) is not None or not self.task.reference:
                return step, later
            # an argument only surfaces through something the planner cannot model
        ref = self._next_reference()
        if ref is None:
            return FINISH, None
        sub = self._subplan(ref)
        if sub:
            return self._navigate(self._as_parsed(sub[0])), self._known_or_none(ref)
        return self._navigate(ref), None

    def _gt_types(self) -> dict[str, str]:
        scene = self.env.state.scene
        return {e: pddl_type(ent, self.env.domain) for e, ent in scene.entities.items()}

    def _subplan(self, action: ParsedAction) -> list | None:
        """Ground-truth plan to the preconditions of ``action``; [] when they hold."""
        try:
            _, pre = instantiate(self.task.action_set, self.env.domain, action,
                                 all_atoms(self.env.state.scene), self._gt_types())
        except BindingError:
            return None
        goal = tuple(lit for lit in pre if not lit.is_equality)
        return self._plan(goal)

    def _effects_hold(self, action: ParsedAction) -> bool:
        domain = self.env.domain
        try:
            binding, _ = instantiate(self.task.action_set, domain, action,
                                     all_atoms(self.env.state.scene), self._gt_types())
        except BindingError:
            return False
        schema = domain.action(entry_for(self.task.action_set, action.name).schema)
        atoms = all_atoms(self.env.state.scene)
        adds = [Literal(a).substitute(binding).atom for a in schema.add_effects]
        dels = [Literal(a).substitute(binding).atom for a in schema.del_effects]
        return bool(adds or dels) and all(a in atoms for a in adds) and not any(d in atoms for d in dels)

    def _next_reference(self) -> ParsedAction | None:
        set_ = self.task.action_set
        done = []
        for text, ok in self.env.state.log:
            parsed = parse_action_text(set_, text) if ok else None
            if parsed is not None and not parsed.is_finish:
                done.append(render(set_, parsed))
        refs = [parse_action_text(set_, r) for r in self.task.reference]
        i = 0
        for text in done:
            if i < len(refs) and render(set_, refs[i]) == text:
                i += 1
        while i < len(refs) and self._effects_hold(refs[i]):
            i += 1
        return refs[i] if i < len(refs) else None

    def _known_or_none(self, action: ParsedAction | None) -> ParsedAction | None:
        if action is None:
            return None
        known = self.env.state.scene.discovered
        return action if all(a in known for a in action.arguments) else None

    def _navigate(self, action: ParsedAction) -> ParsedAction:
        """Head for the innermost known container of an unseen argument."""
        scene = self.env.state.scene
        set_ = self.task.action_set
        move = "go-to" if set_ == "alfworld" else "movetoobject"
        for arg in action.arguments:
            if arg in scene.discovered or arg not in scene.entities:
                continue
            holder = next((c for c in containers(scene, arg) if c in scene.discovered), None)
            if holder is None:
                continue
            ent = scene.entities[holder]
            if not (ent.has("isopen") or ent.has("openable")):
                continue  # sealed until something outside the domain happens
            if scene.agent.location != holder:
                return ParsedAction(move, (holder,))
            if not ent.has("isopen"):
                opener = "open" if set_ == "alfworld" else "openobject"
                return ParsedAction(opener, (holder,))
        return action

    def _hallucinate(self, action: ParsedAction) -> ParsedAction | None:
        if not action.arguments:
            return None
        target = action.arguments[-1]
        m = re.match(r"^(.*?)-(\d+)$", target)
        stem = m.group(1) if m else target
        taken = {e for e in self.env.state.scene.entities if e.startswith(stem + "-")}
        n = 2
        while f"{stem}-{n}" in taken:
            n += 1
        return ParsedAction(action.name, (*action.arguments[:-1], f"{stem}-{n}"))

    def _wander(self, rng: random.Random) -> ParsedAction | None:
        scene = self.env.state.scene
        set_ = self.task.action_set
        spots = sorted(
            e for e in scene.discovered
            if e in scene.entities and e != scene.agent.location
            and scene.entities[e].has("isreceptacle") and not scene.entities[e].has("pickupable")
        )
        if not spots:
            return None
        return ParsedAction("go-to" if set_ == "alfworld" else "movetoobject", (rng.choice(spots),))
