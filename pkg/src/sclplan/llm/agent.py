"""Goal generation and ReAct next-action prediction over a completion client."""

from __future__ import annotations

import re

from ..pddl import Domain, Goal, GoalParseError, parse_goal
from ..sim.catalog import ParsedAction, action_catalog, parse_action_text
from ..world import SceneGraph
from . import prompts
from .client import ZERO, ChatTurn, CompletionUsage


class GoalUnavailable(Exception):
    pass


class ActionParseError(Exception):
    def __init__(self, message: str, raw_text: str):
        super().__init__(message)
        self.raw_text = raw_text


_ACTION_LINE = re.compile(r"^\s*action\s*:\s*(.*)$", re.I | re.M)


def extract_action(action_set: str, response: str) -> ParsedAction:
    """Pull the command out of a ``Thought: ... Action: ...`` reply."""
    found = _ACTION_LINE.findall(response)
    candidate = found[-1] if found else (response.strip().splitlines() or [""])[-1]
    parsed = parse_action_text(action_set, candidate)
    if parsed is None:
        raise ActionParseError(f"'{candidate.strip()}' is not one of the available actions", candidate.strip())
    return ParsedAction(parsed.name, parsed.arguments, response, parsed.is_finish)


class LLMPlanner:
    """Conversation state for one episode.

    Usage accumulates in ``pending`` until the controller collects it with
    ``take_usage`` and attributes it to a step.
    """

    def __init__(self, client, action_set: str, task_id: str = "task", retries: int = 2):
        self.client = client
        self.action_set = action_set
        self.catalog = action_catalog(action_set)
        self.task_id = task_id
        self.retries = retries
        self.calls = 0
        self.phase_calls: dict[str, int] = {}
        self.total = ZERO
        self.pending = ZERO

    def _complete(self, phase: str, turns: list[ChatTurn]) -> str:
        idx = self.phase_calls.get(phase, 0)
        self.phase_calls[phase] = idx + 1
        self.calls += 1
        text, usage = self.client.complete(turns, f"{self.task_id}:{phase}:{idx}")
        self.total += usage
        self.pending += usage
        return text

    def take_usage(self) -> CompletionUsage:
        u, self.pending = self.pending, ZERO
        return u

    def generate_goal(self, task_nl: str, domain: Domain, objects, known=None) -> Goal:
        """Ask for a PDDL goal; ``known`` (optional) restricts which objects it may name."""
        user = prompts.GOAL_TEMPLATE.format(
            task=task_nl,
            predicates=prompts.describe_predicates(domain),
            objects=prompts.describe_objects(objects),
        )
        turns = [ChatTurn("system", prompts.GOAL_SYSTEM), ChatTurn("user", user)]
        error = "no reply"
        for _ in range(self.retries + 1):
            text = self._complete("goal", turns)
            try:
                return parse_goal(text, domain, known)
            except GoalParseError as err:
                error = str(err)
                turns += [ChatTurn("assistant", text or "(empty)"),
                          ChatTurn("user", prompts.GOAL_RETRY.format(error=error))]
        raise GoalUnavailable(error)

    def react_prompt(self, task_nl: str, scene: SceneGraph, history) -> list[ChatTurn]:
        user = prompts.REACT_TEMPLATE.format(
            task=task_nl,
            state=prompts.describe_scene(scene),
            actions=prompts.describe_actions(self.catalog),
            history=prompts.describe_history(history),
        )
        return [ChatTurn("system", prompts.REACT_SYSTEM), ChatTurn("user", user)]

    def react_next_action(self, task_nl: str, scene: SceneGraph, history) -> ParsedAction:
        turns = self.react_prompt(task_nl, scene, history)
        err: ActionParseError | None = None
        for _ in range(self.retries + 1):
            text = self._complete("react", turns)
            try:
                return extract_action(self.action_set, text)
            except ActionParseError as e:
                err = e
                turns += [ChatTurn("assistant", text or "(empty)"),
                          ChatTurn("user", prompts.REACT_RETRY.format(error=str(e)))]
        raise err
