"""Prompt templates.  Both are zero-shot: they carry no worked examples.

The ReAct template is shared by every controller mode, so enabling the
symbolic components never changes what the model is asked.
"""

from __future__ import annotations

from ..pddl import Domain
from ..sim.catalog import CatalogEntry
from ..world import SceneGraph

# marker a few-shot example block would start with; must never appear below
EXAMPLE_DELIMITER = "### Example"

GOAL_SYSTEM = "You translate household instructions into PDDL goal conditions."

GOAL_TEMPLATE = """Task: {task}

Predicates:
{predicates}

Objects seen so far:
{objects}

Write the goal state for this task as one PDDL conjunction of the form (and ...).
Use only the predicates above. Name object instances such as bowl-1, never classes.
You may name an instance you have not seen yet if the task needs it.
Reply with the goal only."""

GOAL_RETRY = "That goal could not be used: {error}. Reply with a corrected (and ...) goal only."

REACT_SYSTEM = """You are a household robot completing a task step by step.
At each turn reply in exactly this format:
Thought: <your reasoning>
Action: <one command from the list, with its arguments>
When the task is complete, reply with "Action: finish"."""

REACT_TEMPLATE = """Task: {task}

Current state:
{state}

Available actions:
{actions}

Planning and execution history so far:
{history}

What is the next action?"""

REACT_RETRY = "Your reply could not be used: {error}. Reply again with a Thought line and one Action line."


def describe_predicates(domain: Domain) -> str:
    return "\n".join(
        "(" + " ".join([p.name, *(f"{n} - {t}" for n, t in p.params)]) + ")" for p in domain.predicates
    )


def describe_objects(objects) -> str:
    names = sorted(objects)
    return ", ".join(names) if names else "(none)"


def describe_actions(catalog: tuple[CatalogEntry, ...]) -> str:
    lines = []
    for e in catalog:
        args = ", ".join(e.arg_names) if e.slots else "none"
        lines.append(f"- {e.template}: {e.description} Arguments: {args}.")
    return "\n".join(lines)


def describe_scene(scene: SceneGraph) -> str:
    """Natural-language rendering of the agent's belief state."""
    a = scene.agent
    lines = [f"You are at {a.location}." if a.location != "nowhere" else "You are in the middle of the room."]
    lines.append(f"You are holding {a.holding}." if a.holding else "Your hands are empty.")
    if "issitting" in a.flags:
        lines.append("You are sitting.")
    for e in scene.visible_entities():
        facts = [f for f in e.true_facts() if f not in ("isreceptacle", "pickupable")]
        where = scene.container_of(e.id)
        bits = ([f"in {where}"] if where else []) + facts
        lines.append(f"- {e.id}" + (f" ({', '.join(bits)})" if bits else ""))
    return "\n".join(lines)


def describe_history(history) -> str:
    """``history`` holds (action, observation) pairs; action None marks a planner note."""
    if not history:
        return "(nothing yet)"
    out = []
    for action, observation in history:
        out.append(f"> {action}\n{observation}" if action else f"[planner] {observation}")
    return "\n".join(out)
