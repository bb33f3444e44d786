"""Typed STRIPS PDDL: parsing, grounding, plan validation, serialization."""

from .errors import GoalParseError, GroundingError, ParseError, PDDLError, SemanticError
from .grounding import GroundAction, Plan, PlanTrace, StripsTask, ground, validate_plan
from .model import ActionSchema, Atom, Domain, Goal, Literal, PredicateSchema, Problem
from .parser import parse_domain, parse_goal, parse_problem
from .writer import format_atom, serialize_domain, serialize_goal, serialize_problem

__all__ = [
    "ActionSchema", "Atom", "Domain", "GoalParseError", "Goal", "GroundAction", "GroundingError",
    "Literal", "ParseError", "PDDLError", "Plan", "PlanTrace", "PredicateSchema", "Problem",
    "SemanticError", "StripsTask", "format_atom", "ground", "parse_domain", "parse_goal",
    "parse_problem", "serialize_domain", "serialize_goal", "serialize_problem", "validate_plan",
]
