"""Text household simulator: action catalogs, implicit rules, task suites."""

from .catalog import ParsedAction, action_catalog, parse_action_text, render
from .env import ActionResult, HouseholdEnv
from .tasks import ConfigError, Suite, TaskSpec, UnknownTask, load_domain, load_suite

__all__ = [
    "ActionResult", "ConfigError", "HouseholdEnv", "ParsedAction", "Suite", "TaskSpec", "UnknownTask",
    "action_catalog", "load_domain", "load_suite", "parse_action_text", "render",
]
