"""Language-model planner: completion clients, prompts, backends."""

from .agent import ActionParseError, GoalUnavailable, LLMPlanner
from .backends import BackendError, make_backend
from .client import ChatTurn, CompletionUsage, LiveClient, RecordingClient, ScriptedClient, TransportError

__all__ = [
    "ActionParseError", "BackendError", "ChatTurn", "CompletionUsage", "GoalUnavailable", "LLMPlanner",
    "LiveClient", "RecordingClient", "ScriptedClient", "TransportError", "make_backend",
]
