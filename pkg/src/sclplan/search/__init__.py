"""Symbolic planner: BFS(f) with a breadth-first oracle."""

from .bfsf import (
    Budget,
    OracleBudgetExceeded,
    SearchConfig,
    SolveOutcome,
    Solved,
    Unsolvable,
    goal_count,
    relaxed_reachable,
    solve,
    solve_oracle,
)

__all__ = [
    "Budget", "OracleBudgetExceeded", "SearchConfig", "SolveOutcome", "Solved", "Unsolvable",
    "goal_count", "relaxed_reachable", "solve", "solve_oracle",
]
