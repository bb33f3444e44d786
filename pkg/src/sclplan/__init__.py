"""Hybrid LLM/symbolic task planner with a household text-world and benchmark harness."""

__version__ = "0.1.0"
