"""Benchmark harness: suite runs, metrics tables, CLI."""

from .metrics import MetricsRow, MetricsTable, aggregate, delta_report
from .runner import SuiteRun, run_one, run_suite, write_run

__all__ = ["MetricsRow", "MetricsTable", "SuiteRun", "aggregate", "delta_report", "run_one", "run_suite",
           "write_run"]
