import re
from pathlib import Path

import pytest

from sclplan.pddl import ground, parse_domain, parse_problem
from sclplan.sim.tasks import data_path

PROBLEMS = sorted(data_path("problems").glob("*.pddl"))


def domain_text(name: str) -> str:
    return data_path("domains", f"{name}.pddl").read_text()


def corpus_task(path: Path, prune: bool = True):
    text = path.read_text()
    name = re.search(r"\(:domain\s+([^\s)]+)", text).group(1)
    domain = parse_domain(domain_text(name))
    return ground(domain, parse_problem(text, domain), prune=prune)


@pytest.fixture(scope="session")
def alfworld():
    return parse_domain(domain_text("alfworld"))


@pytest.fixture(scope="session")
def thor():
    return parse_domain(domain_text("thor"))


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    outcomes = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            m = re.search(r"test_acceptance\.py::test_criterion_(\d+)$", getattr(report, "nodeid", ""))
            if m and report.when == "call" or m and status == "error":
                outcomes[int(m.group(1))] = "PASS" if status == "passed" else "FAIL"
    if not outcomes:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for n, desc in sorted(CRITERIA.items()):
        terminalreporter.write_line(f"criterion {n}: {outcomes.get(n, 'NOT RUN')}  {desc}")
