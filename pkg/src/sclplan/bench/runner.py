"""Run suites of episodes and persist metrics and transcripts."""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from ..controller import Budgets, EpisodeResult, Mode, run_episode
from ..llm.agent import LLMPlanner
from ..llm.backends import Backend, make_backend
from ..sim.env import HouseholdEnv
from ..sim.tasks import ConfigError, load_domain, load_suite
from .metrics import MetricsTable, aggregate

log = logging.getLogger(__name__)

DEFAULT_SAMPLE = 10


@dataclass
class SuiteRun:
    suite: str
    mode: Mode
    backend: str
    repeats: int
    seed: int
    results: list[EpisodeResult] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    def metrics(self) -> MetricsTable:
        return aggregate(self.results, self.backend)


def parse_mode(name: str) -> Mode:
    try:
        return Mode(name)
    except ValueError:
        raise ConfigError(f"unknown mode {name!r}; pick one of {', '.join(m.value for m in Mode)}") from None


def sample_tasks(task_ids: list[str], repeats: int, seed: int, sample: int | None) -> list[str]:
    """Single runs use every task; repeated runs draw ``sample`` tasks by seed."""
    if sample is None:
        sample = DEFAULT_SAMPLE if repeats > 1 else len(task_ids)
    if sample >= len(task_ids):
        return list(task_ids)
    chosen = set(random.Random(f"tasks:{seed}").sample(task_ids, sample))
    return [t for t in task_ids if t in chosen]


@lru_cache(maxsize=8)
def _backend(descriptor: str) -> Backend:
    return make_backend(descriptor)


def run_one(suite_name: str, task_id: str, mode: Mode, backend: Backend | str, repeat: int = 0,
            seed: int = 0, budgets: Budgets = Budgets()) -> EpisodeResult:
    suite = load_suite(suite_name)
    task = suite.task(task_id)
    backend = _backend(backend) if isinstance(backend, str) else backend
    env = HouseholdEnv()
    ep = backend.episode(task, env, suite.id, mode.value, repeat, seed)
    llm = LLMPlanner(ep.client, task.action_set, ep.key_id)
    result = run_episode(env, load_domain(task.action_set), llm, task, mode, budgets)
    result.repeat = repeat
    return result


def _job(args) -> tuple[EpisodeResult | None, str]:
    try:
        return run_one(*args), ""
    except Exception as err:  # reported per episode; the run keeps going
        return None, f"{args[1]} repeat {args[4]}: {type(err).__name__}: {err}"


def run_suite(suite_name: str, mode: Mode | str, backend: Backend | str, repeats: int = 1, seed: int = 0,
              jobs: int = 1, sample: int | None = None, budgets: Budgets = Budgets()) -> SuiteRun:
    if repeats < 1:
        raise ConfigError("repeats must be at least 1")
    mode = parse_mode(mode) if isinstance(mode, str) else mode
    suite = load_suite(suite_name)
    descriptor = backend if isinstance(backend, str) else backend.descriptor
    if isinstance(backend, str):
        _backend(backend)  # fail fast on a bad descriptor
    ids = sample_tasks([t.id for t in suite.tasks], repeats, seed, sample)
    work = [(suite_name, tid, mode, backend, rep, seed, budgets) for tid in ids for rep in range(repeats)]
    run = SuiteRun(suite.id, mode, descriptor, repeats, seed)
    if jobs > 1 and isinstance(backend, str):
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_job, work))
    else:
        outcomes = [_job(w) for w in work]
    for result, error in outcomes:
        if result is not None:
            run.results.append(result)
        else:
            log.error("episode failed: %s", error)
            run.errors.append(error)
    return run


def write_run(runs: list[SuiteRun], out: str | Path) -> MetricsTable:
    """Write metrics.csv, metrics.txt and one transcript per episode."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    results = [r for run in runs for r in run.results]
    table = aggregate(results, runs[0].backend if runs else "")
    (out / "metrics.csv").write_text(table.to_csv())
    (out / "metrics.txt").write_text(table.to_text())
    for run in runs:
        tdir = out / "transcripts" / run.mode.value
        tdir.mkdir(parents=True, exist_ok=True)
        for r in run.results:
            (tdir / f"{r.task_id}-r{r.repeat}.jsonl").write_text(r.transcript())
    return table
