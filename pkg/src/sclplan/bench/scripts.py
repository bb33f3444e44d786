"""Record the shipped replay scripts from the emulated backbones.

Each (profile, suite, mode) gets one JSONL file of {"key", "response"}
records. Episodes run in parallel but records are written in suite order,
so regenerating the scripts is byte-reproducible.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..controller import Budgets, Mode, run_episode
from ..llm.agent import LLMPlanner
from ..llm.backends import SyntheticBackend
from ..llm.client import RecordingClient
from ..sim.env import HouseholdEnv
from ..sim.tasks import data_path, load_domain, load_suite

PROFILES = ("perfect", "strong", "medium", "weak")
SUITES = ("simple", "complex", "robot")
STOCHASTIC_PROFILE = "weak"
STOCHASTIC_SUITE = "simple"
STOCHASTIC_MODES = (Mode.REACT, Mode.REACT_PV, Mode.SCLPLAN)
STOCHASTIC_VARIANTS = 10


def default_dir() -> Path:
    return data_path("scripts")


def record_episode(suite_name: str, task_id: str, mode: Mode, profile: str, seed: int = 0,
                   variants: int = 0, repeat: int = 0) -> list[tuple[str, str]]:
    suite = load_suite(suite_name)
    task = suite.task(task_id)
    env = HouseholdEnv()
    ep = SyntheticBackend(profile, seed, variants).episode(task, env, suite.id, mode.value, repeat, seed)
    recorder = RecordingClient(ep.client, None)
    llm = LLMPlanner(recorder, task.action_set, ep.key_id)
    run_episode(env, load_domain(task.action_set), llm, task, mode, Budgets())
    return [(e.key, e.response) for e in recorder.records]


def _record(args) -> list[tuple[str, str]]:
    return record_episode(*args)


def write_script(path: Path, records) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for key, response in records:
            fh.write(json.dumps({"key": key, "response": response}) + "\n")


def make_scripts(out: str | Path | None = None, profiles=PROFILES, suites=SUITES, jobs: int = 1,
                 stochastic: bool = True, seed: int = 0) -> list[Path]:
    """Record every (profile, suite, mode) script plus the sampled variants."""
    out = Path(out) if out is not None else default_dir()
    plans = []
    for profile in profiles:
        for suite in suites:
            ids = [t.id for t in load_suite(suite).tasks]
            for mode in Mode:
                work = [(suite, tid, mode, profile, seed) for tid in ids]
                plans.append((out / profile / f"{suite}-{mode.value}.jsonl", work))
    if stochastic:
        ids = [t.id for t in load_suite(STOCHASTIC_SUITE).tasks]
        for mode in STOCHASTIC_MODES:
            work = [(STOCHASTIC_SUITE, tid, mode, STOCHASTIC_PROFILE, seed, STOCHASTIC_VARIANTS, v)
                    for tid in ids for v in range(STOCHASTIC_VARIANTS)]
            plans.append((out / f"{STOCHASTIC_PROFILE}-sampled" / f"{STOCHASTIC_SUITE}-{mode.value}.jsonl", work))
    written = []
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for path, work in plans:
            chunks = list(pool.map(_record, work)) if pool else [_record(w) for w in work]
            write_script(path, [rec for chunk in chunks for rec in chunk])
            written.append(path)
    finally:
        if pool:
            pool.shutdown()
    return written
