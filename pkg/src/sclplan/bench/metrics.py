"""Aggregate episode results into the ablation tables."""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from ..controller import EpisodeResult, Mode
from ..sim.tasks import ConfigError

METHOD_NAMES = {
    Mode.REACT: "ReAct",
    Mode.REACT_PV: "ReAct + PV",
    Mode.SCLPLAN: "SCLPlan",
    Mode.SYMBOLIC: "Symbolic Planner Only",
}
NA = "N/A"

COLUMNS = (
    "Method", "Backend", "Episodes", "Task Success", "Task Success SD", "Token Count", "Token Count SD",
    "Env Steps", "Env Steps SD", "Invalid ReAct Predictions", "Invalid ReAct Predictions Corrected w/ PV",
    "Global Symbolic Plan Found", "Percentage ReAct Actions", "Percentage PV Actions",
    "Percentage GSP Actions",
)


@dataclass(frozen=True)
class MetricsRow:
    method: str
    backend: str
    episodes: int
    success: float
    success_sd: float
    tokens: float
    tokens_sd: float
    steps: float
    steps_sd: float
    invalid_rate: Fraction | None
    corrected_rate: Fraction | None
    global_plan_rate: Fraction | None
    react_share: Fraction | None
    pv_share: Fraction | None
    gsp_share: Fraction | None

    def cells(self) -> list[str]:
        def f(x, digits=3):
            return NA if x is None else f"{float(x):.{digits}f}"

        return [
            self.method, self.backend, str(self.episodes),
            f(self.success), f(self.success_sd), f(self.tokens, 1), f(self.tokens_sd, 1),
            f(self.steps, 2), f(self.steps_sd, 2), f(self.invalid_rate), f(self.corrected_rate),
            f(self.global_plan_rate), f(self.react_share), f(self.pv_share), f(self.gsp_share),
        ]


@dataclass(frozen=True)
class MetricsTable:
    rows: tuple[MetricsRow, ...]

    def row(self, method: str) -> MetricsRow:
        for r in self.rows:
            if r.method == method:
                return r
        raise KeyError(method)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow(r.cells())
        return buf.getvalue()

    def to_text(self) -> str:
        grid = [list(COLUMNS)] + [r.cells() for r in self.rows]
        # transpose: one metric per line, one method per column
        width0 = max(len(c) for c in COLUMNS)
        widths = [max(len(grid[i][j]) for i in range(1, len(grid))) if len(grid) > 1 else 0
                  for j in range(len(COLUMNS))]
        colw = max([len(r.method) for r in self.rows] + widths[1:] + [8])
        lines = []
        for j, name in enumerate(COLUMNS):
            vals = [grid[i][j] for i in range(1, len(grid))]
            lines.append(name.ljust(width0) + "  " + "  ".join(v.rjust(colw) for v in vals))
        return "\n".join(lines) + "\n"


def pstdev(values) -> float:
    """Population standard deviation."""
    values = list(values)
    if len(values) < 2:
        return 0.0
    mu = math.fsum(values) / len(values)
    return math.sqrt(math.fsum((v - mu) ** 2 for v in values) / len(values))


def _spread(results: list[EpisodeResult], metric) -> tuple[float, float]:
    """Mean over episodes, and the per-task population SD averaged over tasks."""
    by_task: dict[str, list[float]] = defaultdict(list)
    for r in results:
        by_task[r.task_id].append(float(metric(r)))
    mean = math.fsum(float(metric(r)) for r in results) / len(results)
    sd = math.fsum(pstdev(v) for v in by_task.values()) / len(by_task)
    return mean, sd


def _ratio(num: int, den: int) -> Fraction | None:
    return Fraction(num, den) if den else None


def aggregate_mode(results: list[EpisodeResult], backend: str = "") -> MetricsRow:
    mode = results[0].mode
    success, success_sd = _spread(results, lambda r: 1.0 if r.success else 0.0)
    tokens, tokens_sd = _spread(results, lambda r: r.total_tokens)
    steps, steps_sd = _spread(results, lambda r: r.env_steps)
    counts = defaultdict(int)
    for r in results:
        for k, v in r.provenance_counts().items():
            counts[k] += v
    total = sum(counts.values())
    invalid = sum(r.invalid_react_count for r in results)
    predictions = sum(r.react_predictions for r in results)
    corrected = sum(r.invalid_corrected_count for r in results)
    return MetricsRow(
        METHOD_NAMES[mode], backend, len(results), success, success_sd, tokens, tokens_sd, steps, steps_sd,
        _ratio(invalid, predictions) if mode.uses_react else None,
        _ratio(corrected, invalid) if mode.uses_pv else None,
        _ratio(sum(r.goal_found_globally for r in results), len(results)) if mode.uses_goal else None,
        _ratio(counts["ReAct"], total), _ratio(counts["PV"], total), _ratio(counts["GSP"], total),
    )


def aggregate(results: list[EpisodeResult], backend: str = "") -> MetricsTable:
    if not results:
        raise ConfigError("no episode results to aggregate")
    by_mode: dict[Mode, list[EpisodeResult]] = defaultdict(list)
    for r in results:
        by_mode[r.mode].append(r)
    return MetricsTable(tuple(aggregate_mode(by_mode[m], backend) for m in Mode if m in by_mode))


# -- delta report -------------------------------------------------------------


def read_csv(text: str) -> list[dict[str, str]]:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ConfigError("metrics CSV has no rows")
    return rows


def _num(cell: str) -> float | None:
    try:
        return float(cell)
    except (TypeError, ValueError):
        return None


def _delta(a: str, b: str, fmt) -> str:
    x, y = _num(a), _num(b)
    return "-" if x is None or y is None else fmt(y - x)


def delta_report(baseline_csv: str, candidate_csv: str) -> str:
    """Signed candidate-minus-baseline deltas in the layout of the summary table."""
    base, cand = read_csv(baseline_csv), read_csv(candidate_csv)
    base_by = {r["Method"]: r for r in base}
    pairs = []
    for r in cand:
        b = base_by.get(r["Method"])
        if b is None or len(base) == 1:
            b = base[0]
        pairs.append((b, r))
    header = ("Method", "Task Success", "Token Count", "Env Steps")
    lines = [header]
    for b, r in pairs:
        label = r["Method"] if r["Method"] == b["Method"] else f"{r['Method']} vs {b['Method']}"
        lines.append((
            label,
            _delta(b["Task Success"], r["Task Success"], lambda d: f"{d:+.3f}"),
            _delta(b["Token Count"], r["Token Count"], lambda d: f"{d / 1000:+.1f}k"),
            _delta(b["Env Steps"], r["Env Steps"], lambda d: f"{d:+.1f}"),
        ))
    widths = [max(len(row[i]) for row in lines) for i in range(len(header))]
    out = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in lines]
    backends = {r.get("Backend", "") for r in base + cand}
    if len(backends) > 1:
        out.append("note: rows come from different backends; token counts use different "
                   "tokenizers or the whitespace proxy and are not comparable.")
    return "\n".join(out) + "\n"
