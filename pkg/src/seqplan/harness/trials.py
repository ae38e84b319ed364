"""Batch trials: transcript -> decode -> (match + execute | pipe check) -> verdict counts."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..decoder import parse_pipe_plan, parse_plan
from ..errors import BackendUnavailable, DecodeError, ExecutionError, MatchError
from ..executor import execute_plan
from ..matcher import match_objects
from ..planners import PipeTaskSpec
from ..validators import Outcome, Reason, Verdict, fail, validate_hanoi, validate_pipe_layout, validate_stacking
from .backends import PlannerBackend
from .tasks import HanoiTask, StackingTask, Task, task_dictionary, task_id

logger = logging.getLogger(__name__)


def classify(task: Task, transcript: str, simulate: bool = False) -> Verdict:
    """Verdict for one reply transcript on ``task``."""
    if isinstance(task, PipeTaskSpec):
        try:
            specs = parse_pipe_plan(transcript)
        except DecodeError as e:
            return fail(Reason("DecodeError", str(e)), total_length=None, step_count=0, oracle_min_length=None)
        return validate_pipe_layout(specs, task)

    try:
        plan = parse_plan(transcript, task_dictionary(task))
    except DecodeError as e:
        return fail(Reason("DecodeError", str(e)), total_length=None, step_count=0, oracle_min_length=None)

    if isinstance(task, StackingTask):
        verdict = validate_stacking(plan, task.scene)
        scene = task.scene
    elif isinstance(task, HanoiTask):
        verdict = validate_hanoi(plan, task.n, task.pegs, task.source, task.target, task.disks)
        scene = task.scene
    else:
        raise TypeError(f"unsupported task {task!r}")

    if simulate and verdict.success and scene is not None:
        try:
            execute_plan(match_objects(plan, scene, task_dictionary(task)), scene)
        except (MatchError, ExecutionError) as e:
            return fail(Reason("ExecutionError", f"{type(e).__name__}: {e}"), **verdict.metrics)
    return verdict


@dataclass
class TrialReport:
    task_id: str
    backend: str
    condition: str = ""
    verdicts: list[Verdict] = field(default_factory=list)
    incomplete: bool = False
    error: str = ""

    @property
    def total(self) -> int:
        return len(self.verdicts)

    def _count(self, outcome: Outcome) -> int:
        return sum(v.outcome is outcome for v in self.verdicts)

    @property
    def success_optimal(self) -> int:
        return self._count(Outcome.SUCCESS_OPTIMAL)

    @property
    def success_suboptimal(self) -> int:
        return self._count(Outcome.SUCCESS_SUBOPTIMAL)

    @property
    def fail(self) -> int:
        return self._count(Outcome.FAIL)

    def _ratio(self, k: int) -> float:
        return k / self.total if self.total else 0.0

    @property
    def optimal_ratio(self) -> float:
        return self._ratio(self.success_optimal)

    @property
    def success_ratio(self) -> float:
        return self._ratio(self.success_optimal + self.success_suboptimal)

    @property
    def failed_ratio(self) -> float:
        return self._ratio(self.fail)

    def counts(self) -> dict:
        return {"success_optimal": self.success_optimal, "success_suboptimal": self.success_suboptimal,
                "fail": self.fail, "total": self.total}

    def ratios(self) -> dict:
        return {"optimal/total": self.optimal_ratio, "success/total": self.success_ratio,
                "failed/total": self.failed_ratio}

    def to_json(self) -> dict:
        return {
            "task": self.task_id, "backend": self.backend, "condition": self.condition,
            "counts": self.counts(), "ratios": self.ratios(),
            "incomplete": self.incomplete, "error": self.error,
            "trials": [{"trial": i, **v.to_json()} for i, v in enumerate(self.verdicts)],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def table_row(self, label: str | None = None) -> str:
        c = self.counts()
        label = label or self.condition or self.task_id
        return (f"{label:<12} {c['success_optimal']:>7} {c['success_suboptimal']:>11} "
                f"{c['fail']:>4} {c['total']:>5} {self.optimal_ratio:>13.2f} {self.success_ratio:>13.2f} "
                f"{self.failed_ratio:>12.2f}")


TABLE_HEADER = (f"{'':<12} {'Optimal':>7} {'Sub-optimal':>11} {'Fail':>4} {'Total':>5} "
                f"{'Optimal/Total':>13} {'Success/Total':>13} {'Failed/Total':>12}")


def condition_of(task: Task) -> str:
    if isinstance(task, PipeTaskSpec):
        return "constant" if len(task.lengths) == 1 else "variable"
    return ""


def run_trials(task: Task, backend: PlannerBackend, n: int, workers: int = 1,
               simulate: bool = False) -> TrialReport:
    """Run ``n`` independent trials; results are ordered by trial index.

    If the back end becomes unavailable, the report keeps the trials before
    the first failing one and is flagged incomplete.
    """
    if n < 1:
        raise ValueError("need at least one trial")
    report = TrialReport(task_id(task), backend.name, condition_of(task))

    def one(i: int) -> Verdict:
        return classify(task, backend.transcript(task, i), simulate)

    results: dict[int, Verdict] = {}
    failed_at: int | None = None
    if workers <= 1:
        for i in range(n):
            try:
                results[i] = one(i)
            except BackendUnavailable as e:
                failed_at, report.error = i, str(e)
                break
    else:
        with ThreadPoolExecutor(workers) as pool:
            futures = {i: pool.submit(one, i) for i in range(n)}
            for i in range(n):
                try:
                    results[i] = futures[i].result()
                except BackendUnavailable as e:
                    failed_at, report.error = i, str(e)
                    break
    if failed_at is not None:
        logger.warning("backend unavailable at trial %d: %s", failed_at, report.error)
        report.incomplete = True
    limit = n if failed_at is None else failed_at
    report.verdicts = [results[i] for i in range(limit)]
    return report
