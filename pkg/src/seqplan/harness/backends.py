"""Planner back ends: anything that turns a task into a reply transcript."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from ..decoder import NamedLocation, PipeSegmentSpec, Plan, PlanStep, render_pipe_plan
from ..errors import BackendUnavailable, LLMError
from ..planners import HanoiState, PipeLayout, PipeTaskSpec, plan_hanoi, plan_stacking, route_pipes
from ..world import AXES, Segment, in_room
from .llm import EndpointConfig, llm_complete
from .prompts import build_prompt
from .tasks import HanoiTask, StackingTask, Task


def oracle_plan(task: Task) -> Plan:
    if isinstance(task, StackingTask):
        return plan_stacking(task.scene.movables())
    if isinstance(task, HanoiTask):
        return plan_hanoi(task.n, task.source, task.target, task.aux, task.disks)
    raise TypeError(f"no step plan for {type(task).__name__}")


def oracle_layout(spec: PipeTaskSpec) -> PipeLayout:
    return route_pipes(spec)[0]


class PlannerBackend:
    name = "backend"

    def transcript(self, task: Task, trial: int) -> str:
        raise NotImplementedError


@dataclass
class OracleBackend(PlannerBackend):
    name = "oracle"

    def transcript(self, task: Task, trial: int) -> str:
        if isinstance(task, PipeTaskSpec):
            return render_pipe_plan(oracle_layout(task).to_specs())
        return oracle_plan(task).render()


@dataclass
class TranscriptCorpus(PlannerBackend):
    """Replay stored transcripts; trial ``i`` gets item ``i`` modulo the corpus size.

    ``path`` may be a text file (one transcript), a directory of ``*.txt``
    files (sorted by name) or a JSON list of strings.
    """

    path: str | Path
    items: list[str] = field(default_factory=list, init=False)
    name = "corpus"

    def __post_init__(self):
        p = Path(self.path)
        if p.is_dir():
            self.items = [f.read_text(encoding="utf-8") for f in sorted(p.glob("*.txt"))]
        elif p.suffix == ".json":
            data = json.loads(p.read_text(encoding="utf-8"))
            self.items = list(data["transcripts"] if isinstance(data, dict) else data)
        else:
            self.items = [p.read_text(encoding="utf-8")]
        if not self.items:
            raise ValueError(f"empty transcript corpus at {p}")

    def transcript(self, task: Task, trial: int) -> str:
        return self.items[trial % len(self.items)]


@dataclass
class RemoteLLM(PlannerBackend):
    config: EndpointConfig = field(default_factory=EndpointConfig)
    name = "llm"

    def transcript(self, task: Task, trial: int) -> str:
        try:
            return llm_complete(build_prompt(task), self.config)
        except LLMError as e:
            raise BackendUnavailable(str(e)) from e


# -- noisy oracle ----------------------------------------------------------

MUTATORS = ("delete", "jitter", "detour", "swap")


def _mutate_pipes(specs: list[PipeSegmentSpec], spec: PipeTaskSpec, mutator: str, rng: random.Random):
    specs = list(specs)
    if mutator == "delete":
        del specs[rng.randrange(len(specs))]
    elif mutator == "jitter":
        # move one joint by a unit step off its axis: the new point still agrees
        # with the true joint in two coordinates
        k = rng.randrange(len(specs))
        s = specs[k]
        off = [a for a in AXES if a.letter != s.axis]
        ax = off[rng.randrange(len(off))]
        head = tuple(h + u for h, u in zip(s.head, ax.unit))
        specs[k] = PipeSegmentSpec(s.length, s.pipe_index, head, s.axis)
    elif mutator == "swap":
        if len(specs) >= 2:
            k = rng.randrange(len(specs) - 1)
            specs[k], specs[k + 1] = specs[k + 1], specs[k]
        else:
            del specs[0]
    elif mutator == "detour":
        specs = _detour(specs, spec, rng)
    else:
        raise ValueError(f"unknown mutator {mutator!r}")
    return specs


def _detour(specs: list[PipeSegmentSpec], spec: PipeTaskSpec, rng: random.Random):
    """Insert an out-and-back pair of pipes at an interior joint."""
    joints = list(range(1, len(specs))) or [len(specs)]
    rng.shuffle(joints)
    length = spec.lengths[0]
    order = list(AXES)
    rng.shuffle(order)
    for k in joints:
        at = specs[k - 1].head
        for ax in order:
            out = tuple(h + u * length for h, u in zip(at, ax.unit))
            if not in_room(out, spec.room):
                continue
            seg = Segment(at, out)
            if any(seg.contains(o) for o in spec.obstacles):
                continue
            extra = [PipeSegmentSpec(length, 0, out, ax.letter), PipeSegmentSpec(length, 0, at, ax.letter)]
            return _renumber(specs[:k] + extra + specs[k:])
    return specs


def _renumber(specs: list[PipeSegmentSpec]) -> list[PipeSegmentSpec]:
    counters: dict[int, int] = {}
    out = []
    for s in specs:
        counters[s.length] = counters.get(s.length, 0) + 1
        out.append(PipeSegmentSpec(s.length, counters[s.length], s.head, s.axis))
    return out


def _mutate_steps(plan: Plan, task: Task, mutator: str, rng: random.Random) -> Plan:
    steps = list(plan.steps)
    if mutator == "delete":
        del steps[rng.randrange(len(steps))]
    elif mutator in ("swap", "jitter"):
        # step plans have no joints to nudge, so jitter falls back to a swap
        if len(steps) >= 2:
            k = rng.randrange(len(steps) - 1)
            steps[k], steps[k + 1] = steps[k + 1], steps[k]
        else:
            del steps[0]
    elif mutator == "detour":
        if isinstance(task, HanoiTask):
            # shuttle the smallest disk out and straight back
            state = HanoiState.initial(task.n, task.pegs, task.source)
            src = state.where(1)
            other = task.aux if src != task.aux else task.target
            smallest = task.disks[0]
            steps = [PlanStep(1, "move", smallest, NamedLocation(other), src),
                     PlanStep(2, "move", smallest, NamedLocation(src), other)] + steps
        else:
            k = rng.randrange(len(steps))
            steps.insert(k + 1, steps[k])
    else:
        raise ValueError(f"unknown mutator {mutator!r}")
    return Plan.from_steps(steps)


@dataclass
class NoisyOracle(PlannerBackend):
    """Oracle output corrupted with probability ``error_rate`` per trial.

    Mutators: ``delete`` drops one pipe/step, ``jitter`` moves one joint off
    its axis, ``swap`` exchanges two neighbours, ``detour`` adds a needless
    out-and-back (a sub-optimal but valid answer).
    """

    error_rate: float = 0.5
    seed: int = 0
    mutator: str = "delete"
    name = "noisy"

    def __post_init__(self):
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError("error_rate must lie in [0, 1]")
        if self.mutator not in MUTATORS:
            raise ValueError(f"mutator must be one of {MUTATORS}")

    def transcript(self, task: Task, trial: int) -> str:
        rng = random.Random(f"{self.seed}:{trial}")
        corrupt = rng.random() < self.error_rate
        if isinstance(task, PipeTaskSpec):
            specs = oracle_layout(task).to_specs()
            if corrupt:
                specs = _mutate_pipes(specs, task, self.mutator, rng)
            return render_pipe_plan(specs) if specs else "no pipes needed"
        plan = oracle_plan(task)
        if corrupt:
            plan = _mutate_steps(plan, task, self.mutator, rng)
        return plan.render() if len(plan) else "nothing to do"


def parse_backend(text: str, config: EndpointConfig | None = None) -> PlannerBackend:
    """``oracle`` | ``corpus:PATH`` | ``llm`` | ``noisy:RATE:SEED[:MUTATOR]``."""
    kind, _, rest = text.partition(":")
    if kind == "oracle":
        return OracleBackend()
    if kind == "corpus":
        return TranscriptCorpus(rest)
    if kind == "llm":
        return RemoteLLM(config or EndpointConfig())
    if kind == "noisy":
        parts = rest.split(":") if rest else []
        rate = float(parts[0]) if parts else 0.5
        seed = int(parts[1]) if len(parts) > 1 else 0
        mutator = parts[2] if len(parts) > 2 else "delete"
        return NoisyOracle(rate, seed, mutator)
    raise ValueError(f"unknown backend {text!r}")
