"""Classify plans and pipe layouts as optimal successes, sub-optimal successes or failures."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

from .decoder import NamedLocation, PipeSegmentSpec, Plan
from .errors import MatchError, NotAxisParallel, Unreachable, ZeroDisplacement
from .matcher import match_objects
from .planners import HanoiState, PipeLayout, PipeTaskSpec, disk_labels, footprint, route_pipes
from .world import GridPoint, Scene, axis_of, in_room, normalize_label, segment_contains_point, Segment, sub


class Outcome(str, Enum):
    SUCCESS_OPTIMAL = "SuccessOptimal"
    SUCCESS_SUBOPTIMAL = "SuccessSubOptimal"
    FAIL = "Fail"


REASON_CODES = (
    "GapBetweenSegments", "NotAxisParallel", "DisallowedLength", "ObstacleHit",
    "MandatoryMissed", "MandatoryOutOfOrder", "WrongStart", "WrongEnd",
    "WrongStartAxis", "WrongEndAxis", "OutOfRoom", "LargerOnSmaller",
    "MoveFromWrongPeg", "UnstableStack", "IncompleteTower", "AxisMismatch",
    "UnknownPeg", "NoMatch", "DecodeError", "ExecutionError",
)


@dataclass(frozen=True)
class Reason:
    code: str
    detail: str = ""

    def __post_init__(self):
        if self.code not in REASON_CODES:
            raise ValueError(f"unknown reason code {self.code!r}")

    def to_json(self) -> dict:
        return {"code": self.code, "detail": self.detail}


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    reasons: tuple[Reason, ...] = ()
    metrics: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "reasons", tuple(self.reasons))
        if self.outcome is Outcome.FAIL and not self.reasons:
            raise ValueError("a failing verdict needs at least one reason")
        if self.outcome is not Outcome.FAIL and self.reasons:
            raise ValueError("a successful verdict carries no reasons")

    @property
    def success(self) -> bool:
        return self.outcome is not Outcome.FAIL

    @property
    def codes(self) -> list[str]:
        return [r.code for r in self.reasons]

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "reasons": [r.to_json() for r in self.reasons],
            "metrics": dict(self.metrics),
        }

    @classmethod
    def from_json(cls, d: dict) -> "Verdict":
        return cls(Outcome(d["outcome"]), tuple(Reason(r["code"], r.get("detail", "")) for r in d["reasons"]),
                   dict(d.get("metrics", {})))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def fail(*reasons: Reason, **metrics) -> Verdict:
    return Verdict(Outcome.FAIL, reasons, metrics)


def _classify(reasons: list[Reason], optimal: bool, metrics: dict) -> Verdict:
    if reasons:
        return Verdict(Outcome.FAIL, tuple(reasons), metrics)
    outcome = Outcome.SUCCESS_OPTIMAL if optimal else Outcome.SUCCESS_SUBOPTIMAL
    return Verdict(outcome, (), metrics)


# -- stacking --------------------------------------------------------------

def _fits_on(upper, lower, tol: float = 1e-9) -> bool:
    return upper.size[0] <= lower.size[0] + tol and upper.size[1] <= lower.size[1] + tol


def _support(scene: Scene, obj, tol: float = 1e-6):
    """The object directly under ``obj``, or None if it stands on the floor/marker."""
    best = None
    for o in scene.objects:
        if o.is_location or o.name == obj.name:
            continue
        if abs(o.top - obj.bottom) <= tol and o.footprint_contains(obj.position[:2]):
            best = o
    return best


def validate_stacking(plan: Plan, scene: Scene) -> Verdict:
    """Replay a stacking plan and judge the resulting tower.

    A placement is stable when the moved cube's footprint fits inside the
    footprint of the cube it lands on. If the scene marks a base, the tower
    has to stand on it. Optimal means every cube was moved exactly once.
    """
    cubes = scene.movables()
    metrics = {"step_count": len(plan), "oracle_min_length": len(cubes), "total_length": None}
    try:
        ops = match_objects(plan, scene)
    except MatchError as e:
        return fail(Reason("NoMatch", str(e)), **metrics)

    reasons: list[Reason] = []
    state = scene.copy()
    for step, op in zip(plan, ops):
        obj = state.get(op.object_name)
        riders = [o for o in state.movables()
                  if o.name != obj.name and _support(state, o) is not None and _support(state, o).name == obj.name]
        if riders:
            reasons.append(Reason("UnstableStack", f"step {step.index}: {obj.name} removed from under {riders[0].name}"))
            break
        state = state.with_position(obj.name, op.target_position)
        below = _support(state, state.get(obj.name))
        if below is not None and not _fits_on(obj, below):
            reasons.append(Reason("UnstableStack", f"step {step.index}: {obj.name} rests on smaller {below.name}"))
            break

    if not reasons:
        # one tower: a single chain of supports from the floor containing every cube
        chain = sorted(state.movables(), key=lambda o: o.position[2])
        grounded = [o for o in chain if _support(state, o) is None]
        ok = len(grounded) == 1
        for lower, upper in zip(chain, chain[1:]):
            sup = _support(state, upper)
            if sup is None or sup.name != lower.name:
                ok = False
        if not ok:
            reasons.append(Reason("IncompleteTower", f"{len(grounded)} separate stacks"))
        base = state.base_marker()
        if ok and base is not None and not chain[0].footprint_contains(base.position[:2]):
            reasons.append(Reason("IncompleteTower", f"tower stands on {chain[0].name}'s spot, not on the base"))

    return _classify(reasons, len(plan) == len(cubes), metrics)


# -- Tower of Hanoi --------------------------------------------------------

def validate_hanoi(plan: Plan, n: int, pegs: Sequence[str] = ("a", "b", "c"), source: str = "a",
                   target: str = "b", disks: Sequence[str] | None = None) -> Verdict:
    """Replay a Hanoi plan from the all-on-``source`` state.

    The replay stops at the first illegal move. A stated source peg that
    disagrees with where the disk actually is counts as MoveFromWrongPeg.
    """
    labels = list(disks) if disks is not None else disk_labels(n)
    size_of = {lab: i + 1 for i, lab in enumerate(labels)}
    size_of_ci = {normalize_label(lab): i + 1 for i, lab in enumerate(labels)}
    peg_of = {normalize_label(p): p for p in pegs}
    optimal_steps = 2 ** n - 1
    metrics = {"step_count": len(plan), "oracle_min_length": optimal_steps, "total_length": None}
    state = HanoiState.initial(n, pegs, source)
    reasons: list[Reason] = []

    for step in plan:
        disk = size_of.get(step.object) or size_of_ci.get(normalize_label(step.object))
        if disk is None:
            reasons.append(Reason("NoMatch", f"step {step.index}: unknown disk {step.object!r}"))
            break
        if not isinstance(step.target, NamedLocation) or normalize_label(step.target.label) not in peg_of:
            reasons.append(Reason("UnknownPeg", f"step {step.index}: target {step.target!r}"))
            break
        dst = peg_of[normalize_label(step.target.label)]
        actual = state.where(disk)
        if step.source is not None:
            stated = peg_of.get(normalize_label(step.source))
            if stated is None:
                reasons.append(Reason("UnknownPeg", f"step {step.index}: source {step.source!r}"))
                break
            if stated != actual:
                reasons.append(Reason("MoveFromWrongPeg",
                                      f"step {step.index}: {step.object} is on {actual}, not {stated}"))
                break
        if state.top(actual) != disk:
            reasons.append(Reason("MoveFromWrongPeg",
                                  f"step {step.index}: {step.object} is not on top of {actual}"))
            break
        top = state.top(dst)
        if top is not None and top < disk:
            reasons.append(Reason("LargerOnSmaller",
                                  f"step {step.index}: {step.object} onto {labels[top - 1]} at {dst}"))
            break
        state.pegs[actual].pop()
        state.pegs[dst].append(disk)

    if not reasons and len(state.pegs[target]) != n:
        reasons.append(Reason("IncompleteTower", f"{len(state.pegs[target])} of {n} disks on {target}"))
    return _classify(reasons, len(plan) == optimal_steps, metrics)


# -- pipe layouts ----------------------------------------------------------

LayoutInput = Union[PipeLayout, Sequence[PipeSegmentSpec]]


def layout_gaps(layout: PipeLayout, start: GridPoint | None = None) -> list[tuple[GridPoint, GridPoint]]:
    """``(previous end, next start)`` pairs wherever consecutive pipes do not meet."""
    gaps = []
    for a, b in zip(layout.pipes, layout.pipes[1:]):
        if a.end != b.start:
            gaps.append((a.end, b.start))
    return gaps


def _links(layout: LayoutInput, start: GridPoint):
    """Normalize either input form to (from, to, declared length, declared axis) tuples."""
    if isinstance(layout, PipeLayout):
        return [(p.start, p.end, p.length, p.segment.axis.letter) for p in layout.pipes], True
    links = []
    prev = start
    for s in layout:
        links.append((prev, tuple(s.head), s.length, s.axis.upper()))
        prev = tuple(s.head)
    return links, False


def validate_pipe_layout(layout: LayoutInput, spec: PipeTaskSpec, optimal_length: int | None = None) -> Verdict:
    """Check a pipe layout against a task and compare its length with the router's optimum.

    ``layout`` is either a list of parsed pipe placements (chained head to
    head from the start point) or an explicit :class:`PipeLayout` whose
    pipes carry their own start points.
    """
    links, explicit = _links(layout, spec.start)
    reasons: list[Reason] = []
    segments: list[Segment | None] = []
    total = 0

    for k, (a, b, length, letter) in enumerate(links, 1):
        total += length
        try:
            ax = axis_of(sub(b, a))
        except (NotAxisParallel, ZeroDisplacement):
            reasons.append(Reason("NotAxisParallel", f"pipe {k}: {a} -> {b}"))
            segments.append(None)
            continue
        seg = Segment(a, b)
        segments.append(seg)
        if ax.letter != letter:
            reasons.append(Reason("AxisMismatch", f"pipe {k}: declared {letter}, runs along {ax.letter}"))
        if seg.length != length or length not in spec.lengths:
            reasons.append(Reason("DisallowedLength", f"pipe {k}: declared {length}, spans {seg.length}"))
        if not (in_room(a, spec.room) and in_room(b, spec.room)):
            reasons.append(Reason("OutOfRoom", f"pipe {k}: {a} -> {b}"))

    if explicit:
        if links and links[0][0] != spec.start:
            reasons.append(Reason("WrongStart", f"starts at {links[0][0]}, expected {spec.start}"))
        for k in range(1, len(links)):
            if links[k][0] != links[k - 1][1]:
                reasons.append(Reason("GapBetweenSegments",
                                      f"pipe {k} ends at {links[k - 1][1]}, pipe {k + 1} starts at {links[k][0]}"))

    if segments and segments[0] is not None and not segments[0].axis.parallel_to(spec.start_axis):
        reasons.append(Reason("WrongStartAxis", f"first pipe along {segments[0].axis.letter}"))
    if segments and segments[-1] is not None and not segments[-1].axis.parallel_to(spec.end_axis):
        reasons.append(Reason("WrongEndAxis", f"last pipe along {segments[-1].axis.letter}"))
    final = links[-1][1] if links else spec.start
    if final != spec.end:
        reasons.append(Reason("WrongEnd", f"ends at {final}, expected {spec.end}"))

    valid = [s for s in segments if s is not None]
    for o in spec.obstacles:
        if any(segment_contains_point(s, o) for s in valid):
            reasons.append(Reason("ObstacleHit", str(tuple(o))))

    k = 0
    for s in valid:
        while k < len(spec.mandatory) and segment_contains_point(s, spec.mandatory[k]):
            k += 1
    for p in spec.mandatory[k:]:
        if any(segment_contains_point(s, p) for s in valid):
            reasons.append(Reason("MandatoryOutOfOrder", str(tuple(p))))
        else:
            reasons.append(Reason("MandatoryMissed", str(tuple(p))))

    metrics = {"total_length": total, "step_count": len(links), "oracle_min_length": optimal_length}
    if reasons:
        return Verdict(Outcome.FAIL, tuple(reasons), metrics)
    if optimal_length is None:
        try:
            _, optimal_length = route_pipes(spec)
        except Unreachable:  # pragma: no cover - a valid layout proves reachability
            optimal_length = total
        metrics["oracle_min_length"] = optimal_length
    return _classify([], total == optimal_length, metrics)
