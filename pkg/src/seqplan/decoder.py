"""Turn planner replies into structured plans.

Two grammars are understood:

* numbered steps of the form ``Step n. [action] [object] to [target].``,
  where only the object and target are required to be bracketed and the
  action may be the step's leading verb;
* pipe placements such as ``pipe 2ft #1 (5, 5, 2) z axis``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import (
    AmbiguousStep,
    EmptyPlan,
    MalformedCoordinate,
    MissingTarget,
    NoSegmentsFound,
    UnknownAction,
    UnknownObject,
)
from .world import GridPoint, Vec3, normalize_label, vec3

DEFAULT_ACTIONS = frozenset({"move", "place", "pick", "put", "stack", "connect"})


@dataclass(frozen=True)
class Dictionary:
    actions: frozenset[str] = DEFAULT_ACTIONS
    objects: frozenset[str] = frozenset()

    def __post_init__(self):
        acts = frozenset(normalize_label(a) for a in self.actions)
        objs = frozenset(normalize_label(o) for o in self.objects)
        if "" in acts or "" in objs:
            raise ValueError("dictionary entries must be non-empty")
        object.__setattr__(self, "actions", acts)
        object.__setattr__(self, "objects", objs)

    @classmethod
    def with_objects(cls, objects: Iterable[str], actions: Iterable[str] = DEFAULT_ACTIONS) -> "Dictionary":
        return cls(frozenset(actions), frozenset(objects))

    def has_action(self, word: str) -> bool:
        return normalize_label(word) in self.actions

    def has_object(self, word: str) -> bool:
        return normalize_label(word) in self.objects


# -- targets ---------------------------------------------------------------

@dataclass(frozen=True)
class NamedLocation:
    label: str
    kind = "named_location"

    def render(self) -> str:
        return f"to [{self.label}]"

    def value(self):
        return self.label


@dataclass(frozen=True)
class OnTopOf:
    label: str
    kind = "on_top_of"

    def render(self) -> str:
        return f"to the top of [{self.label}]"

    def value(self):
        return self.label


@dataclass(frozen=True)
class Coordinate:
    point: Vec3
    kind = "coordinate"

    def __post_init__(self):
        object.__setattr__(self, "point", vec3(self.point))

    def render(self) -> str:
        return "to (" + ", ".join(_fmt_num(c) for c in self.point) + ")"

    def value(self):
        return list(self.point)


@dataclass(frozen=True)
class BaseLocation:
    kind = "base_location"

    def render(self) -> str:
        return "to the base location"

    def value(self):
        return None


TargetSpec = Union[NamedLocation, OnTopOf, Coordinate, BaseLocation]


def target_to_json(t: TargetSpec) -> dict:
    return {"kind": t.kind, "value": t.value()}


def target_from_json(d: dict) -> TargetSpec:
    kind, value = d["kind"], d.get("value")
    if kind == "named_location":
        return NamedLocation(value)
    if kind == "on_top_of":
        return OnTopOf(value)
    if kind == "coordinate":
        return Coordinate(value)
    if kind == "base_location":
        return BaseLocation()
    raise ValueError(f"unknown target kind {kind!r}")


def _fmt_num(c: float) -> str:
    return str(int(c)) if float(c).is_integer() else repr(float(c))


# -- plans -----------------------------------------------------------------

@dataclass(frozen=True)
class PlanStep:
    index: int
    action: str
    object: str
    target: TargetSpec
    source: str | None = None

    def render(self) -> str:
        src = f" from [{self.source}]" if self.source else ""
        return f"Step {self.index}. [{self.action}] [{self.object}]{src} {self.target.render()}."

    def to_json(self) -> dict:
        d = {
            "index": self.index,
            "action": self.action,
            "object": self.object,
            "target": target_to_json(self.target),
        }
        if self.source is not None:
            d["source"] = self.source
        return d

    @classmethod
    def from_json(cls, d: dict) -> "PlanStep":
        return cls(d["index"], d["action"], d["object"], target_from_json(d["target"]), d.get("source"))


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        prev = 0
        for s in self.steps:
            if s.index <= prev:
                raise ValueError(f"step indices must increase from 1, got {s.index} after {prev}")
            prev = s.index
        if self.steps and self.steps[0].index != 1:
            raise ValueError("plan must start at step 1")

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    @classmethod
    def from_steps(cls, steps: Iterable[PlanStep]) -> "Plan":
        """Renumber ``steps`` 1..n and wrap them."""
        out = []
        for i, s in enumerate(steps, 1):
            out.append(PlanStep(i, s.action, s.object, s.target, s.source))
        return cls(tuple(out))

    def render(self) -> str:
        return "\n".join(s.render() for s in self.steps)

    def to_json(self) -> list[dict]:
        return [s.to_json() for s in self.steps]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, data: list[dict]) -> "Plan":
        return cls(tuple(PlanStep.from_json(d) for d in data))


# -- step grammar ----------------------------------------------------------

_STEP_LINE = re.compile(
    r"^\s*(?:[A-Za-z][\w ]{0,30}:\s*)?(?:step\s+)?(\d+)\s*[.)]\s+(\S.*?)\s*$",
    re.IGNORECASE,
)
_BRACKET = re.compile(r"\[([^\[\]]+)\]")
_LEADING_WORD = re.compile(r"\s*([A-Za-z]+)")
_NUM = r"([-+]?\d+(?:\.\d+)?)\s*(?:ft)?"
_COORD = re.compile(r"\(\s*" + r"\s*,\s*".join([_NUM] * 3) + r"\s*\)", re.IGNORECASE)
_TOP_OF = re.compile(r"\btop\s+of\s+(?:the\s+)?(?:[A-Za-z]+\s+)?\[([^\]]+)\]", re.IGNORECASE)
_BASE = re.compile(r"\bbase\s+location\b", re.IGNORECASE)
_TO_NAMED = re.compile(
    r"\b(?:to|onto)\s+(?:(?:the|peg|pegs|tower|rod|position|location)\s+)*\[([^\]]+)\]",
    re.IGNORECASE,
)
_FROM_NAMED = re.compile(
    r"\bfrom\s+(?:(?:the|peg|pegs|tower|rod|position|location)\s+)*\[([^\]]+)\]",
    re.IGNORECASE,
)


def split_steps(transcript: str) -> list[str]:
    """Return the bodies of the numbered lines of ``transcript`` in order.

    A line counts as a step when it starts with ``<int>.`` (optionally
    ``Step <int>.`` or preceded by a short speaker tag such as ``Assistant:``).
    Everything else is prose and dropped.
    """
    steps = []
    for line in transcript.splitlines():
        m = _STEP_LINE.match(line)
        if m:
            steps.append(m.group(2))
    if not steps:
        raise EmptyPlan("no numbered steps found")
    return steps


def parse_step(raw: str, dictionary: Dictionary, index: int = 1) -> PlanStep:
    tokens = list(_BRACKET.finditer(raw))

    action_tokens = [t for t in tokens if dictionary.has_action(t.group(1))]
    actions = {normalize_label(t.group(1)) for t in action_tokens}
    if len(actions) > 1:
        raise AmbiguousStep(f"several actions {sorted(actions)} in {raw!r}")
    if actions:
        action = actions.pop()
    else:
        if raw.lstrip().startswith("["):
            raise UnknownAction(f"no known action in {raw!r}")
        m = _LEADING_WORD.match(raw)
        if not m or not dictionary.has_action(m.group(1)):
            verb = m.group(1) if m else raw
            raise UnknownAction(f"unknown action {verb!r} in {raw!r}")
        action = normalize_label(m.group(1))

    used = set(id(t) for t in action_tokens)
    candidates = [t for t in tokens if id(t) not in used]
    if not candidates:
        raise UnknownObject(f"no bracketed object in {raw!r}")
    moved = candidates[0]
    if not dictionary.has_object(moved.group(1)):
        raise UnknownObject(f"{moved.group(1)!r} is not a known object")
    obj = moved.group(1).strip()

    rest_offset = moved.end()
    rest = raw[rest_offset:]
    consumed = {moved.start()}

    def claim(m: re.Match) -> str:
        label = m.group(1).strip()
        if not dictionary.has_object(label):
            raise UnknownObject(f"{label!r} is not a known object")
        consumed.add(rest_offset + m.start(1) - 1)
        return label

    source = None
    m = _FROM_NAMED.search(rest)
    if m:
        source = claim(m)

    target: TargetSpec
    if m := _TOP_OF.search(rest):
        target = OnTopOf(claim(m))
    elif m := _COORD.search(rest):
        target = Coordinate(tuple(float(g) for g in m.groups()))
    elif _BASE.search(rest):
        target = BaseLocation()
    elif m := _TO_NAMED.search(rest):
        target = NamedLocation(claim(m))
    else:
        raise MissingTarget(f"no target in {raw!r}")

    for t in candidates:
        if t.start() in consumed:
            continue
        if dictionary.has_object(t.group(1)):
            raise AmbiguousStep(f"extra object {t.group(1)!r} in {raw!r}")
        raise UnknownObject(f"{t.group(1)!r} is not a known object")

    return PlanStep(index, action, obj, target, source)


def parse_plan(transcript: str, dictionary: Dictionary) -> Plan:
    raws = split_steps(transcript)
    return Plan(tuple(parse_step(r, dictionary, i) for i, r in enumerate(raws, 1)))


# -- pipe grammar ----------------------------------------------------------

@dataclass(frozen=True)
class PipeSegmentSpec:
    """One placed pipe: its length class, ordinal, far endpoint and axis letter."""

    length: int
    pipe_index: int
    head: GridPoint
    axis: str

    def render(self) -> str:
        x, y, z = self.head
        return f"pipe {self.length}ft #{self.pipe_index} ({x}, {y}, {z}) {self.axis.lower()} axis"

    def to_json(self) -> dict:
        return {"length": self.length, "pipe_index": self.pipe_index,
                "head": list(self.head), "axis": self.axis}

    @classmethod
    def from_json(cls, d: dict) -> "PipeSegmentSpec":
        return cls(int(d["length"]), int(d["pipe_index"]), tuple(d["head"]), d["axis"].upper())


PIPE_PATTERN = re.compile(
    r"pipe\s*(\d+)\s*ft\s*#\s*(\d+)\s*\(([^()]*)\)\s*([xyz])[\s-]*axis",
    re.IGNORECASE,
)
_INT = re.compile(r"[-+]?\d+")


def _parse_head(inner: str) -> GridPoint:
    parts = [p.strip() for p in inner.split(",")]
    if len(parts) != 3:
        raise MalformedCoordinate(f"expected 3 coordinates, got ({inner})")
    out = []
    for p in parts:
        p = re.sub(r"\s*ft$", "", p, flags=re.IGNORECASE)
        if not _INT.fullmatch(p):
            raise MalformedCoordinate(f"non-integer coordinate {p!r} in ({inner})")
        out.append(int(p))
    return tuple(out)  # type: ignore[return-value]


def parse_pipe_plan(transcript: str) -> list[PipeSegmentSpec]:
    specs = [
        PipeSegmentSpec(int(m.group(1)), int(m.group(2)), _parse_head(m.group(3)), m.group(4).upper())
        for m in PIPE_PATTERN.finditer(transcript)
    ]
    if not specs:
        raise NoSegmentsFound("no pipe placements found")
    return specs


def render_pipe_plan(specs: Iterable[PipeSegmentSpec]) -> str:
    return ", ".join(s.render() for s in specs)
