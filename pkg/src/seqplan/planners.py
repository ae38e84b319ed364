"""Deterministic reference planners for stacking, Tower of Hanoi and pipe routing."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from .decoder import BaseLocation, NamedLocation, OnTopOf, PipeSegmentSpec, Plan, PlanStep
from .errors import DuplicateSize, Unreachable
from .world import AXES, Axis, GridPoint, SceneObject, Segment, grid_point, in_room


# -- stacking --------------------------------------------------------------

def footprint(obj: SceneObject) -> float:
    return obj.size[0] * obj.size[1]


def plan_stacking(cubes: Sequence[SceneObject]) -> Plan:
    """Largest footprint to the base, then each next-smaller cube on the previous one."""
    ordered = sorted(cubes, key=footprint, reverse=True)
    for a, b in zip(ordered, ordered[1:]):
        if footprint(a) == footprint(b):
            raise DuplicateSize(f"{a.name!r} and {b.name!r} have the same footprint")
    steps = []
    for i, cube in enumerate(ordered):
        target = BaseLocation() if i == 0 else OnTopOf(ordered[i - 1].label)
        steps.append(PlanStep(i + 1, "move", cube.label, target))
    return Plan(tuple(steps))


# -- Tower of Hanoi --------------------------------------------------------

def disk_labels(n: int) -> list[str]:
    """Disk names smallest first: A, B, C, ..."""
    if n <= 26:
        return [chr(ord("A") + i) for i in range(n)]
    return [f"D{i + 1}" for i in range(n)]


@dataclass
class HanoiState:
    """Three pegs, each a bottom-to-top list of disk sizes (1 = smallest)."""

    pegs: dict[str, list[int]] = field(default_factory=dict)

    @classmethod
    def initial(cls, n: int, pegs: Sequence[str], source: str) -> "HanoiState":
        state = cls({p: [] for p in pegs})
        state.pegs[source] = list(range(n, 0, -1))
        return state

    def top(self, peg: str) -> int | None:
        stack = self.pegs[peg]
        return stack[-1] if stack else None

    def where(self, disk: int) -> str | None:
        for p, stack in self.pegs.items():
            if disk in stack:
                return p
        return None

    def is_valid(self) -> bool:
        return all(all(a > b for a, b in zip(s, s[1:])) for s in self.pegs.values())


def _hanoi_moves(n: int, src: str, dst: str, aux: str, out: list) -> None:
    if n == 0:
        return
    _hanoi_moves(n - 1, src, aux, dst, out)
    out.append((n, src, dst))
    _hanoi_moves(n - 1, aux, dst, src, out)


def plan_hanoi(n: int, source: str = "a", target: str = "b", aux: str = "c",
               disks: Sequence[str] | None = None) -> Plan:
    if n < 1:
        raise ValueError("need at least one disk")
    if len({source, target, aux}) != 3:
        raise ValueError("peg labels must be distinct")
    labels = list(disks) if disks is not None else disk_labels(n)
    moves: list[tuple[int, str, str]] = []
    _hanoi_moves(n, source, target, aux, moves)
    return Plan(tuple(
        PlanStep(i, "move", labels[d - 1], NamedLocation(dst), src)
        for i, (d, src, dst) in enumerate(moves, 1)
    ))


# -- pipe routing ----------------------------------------------------------

@dataclass(frozen=True)
class PipeTaskSpec:
    room: int
    start: GridPoint
    start_axis: Axis
    end: GridPoint
    end_axis: Axis
    lengths: tuple[int, ...]
    obstacles: tuple[GridPoint, ...] = ()
    mandatory: tuple[GridPoint, ...] = ()
    name: str = ""
    family: str = "pipe"

    def __post_init__(self):
        object.__setattr__(self, "start", grid_point(self.start))
        object.__setattr__(self, "end", grid_point(self.end))
        object.__setattr__(self, "lengths", tuple(sorted({int(l) for l in self.lengths})))
        object.__setattr__(self, "obstacles", tuple(grid_point(p) for p in self.obstacles))
        object.__setattr__(self, "mandatory", tuple(grid_point(p) for p in self.mandatory))
        if self.start == self.end:
            raise ValueError("start and end must differ")
        if not self.lengths or min(self.lengths) <= 0:
            raise ValueError("allowed lengths must be positive")
        if set(self.obstacles) & {self.start, self.end}:
            raise ValueError("obstacles may not sit on the start or end point")
        for p in (self.start, self.end, *self.mandatory):
            if not in_room(p, self.room):
                raise ValueError(f"point {p} outside room 0..{self.room}")

    def to_json(self) -> dict:
        d = {
            "room": self.room,
            "start": {"p": list(self.start), "axis": str(self.start_axis)},
            "end": {"p": list(self.end), "axis": str(self.end_axis)},
            "lengths": list(self.lengths),
            "obstacles": [list(p) for p in self.obstacles],
            "mandatory": [list(p) for p in self.mandatory],
        }
        if self.name:
            d["name"] = self.name
        if self.family != "pipe":
            d["family"] = self.family
        return d

    @classmethod
    def from_json(cls, d: dict) -> "PipeTaskSpec":
        return cls(
            room=int(d["room"]),
            start=d["start"]["p"],
            start_axis=Axis.parse(d["start"]["axis"]),
            end=d["end"]["p"],
            end_axis=Axis.parse(d["end"]["axis"]),
            lengths=tuple(d["lengths"]),
            obstacles=tuple(tuple(p) for p in d.get("obstacles", [])),
            mandatory=tuple(tuple(p) for p in d.get("mandatory", [])),
            name=d.get("name", ""),
            family=d.get("family", "pipe"),
        )

    @classmethod
    def load(cls, path: str | Path) -> "PipeTaskSpec":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class LaidPipe:
    """A placed pipe: its segment plus the length class it was declared as."""

    segment: Segment
    length: int

    @property
    def start(self) -> GridPoint:
        return self.segment.start

    @property
    def end(self) -> GridPoint:
        return self.segment.end


@dataclass(frozen=True)
class PipeLayout:
    pipes: tuple[LaidPipe, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pipes", tuple(self.pipes))

    def __len__(self) -> int:
        return len(self.pipes)

    def __iter__(self):
        return iter(self.pipes)

    @property
    def total_length(self) -> int:
        return sum(p.length for p in self.pipes)

    @classmethod
    def from_points(cls, points: Iterable[GridPoint]) -> "PipeLayout":
        """Contiguous layout through a polyline of grid points."""
        pts = list(points)
        pipes = []
        for a, b in zip(pts, pts[1:]):
            s = Segment(a, b)
            pipes.append(LaidPipe(s, s.length))
        return cls(tuple(pipes))

    def to_specs(self) -> list[PipeSegmentSpec]:
        counters: dict[int, int] = {}
        out = []
        for p in self.pipes:
            counters[p.length] = counters.get(p.length, 0) + 1
            out.append(PipeSegmentSpec(p.length, counters[p.length], p.end, p.segment.axis.letter))
        return out

    @classmethod
    def from_specs(cls, specs: Iterable[PipeSegmentSpec], start: GridPoint) -> "PipeLayout":
        """Chain specs head to head from ``start``; raises if a link is not axis-parallel."""
        prev = grid_point(start)
        pipes = []
        for s in specs:
            pipes.append(LaidPipe(Segment(prev, s.head), s.length))
            prev = s.head
        return cls(tuple(pipes))

    def to_json(self) -> list[dict]:
        return [
            {"from": list(p.start), "to": list(p.end), "length": p.length, "axis": p.segment.axis.letter}
            for p in self.pipes
        ]

    @classmethod
    def from_json(cls, data: list[dict]) -> "PipeLayout":
        return cls(tuple(LaidPipe(Segment(d["from"], d["to"]), int(d["length"])) for d in data))


def _contains(a: GridPoint, b: GridPoint, axis: int, p: GridPoint) -> bool:
    for j in range(3):
        if j != axis and p[j] != a[j]:
            return False
    lo, hi = (a[axis], b[axis]) if a[axis] <= b[axis] else (b[axis], a[axis])
    return lo <= p[axis] <= hi


@lru_cache(maxsize=256)
def route_pipes(spec: PipeTaskSpec) -> tuple[PipeLayout, int]:
    """Minimum-total-length layout by uniform-cost search.

    A state is ``(head, mandatory points visited, axis letter of last pipe)``.
    Ties are broken by fewer pipes, then by the move sequence compared
    lexicographically (X+ < X- < Y+ < Y- < Z+ < Z-, shorter pipe first).
    """
    moves = [(ai, ax, length) for ai, ax in enumerate(AXES) for length in spec.lengths]
    n_mand = len(spec.mandatory)
    start_state = (spec.start, 0, None)
    heap: list = [(0, 0, (), start_state)]
    done = set()
    while heap:
        cost, nseg, path, state = heapq.heappop(heap)
        if state in done:
            continue
        done.add(state)
        head, k, last = state
        if head == spec.end and k == n_mand and last == spec.end_axis.letter:
            return _replay(spec, path), cost
        for ai, ax, length in moves:
            if last is None and ax.letter != spec.start_axis.letter:
                continue
            u = ax.unit
            new = (head[0] + u[0] * length, head[1] + u[1] * length, head[2] + u[2] * length)
            if not in_room(new, spec.room):
                continue
            i = ax.index
            if any(_contains(head, new, i, o) for o in spec.obstacles):
                continue
            nk = k
            while nk < n_mand and _contains(head, new, i, spec.mandatory[nk]):
                nk += 1
            nxt = (new, nk, ax.letter)
            if nxt in done:
                continue
            heapq.heappush(heap, (cost + length, nseg + 1, path + ((ai, length),), nxt))
    raise Unreachable(f"no layout reaches {spec.end} with lengths {spec.lengths}")


def _replay(spec: PipeTaskSpec, path) -> PipeLayout:
    head = spec.start
    pipes = []
    for ai, length in path:
        u = AXES[ai].unit
        new = tuple(h + c * length for h, c in zip(head, u))
        pipes.append(LaidPipe(Segment(head, new), length))
        head = new
    return PipeLayout(tuple(pipes))
