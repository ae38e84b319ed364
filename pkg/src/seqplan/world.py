"""Geometry and scene types shared by the planners, validators and executor.

Grid points are plain integer triples and continuous positions are float
triples; both are ordinary tuples so they hash, compare and serialize
without ceremony.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Sequence

from .errors import NotAxisParallel, ZeroDisplacement

Vec3 = tuple[float, float, float]
GridPoint = tuple[int, int, int]

AXIS_LETTERS = ("X", "Y", "Z")

# kinds that mark places rather than things that get picked up
LOCATION_KINDS = frozenset({"marker", "peg"})
OBJECT_KINDS = frozenset({"cube", "disk", "pipe", "peg", "marker"})


def vec3(values: Sequence[float]) -> Vec3:
    if len(values) != 3:
        raise ValueError(f"expected 3 components, got {len(values)}")
    out = tuple(float(v) for v in values)
    if not all(math.isfinite(v) for v in out):
        raise ValueError(f"non-finite vector {values!r}")
    return out  # type: ignore[return-value]


def grid_point(values: Sequence[int]) -> GridPoint:
    if len(values) != 3:
        raise ValueError(f"expected 3 components, got {len(values)}")
    out = []
    for v in values:
        if isinstance(v, float):
            if not v.is_integer():
                raise ValueError(f"non-integer grid coordinate {v!r}")
            v = int(v)
        out.append(int(v))
    return tuple(out)  # type: ignore[return-value]


@dataclass(frozen=True, order=True)
class Axis:
    """A signed coordinate axis such as ``Z+``."""

    letter: str
    sign: int = 1

    def __post_init__(self):
        if self.letter not in AXIS_LETTERS:
            raise ValueError(f"axis letter must be one of X/Y/Z, got {self.letter!r}")
        if self.sign not in (1, -1):
            raise ValueError(f"axis sign must be +1 or -1, got {self.sign!r}")

    @property
    def index(self) -> int:
        return AXIS_LETTERS.index(self.letter)

    @property
    def unit(self) -> GridPoint:
        u = [0, 0, 0]
        u[self.index] = self.sign
        return tuple(u)  # type: ignore[return-value]

    def parallel_to(self, other: "Axis") -> bool:
        return self.letter == other.letter

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``"Z+"``, ``"-y"``, ``"z"`` (sign defaults to +)."""
        t = text.strip().upper().replace("AXIS", "").strip()
        sign = 1
        if t.startswith(("+", "-")):
            sign, t = (1 if t[0] == "+" else -1), t[1:]
        elif t.endswith(("+", "-")):
            sign, t = (1 if t[-1] == "+" else -1), t[:-1]
        return cls(t.strip(), sign)

    def __str__(self) -> str:
        return f"{self.letter}{'+' if self.sign > 0 else '-'}"


# X+ < X- < Y+ < Y- < Z+ < Z-: the tie-break order used by the router
AXES: tuple[Axis, ...] = tuple(Axis(l, s) for l in AXIS_LETTERS for s in (1, -1))


def axis_of(d: Sequence[float]) -> Axis:
    """Return the signed axis of a displacement with exactly one nonzero component."""
    nonzero = [i for i, c in enumerate(d) if c != 0]
    if not nonzero:
        raise ZeroDisplacement(f"zero displacement {tuple(d)!r}")
    if len(nonzero) > 1:
        raise NotAxisParallel(f"displacement {tuple(d)!r} is not axis-parallel")
    i = nonzero[0]
    return Axis(AXIS_LETTERS[i], 1 if d[i] > 0 else -1)


def sub(a: Sequence[float], b: Sequence[float]) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def add(a: Sequence[float], b: Sequence[float]) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


@dataclass(frozen=True)
class Segment:
    """A straight axis-parallel run between two grid points."""

    start: GridPoint
    end: GridPoint

    def __post_init__(self):
        object.__setattr__(self, "start", grid_point(self.start))
        object.__setattr__(self, "end", grid_point(self.end))
        axis_of(sub(self.end, self.start))

    @property
    def axis(self) -> Axis:
        return axis_of(sub(self.end, self.start))

    @property
    def length(self) -> int:
        return int(sum(abs(c) for c in sub(self.end, self.start)))

    def contains(self, p: Sequence[int]) -> bool:
        return segment_contains_point(self, p)

    def points(self) -> Iterator[GridPoint]:
        """Every lattice point on the closed segment, from start to end."""
        u = self.axis.unit
        for k in range(self.length + 1):
            yield tuple(s + k * c for s, c in zip(self.start, u))  # type: ignore[misc]


def segment_contains_point(s: Segment, p: Sequence[int]) -> bool:
    """True iff ``p`` lies on the closed segment ``[s.start, s.end]``."""
    i = s.axis.index
    for j in range(3):
        if j != i and p[j] != s.start[j]:
            return False
    lo, hi = sorted((s.start[i], s.end[i]))
    return lo <= p[i] <= hi


def in_room(p: Sequence[int], room: int) -> bool:
    return all(0 <= c <= room for c in p)


@dataclass(frozen=True)
class SceneObject:
    name: str
    size: Vec3
    position: Vec3
    kind: str = "cube"
    label: str = ""

    def __post_init__(self):
        if not self.name:
            raise ValueError("scene object name must be non-empty")
        object.__setattr__(self, "size", vec3(self.size))
        object.__setattr__(self, "position", vec3(self.position))
        if any(c < 0 for c in self.size):
            raise ValueError(f"negative size for {self.name!r}: {self.size}")
        if self.kind not in OBJECT_KINDS:
            raise ValueError(f"unknown object kind {self.kind!r}")
        if not self.label:
            object.__setattr__(self, "label", self.name)

    @property
    def height(self) -> float:
        return self.size[2]

    @property
    def top(self) -> float:
        return self.position[2] + self.size[2] / 2

    @property
    def bottom(self) -> float:
        return self.position[2] - self.size[2] / 2

    @property
    def is_location(self) -> bool:
        return self.kind in LOCATION_KINDS

    def footprint_contains(self, xy: Sequence[float], tol: float = 1e-9) -> bool:
        return all(
            abs(xy[i] - self.position[i]) <= self.size[i] / 2 + tol for i in (0, 1)
        )

    def moved_to(self, position: Sequence[float]) -> "SceneObject":
        return replace(self, position=vec3(position))

    def to_json(self) -> dict:
        d = {
            "name": self.name,
            "kind": self.kind,
            "size": list(self.size),
            "position": list(self.position),
        }
        if self.label != self.name:
            d["label"] = self.label
        return d

    @classmethod
    def from_json(cls, d: dict) -> "SceneObject":
        return cls(
            name=d["name"],
            size=d["size"],
            position=d["position"],
            kind=d.get("kind", "cube"),
            label=d.get("label", ""),
        )


def normalize_label(text: str) -> str:
    return " ".join(text.strip().lower().split())


@dataclass
class Scene:
    """Labeled objects in a room. Object names are unique; labels need not be."""

    objects: list[SceneObject] = field(default_factory=list)
    room: int | None = None
    base: str | None = None

    def __post_init__(self):
        names = [o.name for o in self.objects]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ValueError(f"duplicate object names in scene: {sorted(dupes)}")

    def __contains__(self, name: str) -> bool:
        return any(o.name == name for o in self.objects)

    def __len__(self) -> int:
        return len(self.objects)

    def get(self, name: str) -> SceneObject:
        for o in self.objects:
            if o.name == name:
                return o
        raise KeyError(name)

    def find_label(self, label: str, *, locations: bool | None = None) -> list[SceneObject]:
        """Objects whose normalized label matches; optionally restricted by kind class."""
        key = normalize_label(label)
        out = [o for o in self.objects if normalize_label(o.label) == key]
        if locations is not None:
            out = [o for o in out if o.is_location == locations]
        return out

    def base_marker(self) -> SceneObject | None:
        if self.base is not None:
            return self.get(self.base)
        for o in self.objects:
            if o.kind == "marker" and normalize_label(o.label) == "base":
                return o
        return None

    def movables(self) -> list[SceneObject]:
        return [o for o in self.objects if not o.is_location]

    def with_position(self, name: str, position: Sequence[float]) -> "Scene":
        objs = [o.moved_to(position) if o.name == name else o for o in self.objects]
        return Scene(objs, self.room, self.base)

    def copy(self) -> "Scene":
        return Scene(list(self.objects), self.room, self.base)

    def to_json(self) -> dict:
        d: dict = {"objects": [o.to_json() for o in self.objects]}
        if self.room is not None:
            d["room"] = self.room
        if self.base is not None:
            d["base"] = self.base
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Scene":
        return cls(
            objects=[SceneObject.from_json(o) for o in d.get("objects", [])],
            room=d.get("room"),
            base=d.get("base"),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Scene":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
