"""Task descriptions and the bundled task/fixture files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Union

from ..decoder import Dictionary
from ..errors import UnknownTaskFamily
from ..planners import PipeTaskSpec, disk_labels
from ..world import Scene

PIPE_FAMILIES = ("pipe", "avoid_obstacles", "pass_points")


@dataclass
class StackingTask:
    scene: Scene
    name: str = "stacking"
    family: str = "stacking"

    def to_json(self) -> dict:
        return {"name": self.name, "family": self.family, "scene": self.scene.to_json()}


@dataclass
class HanoiTask:
    n: int = 5
    pegs: tuple[str, str, str] = ("a", "b", "c")
    source: str = "a"
    target: str = "b"
    aux: str = "c"
    disks: tuple[str, ...] = ()
    scene: Scene | None = None
    name: str = "hanoi"
    family: str = field(default="hanoi")

    def __post_init__(self):
        self.pegs = tuple(self.pegs)
        if not self.disks:
            self.disks = tuple(disk_labels(self.n))

    def to_json(self) -> dict:
        d = {"name": self.name, "family": self.family, "n": self.n, "pegs": list(self.pegs),
             "source": self.source, "target": self.target, "aux": self.aux, "disks": list(self.disks)}
        if self.scene is not None:
            d["scene"] = self.scene.to_json()
        return d


Task = Union[StackingTask, HanoiTask, PipeTaskSpec]


def task_from_json(d: dict) -> Task:
    family = d.get("family", "pipe")
    if family == "stacking":
        return StackingTask(Scene.from_json(d["scene"]), d.get("name", "stacking"))
    if family == "hanoi":
        return HanoiTask(
            n=int(d["n"]), pegs=tuple(d.get("pegs", ("a", "b", "c"))),
            source=d.get("source", "a"), target=d.get("target", "b"), aux=d.get("aux", "c"),
            disks=tuple(d.get("disks", ())),
            scene=Scene.from_json(d["scene"]) if "scene" in d else None,
            name=d.get("name", "hanoi"),
        )
    if family in PIPE_FAMILIES:
        return PipeTaskSpec.from_json(d)
    raise UnknownTaskFamily(f"unknown task family {family!r}")


def task_to_json(task: Task) -> dict:
    return task.to_json()


def load_task(path: str | Path) -> Task:
    return task_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def task_dictionary(task: Task) -> Dictionary:
    if isinstance(task, StackingTask):
        return Dictionary.with_objects(o.label for o in task.scene.objects)
    if isinstance(task, HanoiTask):
        return Dictionary.with_objects([*task.disks, *task.pegs])
    return Dictionary()


def family_of(task: Task) -> str:
    if isinstance(task, (StackingTask, HanoiTask)):
        return task.family
    if isinstance(task, PipeTaskSpec):
        return task.family if task.family != "pipe" else ("pass_points" if task.mandatory else "avoid_obstacles")
    raise UnknownTaskFamily(f"not a task: {task!r}")


def task_id(task: Task) -> str:
    return getattr(task, "name", "") or family_of(task)


# -- bundled data ----------------------------------------------------------

def data_path(name: str) -> Path:
    return Path(str(resources.files("seqplan") / "data" / name))


def read_data(name: str) -> str:
    return data_path(name).read_text(encoding="utf-8")


def bundled_task(name: str) -> Task:
    return load_task(data_path(f"tasks/{name}.json"))


BUNDLED_PIPE_TASKS = (
    "avoid_obstacles_constant", "avoid_obstacles_variable",
    "pass_points_constant", "pass_points_variable",
)
