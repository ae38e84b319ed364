"""System/user prompt construction for each task family."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UnknownTaskFamily
from ..planners import PipeTaskSpec, footprint
from ..world import Axis, GridPoint
from .tasks import HanoiTask, StackingTask, Task, read_data

# one principle per line, kept verbatim
PRINCIPLES = tuple(read_data("system_principles.txt").strip().splitlines())

SYSTEM_TEXT = "\n".join(f"{i}) {p}" for i, p in enumerate(PRINCIPLES, 1)) + (
    "\nFormat every step as: Step n. [Action n] [object n] to [position n]."
)

_NUMBERS = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"]
_ORDINALS = ["first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth"]


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str

    def messages(self) -> list[dict]:
        return [{"role": "system", "content": self.system_text},
                {"role": "user", "content": self.user_text}]


def _count(n: int) -> str:
    return _NUMBERS[n] if n < len(_NUMBERS) else str(n)


def _ordinal(i: int) -> str:
    return _ORDINALS[i] if i < len(_ORDINALS) else f"#{i + 1}"


def _join(items: list[str]) -> str:
    if len(items) <= 1:
        return "".join(items)
    return ", ".join(items[:-1]) + " and " + items[-1]


def _pt(p: GridPoint, unit: str = "") -> str:
    return "(" + ", ".join(f"{c}{unit}" for c in p) + ")"


def _direction(ax: Axis) -> str:
    return f"{'positive' if ax.sign > 0 else 'negative'} {ax.letter} axis"


def stacking_prompt(task: StackingTask) -> str:
    cubes = sorted(task.scene.movables(), key=footprint, reverse=True)
    first, last = cubes[0].label, cubes[-1].label
    return (
        f"I have {_count(len(cubes))} cubes with names [{first}] to [{last}]. "
        f"The cubes' lengths are in a descending order from [{first}] to [{last}]. "
        "So, I want to teach a robot arm to use the cubes to create a tower with the most stable design. "
        "Could you tell me which cube to operate step by step?"
    )


def hanoi_prompt(task: HanoiTask) -> str:
    disks = "".join(f"[{d}], " for d in task.disks)
    pegs = _join([f"[{p}]" for p in task.pegs])
    return (
        f"I have a tower of Hanoi with {_count(task.n)} disks {disks}from smallest to biggest. "
        f"The towers names are {pegs}. "
        f"The disks start on [{task.source}] and must end on [{task.target}]. "
        "Describe the sequence of completing the puzzle and control the robot arm to finish it."
    )


def _example_layout(spec: PipeTaskSpec) -> str:
    ls = spec.lengths
    seq = [ls[0], ls[-1], ls[len(ls) // 2]]
    along = spec.start_axis
    side = Axis("Y") if along.letter in ("X", "Z") else Axis("Z")
    head = spec.start
    counters: dict[int, int] = {}
    parts = []
    for i, length in enumerate(seq):
        ax = along if i < 2 else side
        head = tuple(h + u * length for h, u in zip(head, ax.unit))
        counters[length] = counters.get(length, 0) + 1
        parts.append(f"pipe {length}ft #{counters[length]} {_pt(head)} {ax.letter.lower()} axis")
    return ", ".join(parts)


def pipe_prompt(spec: PipeTaskSpec) -> str:
    inventory = ", ".join(f"{l}ft length straight pipes (pipe {l}ft)" for l in spec.lengths)
    text = (
        "Can you help me with pipe connection? "
        f"We have several {inventory}. "
        f"The start position is {_pt(spec.start, 'ft')} direction is the {_direction(spec.start_axis)}, "
    )
    if spec.mandatory:
        visits = [
            f"{'' if i == 0 else 'then '}pass the {_ordinal(i)} mandatory point {_pt(p)}"
            for i, p in enumerate(spec.mandatory)
        ]
        text += "the pipe connection must " + ", ".join(visits) + ", finally to "
    text += f"the end position {_pt(spec.end)} direction is the {_direction(spec.end_axis)}. "
    text += (
        "We assume that each straight pipe can be connect to each other directly. "
        f"You can just tell me the position of each pipe, such as '{_example_layout(spec)}'. "
        "To be noted, each pipe must maintain parallelism to the X, Y, and Z axes."
    )
    if spec.obstacles:
        n = len(spec.obstacles)
        where = _join([f"point {_pt(p)}" for p in spec.obstacles])
        verb = "is" if n == 1 else "are"
        noun = "obstacle" if n == 1 else "obstacles"
        text += (f" There {verb} {_count(n)} {noun} at {where}, "
                 "the pipe cannot pass through this point from neither X, Y nor Z axes.")
    if spec.mandatory:
        pts = [_pt(p) for p in spec.mandatory]
        if len(pts) == 1:
            text += f" The pipe must pass the mandatory point {pts[0]}."
        else:
            text += f" The pipe must pass each mandatory point {_join(pts)}."
    return text


def build_prompt(task: Task) -> PromptBundle:
    if isinstance(task, StackingTask):
        user = stacking_prompt(task)
    elif isinstance(task, HanoiTask):
        user = hanoi_prompt(task)
    elif isinstance(task, PipeTaskSpec):
        user = pipe_prompt(task)
    else:
        raise UnknownTaskFamily(f"no prompt template for {type(task).__name__}")
    return PromptBundle(SYSTEM_TEXT, user)
