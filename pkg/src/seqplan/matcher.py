"""Bind decoded plan steps to scene objects and turn targets into coordinates."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .decoder import BaseLocation, Coordinate, Dictionary, NamedLocation, OnTopOf, Plan, TargetSpec
from .errors import AmbiguousMatch, NoBaseDefined, NoMatch, UnknownLabel
from .world import Scene, SceneObject, Vec3, normalize_label, vec3


@dataclass(frozen=True)
class MatchedOperation:
    object_name: str
    size: Vec3
    current_position: Vec3
    action: str
    target_position: Vec3

    def to_json(self) -> dict:
        return {
            "object_name": self.object_name,
            "size": list(self.size),
            "current_position": list(self.current_position),
            "action": self.action,
            "target_position": list(self.target_position),
        }

    @classmethod
    def from_json(cls, d: dict) -> "MatchedOperation":
        return cls(d["object_name"], vec3(d["size"]), vec3(d["current_position"]),
                   d["action"], vec3(d["target_position"]))


def stack_top(scene: Scene, xy, floor: float, exclude: str | None = None) -> float:
    """Height of the highest object surface standing over ``xy`` (at least ``floor``)."""
    top = floor
    for o in scene.objects:
        if o.is_location or o.name == exclude:
            continue
        if o.footprint_contains(xy) and o.top > top:
            top = o.top
    return top


def _location(scene: Scene, label: str) -> SceneObject:
    found = scene.find_label(label, locations=True)
    if not found:
        raise UnknownLabel(f"no marker or peg labeled {label!r}")
    if len(found) > 1:
        raise AmbiguousMatch(f"several locations labeled {label!r}")
    return found[0]


def resolve_target(t: TargetSpec, scene: Scene, moving: SceneObject) -> Vec3:
    """Concrete center position for ``moving`` once it reaches target ``t``."""
    half = moving.height / 2
    if isinstance(t, Coordinate):
        return t.point
    if isinstance(t, (NamedLocation, BaseLocation)):
        if isinstance(t, BaseLocation):
            loc = scene.base_marker()
            if loc is None:
                raise NoBaseDefined("scene has no base marker")
        else:
            loc = _location(scene, t.label)
        x, y, z = loc.position
        return (x, y, stack_top(scene, (x, y), z, exclude=moving.name) + half)
    if isinstance(t, OnTopOf):
        found = [o for o in scene.find_label(t.label, locations=False) if o.name != moving.name]
        if not found:
            raise UnknownLabel(f"no object labeled {t.label!r} to stack on")
        if len(found) > 1:
            raise AmbiguousMatch(f"several objects labeled {t.label!r}")
        support = found[0]
        # climb to the topmost object standing on the support's column
        top = support
        for o in scene.objects:
            if o.is_location or o.name == moving.name:
                continue
            if o.footprint_contains(support.position[:2]) and o.position[2] >= support.position[2] and o.top > top.top:
                top = o
        x, y, z = top.position
        return (x, y, z + top.height / 2 + half)
    raise TypeError(f"unsupported target {t!r}")


def _pick(candidates: list[SceneObject], anchor: Vec3, label: str) -> SceneObject:
    if len(candidates) == 1:
        return candidates[0]
    ranked = sorted(candidates, key=lambda o: math.dist(o.position, anchor))
    d0, d1 = math.dist(ranked[0].position, anchor), math.dist(ranked[1].position, anchor)
    if d0 == d1:
        raise AmbiguousMatch(f"objects {ranked[0].name!r} and {ranked[1].name!r} tie for {label!r}")
    return ranked[0]


def match_objects(plan: Plan, scene: Scene, dictionary: Dictionary | None = None) -> list[MatchedOperation]:
    """Pair every step with a scene object, resolving targets as the scene evolves.

    Duplicate labels are resolved by distance to the previous step's target
    (the origin for the first step).
    """
    state = scene.copy()
    anchor: Vec3 = (0.0, 0.0, 0.0)
    ops = []
    for step in plan:
        if dictionary is not None and not dictionary.has_object(step.object):
            raise NoMatch(f"step {step.index}: {step.object!r} is not in the object dictionary")
        candidates = state.find_label(step.object, locations=False)
        if not candidates:
            raise NoMatch(f"step {step.index}: no object labeled {step.object!r} in scene")
        obj = _pick(candidates, anchor, step.object)
        target = resolve_target(step.target, state, obj)
        ops.append(MatchedOperation(obj.name, obj.size, obj.position, step.action, target))
        state = state.with_position(obj.name, target)
        anchor = target
    return ops
