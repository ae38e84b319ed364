"""Sequence planning for robot assembly: decode, match, validate, route, execute."""

from .decoder import (
    BaseLocation, Coordinate, Dictionary, NamedLocation, OnTopOf, PipeSegmentSpec, Plan, PlanStep,
    parse_pipe_plan, parse_plan, parse_step, split_steps,
)
from .executor import EEState, ImpedanceParams, execute_plan, impedance_force, step_dynamics
from .matcher import MatchedOperation, match_objects, resolve_target
from .planners import HanoiState, PipeLayout, PipeTaskSpec, plan_hanoi, plan_stacking, route_pipes
from .validators import Outcome, Reason, Verdict, validate_hanoi, validate_pipe_layout, validate_stacking
from .world import Axis, Scene, SceneObject, Segment, axis_of, segment_contains_point

__version__ = "0.1.0"
