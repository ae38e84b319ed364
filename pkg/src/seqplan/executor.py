"""Pick-and-place execution on a point-mass end-effector under Cartesian impedance control.

The commanded force is ``F = C v + K (x_des - x) + ld``. The payload term
``ld`` is reported in the force but treated as gravity-compensated in the
motion, so the end-effector settles exactly on ``x_des``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConvergenceTimeout, ObjectMissing, TargetOccupied
from .matcher import MatchedOperation
from .world import Scene, Vec3

OPEN = "open"


@dataclass(frozen=True)
class ImpedanceParams:
    K: tuple[float, float, float] = (100.0, 100.0, 100.0)
    C: tuple[float, float, float] | None = None
    ld: tuple[float, float, float] = (0.0, 0.0, 0.0)
    mass: float = 1.0

    def __post_init__(self):
        K = tuple(float(k) for k in np.broadcast_to(self.K, 3))
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if min(K) <= 0:
            raise ValueError("stiffness must be positive on every axis")
        # default damping is critical: C = 2 sqrt(K m)
        C = tuple(2 * math.sqrt(k * self.mass) for k in K) if self.C is None else \
            tuple(float(c) for c in np.broadcast_to(self.C, 3))
        if min(C) < 0:
            raise ValueError("damping must be nonnegative")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "ld", tuple(float(v) for v in np.broadcast_to(self.ld, 3)))


@dataclass(frozen=True)
class EEState:
    x: Vec3
    v: Vec3 = (0.0, 0.0, 0.0)
    gripper: str = OPEN  # "open" or the name of the held object

    def energy(self, p: ImpedanceParams, x_des: Sequence[float]) -> float:
        """Kinetic plus spring energy relative to ``x_des``."""
        dx = np.subtract(x_des, self.x)
        v = np.asarray(self.v)
        return 0.5 * p.mass * float(v @ v) + 0.5 * float(dx @ (np.asarray(p.K) * dx))


def impedance_force(p: ImpedanceParams, s: EEState, x_des: Sequence[float]) -> np.ndarray:
    dx = np.subtract(x_des, s.x)
    return np.asarray(p.C) * np.asarray(s.v) + np.asarray(p.K) * dx + np.asarray(p.ld)


def step_dynamics(p: ImpedanceParams, s: EEState, x_des: Sequence[float], dt: float) -> EEState:
    """One semi-implicit Euler step of the spring-damper pulling toward ``x_des``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = np.asarray(s.x, dtype=float)
    v = np.asarray(s.v, dtype=float)
    a = (np.asarray(p.K) * (np.subtract(x_des, x)) - np.asarray(p.C) * v) / p.mass
    v = v + a * dt
    x = x + v * dt
    return EEState(tuple(x), tuple(v), s.gripper)


@lru_cache(maxsize=32)
def _transition_powers(K: tuple, C: tuple, mass: float, dt: float, chunk: int) -> np.ndarray:
    """A^1..A^chunk for the per-axis error recurrence [e, v] -> A [e, v], shape (chunk, 3, 2, 2)."""
    k = np.asarray(K) / mass
    c = np.asarray(C) / mass
    A = np.zeros((3, 2, 2))
    A[:, 0, 0] = 1 - dt * dt * k
    A[:, 0, 1] = dt * (1 - dt * c)
    A[:, 1, 0] = -dt * k
    A[:, 1, 1] = 1 - dt * c
    out = np.empty((chunk, 3, 2, 2))
    out[0] = A
    for i in range(1, chunk):
        out[i] = A @ out[i - 1]
    return out


def rollout(p: ImpedanceParams, s: EEState, x_des: Sequence[float], dt: float, nsteps: int):
    """``nsteps`` applications of :func:`step_dynamics` computed in closed form.

    Returns positions and velocities of shape ``(nsteps, 3)``.
    """
    powers = _transition_powers(p.K, p.C, p.mass, dt, nsteps)
    e0 = np.stack([np.subtract(s.x, x_des), np.asarray(s.v, dtype=float)], axis=1)  # (3, 2)
    states = np.einsum("naij,aj->nai", powers, e0)
    return states[:, :, 0] + np.asarray(x_des), states[:, :, 1]


@dataclass
class Trajectory:
    dt: float
    t: list[float] = field(default_factory=list)
    x: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)
    gripper: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.t)

    def positions(self) -> np.ndarray:
        return np.concatenate(self.x) if self.x else np.zeros((0, 3))

    def velocities(self) -> np.ndarray:
        return np.concatenate(self.v) if self.v else np.zeros((0, 3))

    def times(self) -> np.ndarray:
        return np.asarray(self.t)

    def _append(self, xs: np.ndarray, vs: np.ndarray, grip: str) -> None:
        start = len(self.t)
        self.t.extend(self.dt * np.arange(start + 1, start + 1 + len(xs)))
        self.x.append(xs)
        self.v.append(vs)
        self.gripper.extend([grip] * len(xs))

    def to_csv(self, path: str | Path) -> None:
        xs, vs = self.positions(), self.velocities()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "y", "z", "vx", "vy", "vz", "gripper"])
            for t, x, v, g in zip(self.t, xs, vs, self.gripper):
                w.writerow([f"{t:.6f}", *(f"{c:.9g}" for c in x), *(f"{c:.9g}" for c in v), g])


@dataclass(frozen=True)
class ExecutionConfig:
    dt: float = 1e-3
    pos_tol: float = 1e-3
    vel_tol: float = 1e-3
    clearance: float = 1.5  # times the carried object's height
    max_steps: int = 100_000
    chunk: int = 512


def _boxes_overlap(c1, s1, c2, s2, tol=1e-9) -> bool:
    return all(abs(c1[i] - c2[i]) < (s1[i] + s2[i]) / 2 - tol for i in range(3))


def _settle(p: ImpedanceParams, s: EEState, x_des, cfg: ExecutionConfig, traj: Trajectory) -> EEState:
    x_des = np.asarray(x_des, dtype=float)
    taken = 0
    while True:
        if np.linalg.norm(np.subtract(s.x, x_des)) < cfg.pos_tol and np.linalg.norm(s.v) < cfg.vel_tol:
            return s
        n = min(cfg.chunk, cfg.max_steps - taken)
        if n <= 0:
            raise ConvergenceTimeout(f"waypoint {tuple(x_des)} not reached in {cfg.max_steps} steps")
        xs, vs = rollout(p, s, x_des, cfg.dt, cfg.chunk)
        xs, vs = xs[:n], vs[:n]
        ok = (np.linalg.norm(xs - x_des, axis=1) < cfg.pos_tol) & (np.linalg.norm(vs, axis=1) < cfg.vel_tol)
        hit = int(np.argmax(ok)) if ok.any() else n - 1
        traj._append(xs[:hit + 1], vs[:hit + 1], s.gripper)
        taken += hit + 1
        s = EEState(tuple(xs[hit]), tuple(vs[hit]), s.gripper)


def execute_plan(ops: Sequence[MatchedOperation], scene: Scene, p: ImpedanceParams | None = None,
                 cfg: ExecutionConfig | None = None, home: Sequence[float] | None = None):
    """Carry out matched operations; returns ``(trajectory, final scene)``.

    Each operation visits above-source, source (grip), above-source,
    above-target, target (release). Objects move only on release.
    """
    p = p or ImpedanceParams()
    cfg = cfg or ExecutionConfig()
    traj = Trajectory(cfg.dt)
    state = scene.copy()
    if not ops:
        return traj, state

    ee = None if home is None else EEState(tuple(map(float, home)))
    for op in ops:
        if op.object_name not in state:
            raise ObjectMissing(f"{op.object_name!r} is not in the scene")
        obj = state.get(op.object_name)
        for other in state.movables():
            if other.name != obj.name and _boxes_overlap(op.target_position, obj.size, other.position, other.size):
                raise TargetOccupied(f"{other.name!r} occupies the target of {obj.name!r}")
        lift = np.array([0.0, 0.0, cfg.clearance * obj.height])
        src = np.asarray(obj.position)
        dst = np.asarray(op.target_position)
        if ee is None:
            ee = EEState(tuple(src + lift))
        ee = _settle(p, ee, src + lift, cfg, traj)
        ee = _settle(p, ee, src, cfg, traj)
        ee = EEState(ee.x, ee.v, obj.name)
        ee = _settle(p, ee, src + lift, cfg, traj)
        ee = _settle(p, ee, dst + lift, cfg, traj)
        ee = _settle(p, ee, dst, cfg, traj)
        ee = EEState(ee.x, ee.v, OPEN)
        state = state.with_position(obj.name, op.target_position)
    return traj, state
