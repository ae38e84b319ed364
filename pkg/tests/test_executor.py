import csv
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from oracles import critically_damped_step, stack_heights

from seqplan.decoder import parse_plan
from seqplan.errors import ConvergenceTimeout, ObjectMissing, TargetOccupied
from seqplan.executor import (
    EEState, ExecutionConfig, ImpedanceParams, execute_plan, impedance_force, rollout, step_dynamics,
)
from seqplan.harness.tasks import bundled_task, read_data, task_dictionary
from seqplan.matcher import MatchedOperation, match_objects


@pytest.mark.parametrize("p, s, x_des, want", [
    (ImpedanceParams(ld=(0, 0, -9.8)), EEState((1, 2, 3)), (1, 2, 3), (0, 0, -9.8)),
    (ImpedanceParams(K=100), EEState((0, 0, 0)), (1, 0, 0), (100, 0, 0)),
    (ImpedanceParams(K=100, C=20), EEState((0, 0, 0), (0, 2, 0)), (0, 1, 0), (0, 140, 0)),
])
def test_force_examples(p, s, x_des, want):
    assert impedance_force(p, s, x_des) == pytest.approx(want)


def test_params_validation_and_default_damping():
    p = ImpedanceParams(K=(100, 400, 25), mass=1)
    assert p.C == pytest.approx((20, 40, 10))
    for bad in (dict(K=0), dict(C=-1), dict(mass=0)):
        with pytest.raises(ValueError):
            ImpedanceParams(**bad)


def test_critical_damping_matches_closed_form():
    dt, n = 1e-4, 10_000
    p = ImpedanceParams(K=100, C=20, mass=1)
    xs, _ = rollout(p, EEState((0, 0, 0)), (1, 1, 1), dt, n)
    t = dt * np.arange(1, n + 1)
    want = critically_damped_step(t, 10.0)
    assert np.max(np.abs(xs[:, 0] - want)) < 1e-3
    assert xs[5999, 0] == pytest.approx(1 - 7 * math.exp(-6), abs=1e-3)


def test_rollout_equals_iterated_steps():
    p = ImpedanceParams(K=(50, 100, 300), C=(3, 20, 5), mass=1.3)
    s = EEState((0.1, -0.2, 0.3), (1, 0, -1))
    xs, vs = rollout(p, s, (1, 2, 3), 1e-3, 200)
    for i in range(200):
        s = step_dynamics(p, s, (1, 2, 3), 1e-3)
        assert s.x == pytest.approx(tuple(xs[i]), abs=1e-12)
        assert s.v == pytest.approx(tuple(vs[i]), abs=1e-12)


@given(st.floats(1e-5, 1.0))
def test_fixed_point(dt):
    s = EEState((0.3, 0.4, 0.5))
    assert step_dynamics(ImpedanceParams(), s, s.x, dt) == s


def test_step_rejects_nonpositive_dt():
    with pytest.raises(ValueError):
        step_dynamics(ImpedanceParams(), EEState((0, 0, 0)), (1, 0, 0), 0)


def test_undamped_energy_conserved_to_order_dt():
    p = ImpedanceParams(K=100, C=0, mass=1)
    dt = 1e-3
    s = EEState((0, 0, 0))
    target = (1, 0, 0)
    e0 = s.energy(p, target)
    xs, vs = rollout(p, s, target, dt, 20_000)
    e = 0.5 * np.sum(vs ** 2, axis=1) + 0.5 * 100 * np.sum((xs - target) ** 2, axis=1)
    omega = 10.0
    assert np.max(np.abs(e - e0)) <= omega * dt * e0


def test_no_overshoot_when_overdamped():
    rng = random.Random(11)
    dt = 1e-3
    for _ in range(50):
        m = rng.uniform(0.2, 5)
        K = rng.uniform(1, 500)
        zeta = rng.uniform(1, 3)
        p = ImpedanceParams(K=K, C=2 * zeta * math.sqrt(K * m), mass=m)
        xs, _ = rollout(p, EEState((0, 0, 0)), (1, 1, 1), dt, 20_000)
        x = xs[:, 0]
        assert x.max() <= 1 + 1e-6
        assert np.all(np.diff(x) >= -1e-6)


def test_energy_non_increasing_with_damping():
    rng = random.Random(5)
    dt = 1e-3
    for _ in range(50):
        m = rng.uniform(0.2, 5)
        K = tuple(rng.uniform(1, 500) for _ in range(3))
        C = tuple(rng.uniform(0.1, 3) * 2 * math.sqrt(k * m) for k in K)
        p = ImpedanceParams(K=K, C=C, mass=m, ld=(0, 0, -9.8))
        s = EEState(tuple(rng.uniform(-1, 1) for _ in range(3)), tuple(rng.uniform(-1, 1) for _ in range(3)))
        target = (0.5, -0.5, 0.2)
        e = s.energy(p, target)
        for _ in range(500):
            s = step_dynamics(p, s, target, dt)
            e2 = s.energy(p, target)
            assert e2 <= e + 1e-6
            e = e2


@settings(max_examples=30)
@given(st.tuples(*[st.floats(0.1, 1000)] * 3), st.tuples(*[st.floats(-10, 10)] * 3))
def test_force_jacobian_is_minus_k(K, x):
    p = ImpedanceParams(K=K, C=1.0)
    h = 1e-3  # the force is affine in x, so a wide step keeps round-off small
    J = np.zeros((3, 3))
    for j in range(3):
        lo, hi = list(x), list(x)
        lo[j] -= h
        hi[j] += h
        J[:, j] = (impedance_force(p, EEState(tuple(hi)), (0, 0, 0)) -
                   impedance_force(p, EEState(tuple(lo)), (0, 0, 0))) / (2 * h)
    assert np.allclose(J, -np.diag(K), atol=1e-6)


# -- execution


@pytest.fixture(scope="module")
def tower():
    task = bundled_task("stacking")
    plan = parse_plan(read_data("stacking_reply.txt"), task_dictionary(task))
    return task.scene, match_objects(plan, task.scene)


def test_empty_plan_is_identity(tower):
    scene, _ = tower
    traj, final = execute_plan([], scene)
    assert len(traj) == 0 and final.objects == scene.objects


def test_reply_builds_centered_tower(tower):
    scene, ops = tower
    traj, final = execute_plan(ops, scene)
    base = scene.base_marker().position
    cubes = [final.get(n) for n in "ABCDE"]
    for c in cubes:
        assert c.position[:2] == pytest.approx(base[:2])
    want = [base[2] + z for z in stack_heights([c.height for c in cubes])]
    assert [c.position[2] for c in cubes] == pytest.approx(want)
    # conservation: same objects, only positions moved
    assert [o.name for o in final.objects] == [o.name for o in scene.objects]
    assert [o.size for o in final.objects] == [o.size for o in scene.objects]
    t = traj.times()
    assert np.allclose(np.diff(t), traj.dt)
    # the end-effector finishes on the last target
    assert traj.positions()[-1] == pytest.approx(ops[-1].target_position, abs=1e-3)


def test_gripper_holds_object_between_grip_and_release(tower):
    scene, ops = tower
    traj, _ = execute_plan(ops[:1], scene)
    assert set(traj.gripper) == {"open", "A"}
    assert traj.gripper[-1] == "A"  # samples before the release are taken while holding


def test_missing_object(tower):
    scene, ops = tower
    bad = MatchedOperation("Z", (1, 1, 1), (0, 0, 0), "move", (1, 1, 1))
    with pytest.raises(ObjectMissing):
        execute_plan([bad], scene)


def test_occupied_target(tower):
    scene, ops = tower
    b = scene.get("B")
    op = MatchedOperation("A", scene.get("A").size, scene.get("A").position, "move", b.position)
    with pytest.raises(TargetOccupied):
        execute_plan([op], scene)


def test_convergence_timeout(tower):
    scene, ops = tower
    with pytest.raises(ConvergenceTimeout):
        execute_plan(ops[:1], scene, cfg=ExecutionConfig(max_steps=10))


def test_csv_export(tower, tmp_path):
    scene, ops = tower
    traj, _ = execute_plan(ops[:1], scene)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x", "y", "z", "vx", "vy", "vz", "gripper"]
    assert len(rows) == len(traj) + 1
