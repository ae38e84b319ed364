"""
Stacking five cubes into a tower
================================

Decode a stored reply, bind its names to scene objects, drive the gripper
through every pick and place and check the result.
"""

from seqplan import execute_plan, match_objects, parse_plan, validate_stacking
from seqplan.harness.tasks import bundled_task, read_data, task_dictionary

task = bundled_task("stacking")
reply = read_data("stacking_reply.txt")
print(reply)

# decode against the task's object names
plan = parse_plan(reply, task_dictionary(task))
for step in plan:
    print(step.render())

# each step inherits size and position from the matched cube
ops = match_objects(plan, task.scene)
for op in ops:
    print(f"{op.object_name}: {op.current_position} -> {tuple(round(c, 3) for c in op.target_position)}")

traj, final = execute_plan(ops, task.scene)
print(f"{len(traj)} control steps, {traj.times()[-1]:.2f} s simulated")
for cube in sorted(final.movables(), key=lambda o: o.position[2]):
    print(f"  {cube.name} at z = {cube.position[2]:.3f}")

print(validate_stacking(plan, task.scene).dumps())
