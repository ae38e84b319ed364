"""
Tower of Hanoi: reference plan versus a stored reply
====================================================
"""

from seqplan import parse_plan, plan_hanoi, validate_hanoi
from seqplan.harness.tasks import bundled_task, read_data, task_dictionary

task = bundled_task("hanoi")

# the recursive solver needs 2^n - 1 moves
best = plan_hanoi(task.n, task.source, task.target, task.aux, task.disks)
print(len(best), "moves")
print(validate_hanoi(best, task.n).outcome.value)

# a stored reply replays until its first illegal move
reply = parse_plan(read_data("hanoi_reply.txt"), task_dictionary(task))
verdict = validate_hanoi(reply, task.n, task.pegs, task.source, task.target, task.disks)
print(verdict.outcome.value, [(r.code, r.detail) for r in verdict.reasons])

# where the two sequences part ways
for ours, theirs in zip(best, reply):
    if ours != theirs:
        print("reference:", ours.render())
        print("reply:    ", theirs.render())
        break
