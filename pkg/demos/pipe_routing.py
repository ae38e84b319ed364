"""
Routing pipes around obstacles and through mandatory points
===========================================================

Shortest layouts on an 11 x 11 x 11 grid, drawn as three orthographic views.
"""

import sys
from pathlib import Path

from seqplan import route_pipes, validate_pipe_layout
from seqplan.decoder import parse_pipe_plan, render_pipe_plan
from seqplan.harness import export_layout
from seqplan.harness.tasks import BUNDLED_PIPE_TASKS, bundled_task

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

for name in BUNDLED_PIPE_TASKS:
    spec = bundled_task(name)
    layout, total = route_pipes(spec)
    print(f"{name}: {len(layout)} pipes, total {total} ft")
    print("  " + render_pipe_plan(layout.to_specs()))
    export_layout(layout, spec, out / f"{name}.json")

# the text form goes back through the decoder and validator
spec = bundled_task("avoid_obstacles_variable")
text = render_pipe_plan(route_pipes(spec)[0].to_specs())
print(validate_pipe_layout(parse_pipe_plan(text), spec).to_json())

# a straight riser runs through the obstacle at (5, 5, 5)
riser = parse_pipe_plan(", ".join(f"pipe 2ft #{k} (5, 5, {2 * k}) z axis" for k in range(1, 6)))
print(validate_pipe_layout(riser, bundled_task("avoid_obstacles_constant")).codes)
print("drawings in", out.resolve())
