"""
Spotting disconnected pipes
===========================

A layout whose neighbouring pipes stop one grid step short of each other.
The joints agree in two coordinates, so the error is easy to miss by eye.
"""

import json
import sys
from pathlib import Path

from seqplan import PipeLayout, PipeTaskSpec, validate_pipe_layout
from seqplan.harness import export_layout
from seqplan.harness.tasks import read_data
from seqplan.validators import layout_gaps

data = json.loads(read_data("gap_layout.json"))
spec = PipeTaskSpec.from_json(data)
layout = PipeLayout.from_json(data["segments"])

for a, b in layout_gaps(layout):
    print("gap", a, "->", b)

verdict = validate_pipe_layout(layout, spec)
print(verdict.outcome.value)
for r in verdict.reasons:
    print(" ", r.code, r.detail)

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)
_, svg = export_layout(layout, spec, out / "gap_layout.json")
print("gaps circled in", svg)
