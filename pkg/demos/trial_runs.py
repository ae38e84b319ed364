"""
Scoring planners over repeated trials
=====================================

The same table for a perfect planner and for noisy ones. Pass
``llm`` on the command line (with LLM_API_KEY set) to score a live model.
"""

import sys

from seqplan.harness import NoisyOracle, OracleBackend, RemoteLLM, run_trials
from seqplan.harness.tasks import BUNDLED_PIPE_TASKS, bundled_task
from seqplan.harness.trials import TABLE_HEADER

backends = [OracleBackend(), NoisyOracle(0.3, seed=1, mutator="jitter"), NoisyOracle(0.5, seed=2, mutator="detour")]
if "llm" in sys.argv[1:]:
    backends.append(RemoteLLM())

for backend in backends:
    print(f"\n{backend.name}")
    print(TABLE_HEADER)
    for name in BUNDLED_PIPE_TASKS:
        report = run_trials(bundled_task(name), backend, 20, workers=4)
        family = "avoid" if "avoid" in name else "pass"
        short = {"constant": "const", "variable": "var"}[report.condition]
        print(report.table_row(f"{family}/{short}"))
