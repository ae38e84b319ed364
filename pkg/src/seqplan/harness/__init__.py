"""Prompts, planner back ends, trial running and layout rendering."""

from .backends import NoisyOracle, OracleBackend, PlannerBackend, RemoteLLM, TranscriptCorpus, parse_backend
from .llm import EndpointConfig, llm_complete
from .prompts import PromptBundle, build_prompt
from .render import export_layout, load_layout, render_svg
from .tasks import HanoiTask, StackingTask, bundled_task, load_task
from .trials import TrialReport, classify, run_trials
