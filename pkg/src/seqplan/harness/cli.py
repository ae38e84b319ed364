"""Command line entry point: ``seqplan <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

from ..decoder import Dictionary, Plan, parse_pipe_plan, parse_plan
from ..errors import SeqPlanError
from ..executor import execute_plan
from ..matcher import match_objects
from ..planners import PipeLayout, PipeTaskSpec, route_pipes
from ..validators import validate_hanoi, validate_pipe_layout, validate_stacking
from ..world import Scene
from .backends import oracle_plan, parse_backend
from .llm import EndpointConfig
from .render import export_layout, load_layout, render_svg
from .tasks import HanoiTask, StackingTask, load_task, task_dictionary
from .trials import TABLE_HEADER, classify, run_trials


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _loose_dictionary(text: str) -> Dictionary:
    tokens = {t for t in re.findall(r"\[([^\[\]]+)\]", text)}
    d = Dictionary()
    return Dictionary(d.actions, frozenset(t for t in tokens if not d.has_action(t)))


def _read_plan(path: Path, dictionary: Dictionary | None) -> Plan:
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return Plan.from_json(json.loads(text))
    return parse_plan(text, dictionary or _loose_dictionary(text))


def cmd_decode(args) -> int:
    text = Path(args.transcript).read_text(encoding="utf-8")
    if args.pipe:
        _emit([s.to_json() for s in parse_pipe_plan(text)])
        return 0
    if args.task:
        dictionary = task_dictionary(load_task(args.task))
    elif args.objects:
        dictionary = Dictionary.with_objects(args.objects.split(","))
    else:
        dictionary = _loose_dictionary(text)
    _emit(parse_plan(text, dictionary).to_json())
    return 0


def cmd_plan(args) -> int:
    task = load_task(args.task)
    if isinstance(task, PipeTaskSpec):
        layout, total = route_pipes(task)
        if args.output:
            j, s = export_layout(layout, task, args.output)
            print(f"wrote {j} and {s}", file=sys.stderr)
        _emit({"total_length": total, "segments": layout.to_json()})
    else:
        _emit(oracle_plan(task).to_json())
    return 0


def cmd_validate(args) -> int:
    task = load_task(args.task)
    path = Path(args.input)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        data = json.loads(text)
        if isinstance(task, PipeTaskSpec):
            segs = data["segments"] if isinstance(data, dict) else data
            verdict = validate_pipe_layout(PipeLayout.from_json(segs), task)
        else:
            plan = Plan.from_json(data)
            if isinstance(task, StackingTask):
                verdict = validate_stacking(plan, task.scene)
            else:
                assert isinstance(task, HanoiTask)
                verdict = validate_hanoi(plan, task.n, task.pegs, task.source, task.target, task.disks)
    else:
        verdict = classify(task, text)
    _emit(verdict.to_json())
    return 0 if verdict.success else 1


def cmd_simulate(args) -> int:
    scene = Scene.load(args.scene)
    dictionary = Dictionary.with_objects(o.label for o in scene.objects)
    plan = _read_plan(Path(args.plan), dictionary)
    ops = match_objects(plan, scene, dictionary)
    traj, final = execute_plan(ops, scene)
    if args.csv:
        traj.to_csv(args.csv)
        print(f"wrote {len(traj)} samples to {args.csv}", file=sys.stderr)
    _emit(final.to_json())
    return 0


def cmd_trials(args) -> int:
    task = load_task(args.task)
    cfg = {}
    if args.config:
        cfg.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
    for key in ("base_url", "model", "temperature"):
        if getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    backend = parse_backend(args.backend, EndpointConfig.from_json(cfg))
    report = run_trials(task, backend, args.n, workers=args.workers, simulate=args.simulate)
    if args.output:
        Path(args.output).write_text(report.dumps(), encoding="utf-8")
    print(TABLE_HEADER, file=sys.stderr)
    print(report.table_row(), file=sys.stderr)
    _emit({k: v for k, v in report.to_json().items() if k != "trials"})
    return 0 if not report.incomplete else 2


def cmd_render(args) -> int:
    layout, spec = load_layout(args.layout)
    out = Path(args.output) if args.output else Path(args.layout).with_suffix(".svg")
    tree = ET.ElementTree(render_svg(layout, spec))
    ET.indent(tree)
    tree.write(out, encoding="utf-8", xml_declaration=True)
    print(str(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="seqplan", description="Assembly sequence planning toolkit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decode", help="parse a reply transcript into plan JSON")
    p.add_argument("transcript")
    p.add_argument("--task", help="task file supplying the object dictionary")
    p.add_argument("--objects", help="comma-separated object dictionary")
    p.add_argument("--pipe", action="store_true", help="use the pipe placement grammar")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("plan", help="run the reference planner on a task")
    p.add_argument("task")
    p.add_argument("-o", "--output", help="layout JSON path (pipe tasks; an SVG is written alongside)")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("validate", help="classify a plan, layout or transcript against a task")
    p.add_argument("input")
    p.add_argument("task")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="execute a plan in a scene")
    p.add_argument("plan")
    p.add_argument("scene")
    p.add_argument("--csv", help="trajectory CSV output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("trials", help="run repeated trials with a planner backend")
    p.add_argument("task")
    p.add_argument("--backend", default="oracle", help="oracle | corpus:PATH | llm | noisy:RATE:SEED[:MUTATOR]")
    p.add_argument("-n", type=int, default=20)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--simulate", action="store_true", help="also execute object-task plans")
    p.add_argument("--config", help="JSON endpoint config for the llm backend")
    p.add_argument("--base-url", dest="base_url")
    p.add_argument("--model")
    p.add_argument("--temperature", type=float)
    p.add_argument("-o", "--output", help="full report JSON path")
    p.set_defaults(func=cmd_trials)

    p = sub.add_parser("render", help="draw a layout JSON as SVG")
    p.add_argument("layout")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (SeqPlanError, ValueError, KeyError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
