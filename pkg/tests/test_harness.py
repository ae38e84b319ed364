import json
import logging
import socket
import xml.etree.ElementTree as ET

import pytest

from seqplan.errors import EmptyCompletion, HttpError, LLMTimeout, UnknownTaskFamily
from seqplan.harness import (
    EndpointConfig, NoisyOracle, OracleBackend, RemoteLLM, TranscriptCorpus, build_prompt, bundled_task,
    classify, export_layout, llm_complete, load_layout, parse_backend, run_trials,
)
from seqplan.harness.cli import main
from seqplan.harness.prompts import PRINCIPLES, PromptBundle
from seqplan.harness.tasks import BUNDLED_PIPE_TASKS, data_path, load_task, read_data
from seqplan.harness.trials import TABLE_HEADER, TrialReport
from seqplan.planners import PipeLayout, PipeTaskSpec, route_pipes
from seqplan.validators import Outcome, layout_gaps, validate_pipe_layout
from seqplan.world import Segment, segment_contains_point

FAST = dict(backoff=0.01, timeout=5, deadline=30)


# -- prompts


def test_system_text_carries_the_principles():
    bundle = build_prompt(bundled_task("stacking"))
    for p in PRINCIPLES:
        assert p in bundle.system_text
    assert bundle.messages()[0]["role"] == "system" and bundle.messages()[1]["role"] == "user"


def test_object_prompts_match_fixtures():
    assert build_prompt(bundled_task("stacking")).user_text == read_data("stacking_prompt.txt").strip()
    hanoi = build_prompt(bundled_task("hanoi")).user_text
    fixture = read_data("hanoi_prompt.txt").strip()
    first, last = fixture.split(". ", 1)
    assert hanoi.startswith(first + ".") and hanoi.endswith(last)


def test_pass_points_variable_prompt_is_verbatim():
    assert build_prompt(bundled_task("pass_points_variable")).user_text == read_data("pipe_prompt_variable.txt").strip()


def test_avoid_obstacles_prompt_phrases():
    text = build_prompt(bundled_task("avoid_obstacles_constant")).user_text
    fixture = read_data("pipe_prompt_constant.txt")
    example = "pipe 2ft #1 (5, 5, 2) z axis, pipe 2ft #2 (5, 5, 4) z axis, pipe 2ft #3 (5, 7, 4) y axis"
    assert example in text and example in fixture
    obstacle = "There are two obstacles at point (5, 5, 5) and point (5, 7, 5)"
    assert obstacle in text and obstacle in fixture
    assert "(pipe 3ft)" not in text  # the constant condition offers one length only


def test_unknown_family():
    with pytest.raises(UnknownTaskFamily):
        build_prompt(object())


# -- chat-completion client


def test_echo_is_byte_identical(stub_llm, monkeypatch):
    monkeypatch.setenv("LLM_API_KEY", "sk-test")
    stub = stub_llm([(200, None)])
    bundle = PromptBundle("sys", "Move [Ä] to (1, 2, 3).\n  trailing  ")
    cfg = EndpointConfig(base_url=stub.base_url, model="m", temperature=0.2, **FAST)
    assert llm_complete(bundle, cfg) == bundle.user_text
    req = stub.requests[0]
    assert req["path"] == "/v1/chat/completions"
    assert req["headers"]["Authorization"] == "Bearer sk-test"
    assert req["body"] == {"model": "m", "messages": bundle.messages(), "temperature": 0.2}


def test_retries_server_errors_then_succeeds(stub_llm, caplog):
    stub = stub_llm([(500, "boom")] * 3 + [(200, "ok")])
    cfg = EndpointConfig(base_url=stub.base_url, max_retries=4, **FAST)
    with caplog.at_level(logging.WARNING, logger="seqplan.harness.llm"):
        assert llm_complete(PromptBundle("s", "u"), cfg) == "ok"
    assert len(stub.requests) == 4
    assert sum("HTTP 500" in r.getMessage() for r in caplog.records) == 3


def test_retries_exhausted_reraises_last_status(stub_llm):
    stub = stub_llm([(503, "busy")])
    cfg = EndpointConfig(base_url=stub.base_url, max_retries=2, **FAST)
    with pytest.raises(HttpError) as info:
        llm_complete(PromptBundle("s", "u"), cfg)
    assert info.value.status == 503 and len(stub.requests) == 3


def test_client_error_is_not_retried(stub_llm):
    stub = stub_llm([(401, "nope")])
    with pytest.raises(HttpError):
        llm_complete(PromptBundle("s", "u"), EndpointConfig(base_url=stub.base_url, **FAST))
    assert len(stub.requests) == 1


def test_malformed_payload(stub_llm):
    stub = stub_llm([(200, {"choices": []})])
    with pytest.raises(EmptyCompletion):
        llm_complete(PromptBundle("s", "u"), EndpointConfig(base_url=stub.base_url, **FAST))


def test_unreachable_endpoint_times_out():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    cfg = EndpointConfig(base_url=f"http://127.0.0.1:{port}/v1", max_retries=1, **FAST)
    with pytest.raises(LLMTimeout):
        llm_complete(PromptBundle("s", "u"), cfg)


def test_endpoint_config_from_json_ignores_unknown_keys():
    cfg = EndpointConfig.from_json({"base_url": "http://x/v1/", "model": "m", "colour": "blue"})
    assert cfg.url == "http://x/v1/chat/completions" and cfg.model == "m"


# -- back ends and trials


@pytest.mark.parametrize("name", BUNDLED_PIPE_TASKS)
def test_oracle_trials_are_all_optimal(name):
    report = run_trials(bundled_task(name), OracleBackend(), 20)
    assert report.counts() == {"success_optimal": 20, "success_suboptimal": 0, "fail": 0, "total": 20}
    assert report.optimal_ratio == 1.0 and report.failed_ratio == 0.0


@pytest.mark.parametrize("name", BUNDLED_PIPE_TASKS + ("stacking", "hanoi"))
def test_noisy_delete_always_fails(name):
    report = run_trials(bundled_task(name), NoisyOracle(1.0, seed=3, mutator="delete"), 20)
    assert report.fail == report.total == 20 and report.failed_ratio == 1.0


def test_jitter_produces_gaps_or_axis_errors():
    task = bundled_task("avoid_obstacles_constant")
    report = run_trials(task, NoisyOracle(1.0, seed=1, mutator="jitter"), 10)
    assert report.fail == 10
    assert all(set(v.codes) & {"NotAxisParallel", "DisallowedLength", "ObstacleHit"} for v in report.verdicts)


@pytest.mark.parametrize("name", BUNDLED_PIPE_TASKS + ("hanoi", "stacking"))
def test_detour_is_suboptimal(name):
    report = run_trials(bundled_task(name), NoisyOracle(1.0, seed=2, mutator="detour"), 10)
    assert report.success_suboptimal == 10, [v.codes for v in report.verdicts]


def test_counts_identity_and_determinism():
    task = bundled_task("pass_points_variable")
    backend = NoisyOracle(0.5, seed=9, mutator="swap")
    a = run_trials(task, backend, 20)
    b = run_trials(task, backend, 20, workers=4)
    assert a.to_json() == b.to_json()
    c = a.counts()
    assert c["success_optimal"] + c["success_suboptimal"] + c["fail"] == c["total"] == 20
    assert 0 < a.fail < 20


def test_corpus_backend_replays_transcripts(tmp_path):
    task = bundled_task("hanoi")
    report = run_trials(task, TranscriptCorpus(data_path("hanoi_reply.txt")), 3)
    assert [v.codes for v in report.verdicts] == [["LargerOnSmaller"]] * 3
    (tmp_path / "c.json").write_text(json.dumps(["nothing useful", read_data("stacking_reply.txt")]),
                                     encoding="utf-8")
    report = run_trials(bundled_task("stacking"), TranscriptCorpus(tmp_path / "c.json"), 4, simulate=True)
    assert [v.outcome for v in report.verdicts] == [Outcome.FAIL, Outcome.SUCCESS_OPTIMAL] * 2
    assert report.verdicts[0].codes == ["DecodeError"]


def test_remote_backend_failure_marks_report_incomplete(stub_llm):
    task = bundled_task("hanoi")
    good = OracleBackend().transcript(task, 0)
    stub = stub_llm([(200, good), (200, good), (400, "bad request")])
    backend = RemoteLLM(EndpointConfig(base_url=stub.base_url, **FAST))
    report = run_trials(task, backend, 5)
    assert report.incomplete and report.total == 2 and report.success_optimal == 2
    assert "400" in report.error


def test_parse_backend():
    assert isinstance(parse_backend("oracle"), OracleBackend)
    noisy = parse_backend("noisy:0.25:7:detour")
    assert (noisy.error_rate, noisy.seed, noisy.mutator) == (0.25, 7, "detour")
    assert isinstance(parse_backend("llm"), RemoteLLM)
    with pytest.raises(ValueError):
        parse_backend("magic")
    with pytest.raises(ValueError):
        NoisyOracle(1.5)


def test_report_schema():
    report = run_trials(bundled_task("stacking"), OracleBackend(), 2)
    data = report.to_json()
    assert set(data) >= {"task", "backend", "counts", "ratios", "trials", "incomplete"}
    assert len(report.table_row().split()) == len(TABLE_HEADER.split()) + 1  # plus the row label
    assert TrialReport("t", "b").failed_ratio == 0.0


def test_classify_decode_error_for_pipes():
    v = classify(bundled_task("avoid_obstacles_constant"), "I cannot help with that.")
    assert v.codes == ["DecodeError"]


# -- rendering


def _invert(svg_root, layout):
    """Rebuild 3D pipe endpoints from the XY and XZ panels of a rendered drawing."""
    ns = {"s": "http://www.w3.org/2000/svg"}
    room = int(svg_root.get("data-room"))
    panels = {g.get("data-plane"): g for g in svg_root.findall("s:g", ns)}

    def points(plane):
        g = panels[plane]
        ox, oy = map(float, g.get("data-origin").split(","))
        s = float(g.get("data-scale"))
        out = {}
        for line in g.findall("s:line[@class='pipe']", ns):
            ends = [((float(line.get(f"x{k}")) - ox) / s, room - (float(line.get(f"y{k}")) - oy) / s)
                    for k in (1, 2)]
            out[int(line.get("data-index"))] = ends
        return out

    xy, xz = points("XY"), points("XZ")
    segs = []
    for i in range(len(layout)):
        a = tuple(round(v) for v in (xy[i][0][0], xy[i][0][1], xz[i][0][1]))
        b = tuple(round(v) for v in (xy[i][1][0], xy[i][1][1], xz[i][1][1]))
        assert xy[i][0][0] == pytest.approx(xz[i][0][0])
        segs.append(Segment(a, b))
    return segs


@pytest.mark.parametrize("name", BUNDLED_PIPE_TASKS)
def test_svg_geometry_inverts_to_layout(name, tmp_path):
    spec = bundled_task(name)
    layout, _ = route_pipes(spec)
    _, svg = export_layout(layout, spec, tmp_path / "l.json")
    segs = _invert(ET.parse(svg).getroot(), layout)
    assert segs == [p.segment for p in layout]
    for o in spec.obstacles:
        assert not any(segment_contains_point(s, o) for s in segs)


def test_gap_fixture_highlights(tmp_path):
    data = json.loads(read_data("gap_layout.json"))
    spec, layout = PipeTaskSpec.from_json(data), PipeLayout.from_json(data["segments"])
    j, s = export_layout(layout, spec, tmp_path / "gap.json")
    root = ET.parse(s).getroot()
    ns = {"s": "http://www.w3.org/2000/svg"}
    gaps = validate_pipe_layout(layout, spec).codes.count("GapBetweenSegments")
    for g in root.findall("s:g", ns):
        assert len(g.findall("s:circle[@class='gap']", ns)) == gaps == 2
    marked = {(c.get("data-from"), c.get("data-to")) for c in root.iter(f"{{{ns['s']}}}circle") if c.get("data-from")}
    assert marked == {(",".join(map(str, a)), ",".join(map(str, b))) for a, b in layout_gaps(layout)}
    assert len(root.findall(".//s:rect[@class='obstacle']", ns)) == 3 * len(spec.obstacles)


def test_empty_layout_renders(tmp_path):
    spec = bundled_task("avoid_obstacles_constant")
    _, svg = export_layout(PipeLayout(), spec, tmp_path / "empty.json")
    root = ET.parse(svg).getroot()
    assert root.tag.endswith("svg") and not root.findall(".//{http://www.w3.org/2000/svg}line")


@pytest.mark.parametrize("name", BUNDLED_PIPE_TASKS)
def test_layout_file_roundtrip(name, tmp_path):
    spec = bundled_task(name)
    layout, _ = route_pipes(spec)
    j, _ = export_layout(layout, spec, tmp_path / "l.json")
    assert load_layout(j) == (layout, spec)


# -- command line


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_decode(capsys):
    code, out, _ = _run(capsys, "decode", data_path("stacking_reply.txt"), "--task", data_path("tasks/stacking.json"))
    steps = json.loads(out)
    assert code == 0 and len(steps) == 5 and steps[1]["target"] == {"kind": "on_top_of", "value": "A"}
    code, out, _ = _run(capsys, "decode", data_path("hanoi_reply.txt"))
    assert code == 0 and len(json.loads(out)) == 31


def test_cli_decode_pipe(capsys, tmp_path):
    path = tmp_path / "reply.txt"
    path.write_text("pipe 2ft #1 (5, 5, 2) z axis, pipe 2ft #2 (5, 5, 4) z axis", encoding="utf-8")
    code, out, _ = _run(capsys, "decode", path, "--pipe")
    assert code == 0 and [s["head"] for s in json.loads(out)] == [[5, 5, 2], [5, 5, 4]]


def test_cli_plan_validate_render(capsys, tmp_path):
    task = data_path("tasks/avoid_obstacles_constant.json")
    code, out, _ = _run(capsys, "plan", task, "-o", tmp_path / "layout.json")
    assert code == 0 and json.loads(out)["total_length"] == 14
    assert (tmp_path / "layout.svg").exists()
    code, out, _ = _run(capsys, "validate", tmp_path / "layout.json", task)
    assert code == 0 and json.loads(out)["outcome"] == "SuccessOptimal"
    code, out, _ = _run(capsys, "render", tmp_path / "layout.json", "-o", tmp_path / "again.svg")
    assert code == 0 and (tmp_path / "again.svg").exists()
    code, out, _ = _run(capsys, "validate", data_path("gap_layout.json"), task)
    assert code == 1 and "GapBetweenSegments" in out


def test_cli_validate_transcripts(capsys):
    code, out, _ = _run(capsys, "validate", data_path("hanoi_reply.txt"), data_path("tasks/hanoi.json"))
    assert code == 1 and json.loads(out)["reasons"][0]["code"] == "LargerOnSmaller"
    code, out, _ = _run(capsys, "validate", data_path("stacking_reply.txt"), data_path("tasks/stacking.json"))
    assert code == 0 and json.loads(out)["outcome"] == "SuccessOptimal"


def test_cli_plan_object_task(capsys):
    code, out, _ = _run(capsys, "plan", data_path("tasks/hanoi.json"))
    assert code == 0 and len(json.loads(out)) == 31


def test_cli_simulate(capsys, tmp_path):
    task = load_task(data_path("tasks/stacking.json"))
    task.scene.save(tmp_path / "scene.json")
    code, out, _ = _run(capsys, "simulate", data_path("stacking_reply.txt"), tmp_path / "scene.json",
                        "--csv", tmp_path / "t.csv")
    final = json.loads(out)
    assert code == 0 and (tmp_path / "t.csv").read_text(encoding="utf-8").startswith("t,x,y,z")
    zs = sorted(o["position"][2] for o in final["objects"] if o["kind"] == "cube")
    assert zs[-1] > zs[0]


def test_cli_trials(capsys, tmp_path):
    code, out, err = _run(capsys, "trials", data_path("tasks/pass_points_constant.json"),
                          "--backend", "noisy:1.0:0:delete", "-n", "5", "-o", tmp_path / "r.json")
    summary = json.loads(out)
    assert code == 0 and summary["counts"]["fail"] == 5 and "Optimal/Total" in err
    assert len(json.loads((tmp_path / "r.json").read_text(encoding="utf-8"))["trials"]) == 5


def test_cli_reports_errors(capsys, tmp_path):
    code, _, err = _run(capsys, "plan", tmp_path / "missing.json")
    assert code == 1 and "error" in err
