"""Command-line surface: subcommands, outputs and exit codes."""

import json

import pytest
from loguru import logger

import syncsmith.main as cli
from syncsmith.config import ExitCode
from syncsmith.exceptions import PredictionMismatch
from syncsmith.main import main


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    logger.remove()


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


# =============================================================================
# forge
# =============================================================================

def test_forge_directed_ring_to_file(tmp_path):
    out = tmp_path / "r.json"
    code = main(["forge", "--theorem", "1", "--builtin", "modmax:2", "--q0", "0", "--q1", "0", "--out", str(out)])
    assert code == ExitCode.OK
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["certificate"] == {"L": 3, "ell": 1}
    assert report["theorem"] == "T1"
    assert report["verdict"]["outcome"] == "NOT_SYNCHRONIZED"


def test_forge_two_group_to_stdout(capsys):
    code = main(["forge", "--theorem", "T4", "--builtin", "modmax:2", "--q00", "0", "--kmax", "8"])
    assert code == ExitCode.OK
    report = _stdout_json(capsys)
    assert report["graph"]["n"] == 4
    assert report["schedule"] == [2, 3, 2, 3]


def test_forge_from_fsm_file(fsm_path, capsys):
    code = main(["forge", "--theorem", "2", "--fsm", str(fsm_path), "--p0", "0", "--q0", "0", "--q1", "1"])
    assert code == ExitCode.OK
    assert _stdout_json(capsys)["algorithm"] == "modmax2"


def test_forge_time_bound_ring(capsys):
    code = main(["forge", "--theorem", "3", "--builtin", "modmax:3", "--q0", "0", "--q1", "0", "--n", "10"])
    assert code == ExitCode.OK
    assert _stdout_json(capsys)["horizon"] == 14


def test_forge_all_seeds(capsys):
    code = main(["forge", "--theorem", "1", "--builtin", "modmax:2", "--all-seeds", "--periods", "4"])
    assert code == ExitCode.OK
    reports = _stdout_json(capsys)
    assert [r["seeds"] for r in reports] == [
        {"q0": "0", "q1": "0"}, {"q0": "0", "q1": "1"}, {"q0": "1", "q1": "0"}, {"q0": "1", "q1": "1"},
    ]


def test_forge_emits_trace(tmp_path):
    trace = tmp_path / "trace.jsonl"
    code = main(["forge", "--theorem", "1", "--builtin", "modmax:2", "--q0", "0", "--q1", "0",
                 "--out", str(tmp_path / "r.json"), "--emit-trace", str(trace)])
    assert code == ExitCode.OK
    lines = trace.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 61
    assert json.loads(lines[0]) == {"t": 0, "states": ["0", "1", "0"], "clocks": [0, 1, 0]}


def test_forge_all_seeds_rejects_single_trace(tmp_path):
    code = main(["forge", "--theorem", "1", "--builtin", "modmax:2", "--all-seeds",
                 "--emit-trace", str(tmp_path / "t.jsonl")])
    assert code == ExitCode.USAGE
    assert not (tmp_path / "t.jsonl").exists()


def test_forge_reports_are_byte_identical(tmp_path):
    args = ["forge", "--theorem", "4", "--builtin", "modmax:3", "--q00", "1"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(first)]) == ExitCode.OK
    assert main(args + ["--out", str(second)]) == ExitCode.OK
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.parametrize("argv", [
    ["forge", "--theorem", "1", "--builtin", "modmax:2", "--q0", "0"],
    ["forge", "--theorem", "1", "--q0", "0", "--q1", "0"],
    ["forge", "--theorem", "5", "--builtin", "modmax:2"],
    ["forge", "--theorem", "1", "--builtin", "modmax:2", "--q0", "0", "--q1", "7"],
    ["forge", "--theorem", "1", "--builtin", "floodmax", "--q0", "0", "--q1", "0"],
    ["forge", "--theorem", "3", "--builtin", "modmax:2", "--q0", "0", "--q1", "0"],
    ["bounds", "--n", "3"],
    ["bogus"],
])
def test_usage_errors(argv):
    assert main(argv) == ExitCode.USAGE


def test_prediction_mismatch_exit_code(monkeypatch):
    def broken(*args, **kwargs):
        raise PredictionMismatch("T1", 0, 1, "0", "1")

    monkeypatch.setattr(cli, "forge", broken)
    code = main(["forge", "--theorem", "1", "--builtin", "modmax:2", "--q0", "0", "--q1", "0"])
    assert code == ExitCode.THEOREM_VIOLATION


# =============================================================================
# simulate
# =============================================================================

def test_simulate_flood_max_synchronizes(tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    code = main(["simulate", "--builtin", "floodmax", "--graph", "ring:directed:5", "--init", "uniform:0",
                 "--starts", "1,2,3,4,5", "--horizon", "40", "--out", str(trace)])
    assert code == ExitCode.OK
    verdict = _stdout_json(capsys)
    assert verdict["outcome"] == "SYNCHRONIZED"
    assert verdict["t0"] <= 9
    assert len(trace.read_text(encoding="utf-8").splitlines()) == 41


def test_simulate_diffusive_starts(capsys):
    code = main(["simulate", "--builtin", "floodmax", "--graph", "ring:directed:5", "--init", "uniform:0",
                 "--starts", "diffusive:1,9,9,9,9", "--horizon", "40"])
    assert code == ExitCode.OK
    assert _stdout_json(capsys)["t0"] == 4


def test_simulate_directed_ring_counterexample(capsys):
    code = main(["simulate", "--builtin", "modmax:2", "--graph", "ring:directed:3", "--init", "0,1,0",
                 "--horizon", "30"])
    assert code == ExitCode.NEGATIVE
    assert _stdout_json(capsys)["outcome"] == "NOT_SYNCHRONIZED"


def test_simulate_plot(tmp_path):
    png = tmp_path / "clocks.png"
    code = main(["simulate", "--builtin", "modmax:3", "--graph", "ring:bidir:4", "--init", "uniform:0",
                 "--horizon", "20", "--plot", str(png)])
    assert code in (ExitCode.OK, ExitCode.NEGATIVE)
    assert png.stat().st_size > 0


def test_simulate_self_stabilizing_flag(capsys):
    args = ["simulate", "--builtin", "floodmax", "--graph", "complete:3", "--init", "5,0,2", "--horizon", "20"]
    assert main(args) == ExitCode.USAGE
    capsys.readouterr()
    assert main(args + ["--self-stabilizing"]) == ExitCode.OK


@pytest.mark.parametrize("argv", [
    ["simulate", "--builtin", "modmax:2", "--graph", "ring:foo:3", "--init", "uniform:0", "--horizon", "5"],
    ["simulate", "--builtin", "modmax:2", "--graph", "ring:directed:3", "--init", "0,1", "--horizon", "5"],
    ["simulate", "--builtin", "modmax:2", "--graph", "ring:directed:3", "--init", "uniform:0",
     "--starts", "1,x,1", "--horizon", "5"],
    ["simulate", "--builtin", "modmax:2", "--graph", "ring:directed:3", "--init", "uniform:0",
     "--starts", "1,1,9", "--horizon", "5"],
])
def test_simulate_usage_errors(argv):
    assert main(argv) == ExitCode.USAGE


def test_simulate_missing_graph_file(tmp_path):
    code = main(["simulate", "--builtin", "modmax:2", "--graph", str(tmp_path / "missing.json"),
                 "--init", "uniform:0", "--horizon", "5"])
    assert code == ExitCode.IO


def test_simulate_missing_fsm_file(tmp_path):
    code = main(["simulate", "--fsm", str(tmp_path / "missing.json"), "--graph", "ring:directed:3",
                 "--init", "uniform:0", "--horizon", "5"])
    assert code == ExitCode.IO


# =============================================================================
# diameter, bounds, zoo
# =============================================================================

def test_diameter_of_directed_ring(capsys):
    assert main(["diameter", "--graph", "ring:directed:6"]) == ExitCode.OK
    assert capsys.readouterr().out.strip() == "5"


def test_diameter_of_two_group_schedule(capsys):
    assert main(["diameter", "--graph", "thm4:4", "--from-round", "6"]) == ExitCode.OK
    assert int(capsys.readouterr().out.strip()) <= 24


def test_diameter_of_disconnected_file(tmp_path, capsys):
    path = tmp_path / "apart.json"
    path.write_text(json.dumps({"n": 2, "period": [[[0, 0], [1, 1]]], "starts": [1, 1]}), encoding="utf-8")
    assert main(["diameter", "--graph", str(path), "--d-max", "5"]) == ExitCode.NEGATIVE
    assert capsys.readouterr().out.strip() == "none"


def test_bounds(capsys):
    assert main(["bounds", "--n", "19"]) == ExitCode.OK
    report = _stdout_json(capsys)
    assert report["dynamic_state_lb"] == 3
    assert report["self_stab_state_lb"] == 20
    assert report["self_stab_time_lb"] == 17


def test_zoo(capsys):
    assert main(["zoo"]) == ExitCode.OK
    out = capsys.readouterr().out
    assert "modmax:P" in out
    assert "floodmax[:P]" in out


def test_version():
    assert main(["--version"]) == ExitCode.OK


def test_undecodable_input_files(tmp_path):
    path = tmp_path / "binary.json"
    path.write_bytes(b"\xff\xfe{")
    assert main(["forge", "--theorem", "1", "--fsm", str(path), "--q0", "0", "--q1", "0"]) == ExitCode.USAGE
    assert main(["diameter", "--graph", str(path)]) == ExitCode.USAGE
