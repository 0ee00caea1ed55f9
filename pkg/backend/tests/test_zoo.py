"""Built-in algorithms, FSM documents and the flood-max positive control."""

import copy

import networkx as nx
import numpy as np
import pytest

from syncsmith.core.engine import check_mod_p_sync, execute
from syncsmith.core.graphs import DirectedGraph, diffusive_schedule, static_dynamic_graph
from syncsmith.core.zoo import list_zoo, load_fsm, load_fsm_file, resolve_builtin
from syncsmith.exceptions import (
    ClockRange,
    InvalidParameterError,
    PartialTable,
    SchemaError,
    Unenumerable,
    UnknownState,
)

SATURATING = {
    "name": "parity-of-crowd",
    "states": ["a", "b"],
    "initial": ["a"],
    "P": 2,
    "clock": {"a": 0, "b": 1},
    "message": {"a": "x", "b": "x"},
    "mode": {"saturating": 2},
    "delta": [
        {"state": "a", "recv": {"x": 1}, "next": "a"},
        {"state": "a", "recv": {"x": "≥2"}, "next": "b"},
        {"state": "b", "recv": {"x": 1}, "next": "b"},
        {"state": "b", "recv": {"x": ">=2"}, "next": "a"},
    ],
}


# =============================================================================
# built-ins
# =============================================================================

def test_mod_p_max_transition():
    alg = resolve_builtin("modmax:3")
    assert alg.transition(1, [0, 1, 1]) == 2
    assert alg.transition(2, [2]) == 0
    assert alg.state_count == 3
    assert alg.clock_of(2) == 2


def test_flood_max_transition(floodmax):
    assert floodmax.transition(3, [3, 5]) == 6
    assert floodmax.transition(7, [7]) == 8
    assert floodmax.clock_of(9) == 1
    assert not floodmax.is_enumerable
    assert floodmax.parse_state("12") == 12
    with pytest.raises(UnknownState):
        floodmax.parse_state("-1")


def test_flood_max_is_not_enumerable(floodmax):
    with pytest.raises(Unenumerable):
        floodmax.require_enumerable()


def test_constant_keeps_state(constant2):
    assert constant2.transition(1, [0, 0, 1]) == 1


def test_empty_multiset_rejected(modmax2):
    with pytest.raises(InvalidParameterError):
        modmax2.transition(0, [])


@pytest.mark.parametrize("spec, name", [("modmax:2", "modmax:2"), ("floodmax", "floodmax:4"),
                                        ("floodmax:6", "floodmax:6"), ("constant:3", "constant:3")])
def test_resolve_builtin(spec, name):
    assert resolve_builtin(spec).name == name


@pytest.mark.parametrize("spec", ["modmax", "modmax:x", "modmax:1", "nosuch:2"])
def test_resolve_builtin_rejects(spec):
    with pytest.raises(InvalidParameterError):
        resolve_builtin(spec)


def test_list_zoo():
    table = list_zoo()
    assert list(table.columns) == ["name", "enumerable", "states", "description"]
    assert len(table) == 3
    assert table.set_index("name").loc["floodmax[:P]", "states"] == "unbounded"


# =============================================================================
# FSM documents
# =============================================================================

def test_fsm_matches_builtin(fsm_document, modmax2):
    alg = load_fsm(fsm_document)
    assert alg.state_count == 2
    for state in (0, 1):
        for bag in ([0], [1], [0, 1], [0, 0, 1], [1, 1]):
            expected = modmax2.transition(state, bag)
            assert alg.transition(str(state), [str(m) for m in bag]) == str(expected)


def test_fsm_file_takes_name_from_stem(fsm_path, tmp_path):
    assert load_fsm_file(fsm_path).name == "modmax2"
    anonymous = tmp_path / "anon.json"
    text = fsm_path.read_text(encoding="utf-8").replace('"name": "modmax2",', "")
    anonymous.write_text(text, encoding="utf-8")
    assert load_fsm_file(anonymous).name == "anon"


def test_fsm_missing_row(fsm_document):
    fsm_document["delta"].pop()
    with pytest.raises(PartialTable):
        load_fsm(fsm_document)


def test_fsm_clock_out_of_range(fsm_document):
    fsm_document["clock"]["1"] = 2
    with pytest.raises(ClockRange):
        load_fsm(fsm_document)


def test_fsm_schema_errors(fsm_document):
    broken = copy.deepcopy(fsm_document)
    del broken["P"]
    with pytest.raises(SchemaError):
        load_fsm(broken)

    unknown = copy.deepcopy(fsm_document)
    unknown["initial"] = ["7"]
    with pytest.raises(SchemaError):
        load_fsm(unknown)

    conflicting = copy.deepcopy(fsm_document)
    conflicting["delta"].append({"state": "0", "recv": {"0": 1}, "next": "0"})
    with pytest.raises(SchemaError):
        load_fsm(conflicting)


def test_fsm_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError):
        load_fsm_file(path)


def test_fsm_file_not_utf8(tmp_path):
    path = tmp_path / "binary.json"
    path.write_bytes(b"\xff\xfe{")
    with pytest.raises(SchemaError):
        load_fsm_file(path)


def test_saturating_counts():
    alg = load_fsm(SATURATING)
    assert alg.transition("a", ["x"]) == "a"
    assert alg.transition("a", ["x", "x"]) == "b"
    assert alg.transition("a", ["x", "x", "x", "x", "x"]) == "b"
    assert alg.transition("b", ["x", "x", "x"]) == "a"


def test_saturating_count_above_cap():
    doc = copy.deepcopy(SATURATING)
    doc["delta"][0]["recv"] = {"x": 3}
    with pytest.raises(SchemaError):
        load_fsm(doc)


# =============================================================================
# flood-max positive control
# =============================================================================

def _random_strongly_connected(rng: np.random.Generator) -> DirectedGraph:
    n = int(rng.integers(2, 21))
    order = rng.permutation(n).tolist()
    arcs = {(order[k], order[(k + 1) % n]) for k in range(n)}
    extra = rng.random((n, n)) < 0.15
    arcs |= {(i, j) for i in range(n) for j in range(n) if extra[i, j] and i != j}
    return DirectedGraph(n, frozenset(arcs))


def test_flood_max_synchronizes_on_strongly_connected_graphs(floodmax):
    rng = np.random.default_rng(7)
    P = floodmax.period
    for _ in range(200):
        digraph = _random_strongly_connected(rng)
        n = digraph.n
        assert digraph.is_strongly_connected()
        schedule = diffusive_schedule(digraph, rng.integers(1, 8, n).tolist())
        graph = static_dynamic_graph(digraph, schedule)
        diameter = nx.diameter(digraph.to_networkx())
        settle = schedule.last_start + diameter
        horizon = settle + 2 * P * n + 5

        trace = execute(floodmax, graph, [0] * n, horizon=horizon)
        verdict = check_mod_p_sync(trace, min_suffix=2 * P * n)
        assert verdict.synchronized
        assert verdict.t0 <= settle
