from __future__ import annotations

import pytest
from hypothesis import given

from lpa_ugn.cohn import cohn_expand
from lpa_ugn.graph import Cycle, enumerate_cycles, is_acyclic, is_no_exit, make_graph
from lpa_ugn.library import cycle, line, rose
from lpa_ugn.oracles import oracle_path_count
from lpa_ugn.structure import (
    StructureError,
    classify_cancellation,
    classify_cancellation_cohn,
    count_paths_to_cycle,
    count_paths_to_sink,
)
from lpa_ugn.ugn import decide_ugn_leavitt

from strategies import graphs


def test_toeplitz_has_exit(load):
    rep = classify_cancellation(load("toeplitz"))
    assert not rep.no_exit and not rep.properties
    assert rep.exit_witness.cycle.edges == ("e",) and rep.exit_witness.exit_edge == "f"
    data = rep.to_json()
    assert data["properties"] == {
        "cancellation": False, "hermite": False, "stably_finite": False, "directly_finite": False,
    }
    assert data["exit_witness"]["recipe"]["x"] == ["w"]


@pytest.mark.parametrize("n", range(1, 7))
def test_cycle_is_laurent_matrix_ring(n):
    rep = classify_cancellation(cycle(n))
    assert rep.no_exit
    assert [(s.size, s.ring) for s in rep.summands] == [(n, "laurent")]


@pytest.mark.parametrize("n", range(1, 7))
def test_line_is_field_matrix_ring(n):
    rep = classify_cancellation(line(n))
    assert [(s.size, s.ring, s.anchor) for s in rep.summands] == [(n, "base_field", f"v{n}")]


def test_sink_counts():
    assert count_paths_to_sink(line(5), "v5") == 5
    assert count_paths_to_sink(make_graph(["v"], []), "v") == 1
    par = make_graph(["v", "w"], [("a", "v", "w"), ("b", "v", "w")])
    assert count_paths_to_sink(par, "w") == 3
    with pytest.raises(StructureError, match="not a sink"):
        count_paths_to_sink(line(3), "v2")
    with pytest.raises(StructureError, match="exit"):
        count_paths_to_sink(make_graph(["v", "w"], [("l", "v", "v"), ("f", "v", "w")]), "w")


def test_cycle_counts():
    c4 = cycle(4)
    (c,) = enumerate_cycles(c4)
    assert {count_paths_to_cycle(c4, c, b) for b in c.vertices} == {4}
    r1 = rose(1)
    assert count_paths_to_cycle(r1, enumerate_cycles(r1)[0]) == 1
    g = make_graph(["v1", "v2"], [("a", "v1", "v2"), ("l", "v2", "v2")])
    assert count_paths_to_cycle(g, enumerate_cycles(g)[0], "v2") == 2
    with pytest.raises(StructureError, match="not on the cycle"):
        count_paths_to_cycle(g, enumerate_cycles(g)[0], "v1")


def test_cohn_classification(load):
    assert classify_cancellation_cohn(line(4)).no_exit
    assert not classify_cancellation_cohn(rose(1)).no_exit
    assert not classify_cancellation_cohn(load("toeplitz")).no_exit


def test_mixed_no_exit_decomposition():
    # a line feeding a 2-cycle, plus a separate sink fed by two sources
    g = make_graph(
        ["a", "b", "c", "s", "t", "u"],
        [("ab", "a", "b"), ("bc", "b", "c"), ("cb", "c", "b"), ("su", "s", "u"), ("tu", "t", "u")],
    )
    rep = classify_cancellation(g)
    assert [(s.size, s.ring) for s in rep.summands] == [(3, "laurent"), (3, "base_field")]


def _check_counts_against_oracle(g):
    rep = classify_cancellation(g)
    if not rep.no_exit:
        return None
    for s in rep.summands:
        if s.ring == "base_field":
            assert s.size == oracle_path_count(g, s.anchor)
        else:
            c: Cycle = s.anchor
            per_base = {oracle_path_count(g, b, c) for b in c.vertices}
            assert per_base == {s.size}
    return rep


@given(graphs(max_vertices=5, max_edges=7))
def test_counts_match_path_oracle(g):
    _check_counts_against_oracle(g)


@given(graphs(max_vertices=5, max_edges=8))
def test_stably_finite_implies_ugn(g):
    assert classify_cancellation(g).no_exit == is_no_exit(g)
    if classify_cancellation(g).properties:
        assert decide_ugn_leavitt(g, with_witness=False).ugn


@given(graphs(max_vertices=5, max_edges=8))
def test_cohn_route_matches_acyclicity(g):
    assert classify_cancellation_cohn(g).no_exit == is_acyclic(g)
    assert is_no_exit(cohn_expand(g).expanded) == is_acyclic(g)


def test_toeplitz_separates_ugn_from_finiteness(load):
    t = load("toeplitz")
    assert decide_ugn_leavitt(t).ugn and not classify_cancellation(t).properties
