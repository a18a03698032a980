from __future__ import annotations

import pytest
from hypothesis import given

from lpa_ugn.cohn import CohnError, cohn_expand, decide_ugn_cohn
from lpa_ugn.graph import DirectedGraph, Edge, is_acyclic, is_no_exit, make_graph, source_cycles
from lpa_ugn.library import cycle, line, rose
from lpa_ugn.oracles import GraphFamilySpec, enumerate_graphs
from lpa_ugn.ugn import Source, SourceCycle, decide_ugn_leavitt
from lpa_ugn.verify import expansion

from strategies import graphs


def test_expand_rose2(load):
    f = cohn_expand(load("rose2")).expanded
    assert f.vertices == ("v", "v'")
    assert [(e.id, e.source, e.range) for e in f.edges] == [
        ("e", "v", "v"), ("f", "v", "v"), ("e'", "v", "v'"), ("f'", "v", "v'"),
    ]


def test_expand_isolated_vertex_is_identity():
    g = make_graph(["v"], [])
    assert cohn_expand(g).expanded == g


def test_expand_line2():
    ex = cohn_expand(line(2))
    assert ex.expanded.vertices == ("v1", "v2", "v1'")
    assert [e.id for e in ex.expanded.edges] == ["e1"]
    assert ex.expanded.isolated_vertices() == ["v1'"]
    assert ex.vertex_map == {"v1": "v1'"} and ex.edge_map == {}


def test_expand_rejects_collisions():
    # constructed directly; the file parser already forbids the marker
    g = DirectedGraph(("v", "v'"), (Edge("e", "v", "v"),))
    with pytest.raises(CohnError, match="collides"):
        cohn_expand(g)


def test_cohn_decisions(load):
    v = decide_ugn_cohn(load("rose2"))
    assert not v.ugn and v.algebra == "cohn"
    v = decide_ugn_cohn(line(4))
    assert v.ugn and v.reason == Source("v1")
    v = decide_ugn_cohn(load("toeplitz"))
    assert v.ugn and isinstance(v.reason, SourceCycle)


@given(graphs(max_vertices=5, max_edges=8))
def test_expansion_invariants(g):
    ex = cohn_expand(g)
    f = ex.expanded
    reg = g.regular_vertices()
    assert f.n == g.n + len(reg)
    assert len(f.edges) == len(g.edges) + sum(1 for e in g.edges if g.is_regular(e.range))
    for v, vp in ex.vertex_map.items():
        assert f.is_sink(vp)
    for eid, ep in ex.edge_map.items():
        e, e2 = g.edge_by_id[eid], f.edge_by_id[ep]
        assert e2.source == e.source and e2.range == ex.vertex_map[e.range]


@given(graphs(max_vertices=5, max_edges=8))
def test_source_cycles_survive_expansion(g):
    kept = {c.edges for c in source_cycles(cohn_expand(g).expanded)}
    assert all(c.edges in kept for c in source_cycles(g))


def test_exhaustive_consistency_small():
    spec = GraphFamilySpec(4, 6, 6, limit=100_000)
    count = 0
    for g in enumerate_graphs(spec):
        f = cohn_expand(g).expanded
        assert decide_ugn_cohn(g).ugn == decide_ugn_leavitt(f, with_witness=False).ugn
        assert is_no_exit(f) == is_acyclic(g)
        count += 1
    assert count == 79_835


@pytest.mark.parametrize("g", [rose(3), cycle(3), line(3)])
def test_named_graph_consistency(g):
    assert decide_ugn_cohn(g).ugn == decide_ugn_leavitt(cohn_expand(g).expanded, with_witness=False).ugn


@given(graphs(max_vertices=5, max_edges=8))
def test_verifier_rebuilds_the_same_expansion(g):
    assert expansion(g) == cohn_expand(g).expanded
