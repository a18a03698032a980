"""Independent replay of emitted certificates.

The checks here re-derive everything from the graph and the certificate JSON
with plain dictionary arithmetic; they do not call the code that produced the
certificates.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterator

from .graph import DirectedGraph, Edge, GraphFormatError, graph_from_json


class VerificationError(ValueError):
    pass


KINDS = ("ugn_witness", "congruence", "properly_infinite", "two_cycle", "exit", "isolated_vertex", "source_cycle", "source")


def _fail(msg: str) -> None:
    raise VerificationError(msg)


def _element(g: DirectedGraph, data: object, where: str) -> Counter:
    if not isinstance(data, dict):
        _fail(f"{where}: expected an object of vertex counts")
    out: Counter = Counter()
    for v, c in data.items():
        if v not in g.index:
            _fail(f"{where}: unknown vertex {v!r}")
        if not isinstance(c, int) or isinstance(c, bool) or c < 0:
            _fail(f"{where}: bad coefficient for {v!r}")
        if c:
            out[v] = c
    return out


def _replay(g: DirectedGraph, start: Counter, steps: object, where: str) -> Counter:
    if not isinstance(steps, list):
        _fail(f"{where}: steps must be a list")
    cur = Counter(start)
    for i, v in enumerate(steps):
        if v not in g.index:
            _fail(f"{where} step {i}: unknown vertex {v!r}")
        if not g.out_edges(v):
            _fail(f"{where} step {i}: {v!r} is a sink")
        if cur[v] < 1:
            _fail(f"{where} step {i}: coefficient of {v!r} is zero")
        cur[v] -= 1
        for e in g.out_edges(v):
            cur[e.range] += 1
    return +cur


def _same(a: Counter, b: Counter) -> bool:
    return +a == +b


def _trace(g: DirectedGraph, data: dict, where: str) -> tuple[Counter, Counter]:
    start = _element(g, data.get("start"), f"{where}.start")
    end = _replay(g, start, data.get("steps"), where)
    if "end" in data and not _same(end, _element(g, data["end"], f"{where}.end")):
        _fail(f"{where}: replay does not reach the recorded end")
    return start, end


def check_hereditary(host: DirectedGraph, sub: DirectedGraph) -> None:
    """``sub`` is a subgraph of ``host`` closed under out-edges."""
    for v in sub.vertices:
        if v not in host.index:
            _fail(f"embedded graph vertex {v!r} is not in the graph")
    for e in sub.edges:
        h = host.edge_by_id.get(e.id)
        if h != e:
            _fail(f"embedded graph edge {e.id!r} does not match the graph")
    kept = set(sub.vertices)
    own = {e.id for e in sub.edges}
    for e in host.edges:
        if e.source in kept and e.id not in own:
            _fail(f"embedded graph drops edge {e.id!r} leaving {e.source!r}")


def verify_ugn_witness(g: DirectedGraph, w: dict) -> None:
    try:
        sub = graph_from_json(w["graph"], allow_reserved=True)
    except (KeyError, GraphFormatError) as exc:
        _fail(f"witness graph: {exc}")
    check_hereditary(g, sub)
    m, n = w.get("m"), w.get("n")
    if not (isinstance(m, int) and isinstance(n, int) and m > n >= 1):
        _fail("witness needs integers m > n >= 1")
    x = _element(g, w.get("x"), "x")
    if any(v not in sub.index for v in x):
        _fail("x has support outside the witness graph")
    unit = Counter({v: 1 for v in sub.vertices})
    left_start, left_end = _trace(g, w["trace_left"], "trace_left")
    right_start, right_end = _trace(g, w["trace_right"], "trace_right")
    want_left = Counter({v: m * unit[v] + x[v] for v in sub.vertices})
    want_right = Counter({v: n for v in sub.vertices})
    if not _same(left_start, want_left):
        _fail("left trace does not start at m*1 + x")
    if not _same(right_start, want_right):
        _fail("right trace does not start at n*1")
    if not _same(left_end, right_end):
        _fail("traces do not meet")
    if "common_end" in w and not _same(left_end, _element(g, w["common_end"], "common_end")):
        _fail("recorded common end differs from the replay")
    k = Counter(w["trace_left"]["steps"])
    kp = Counter(w["trace_right"]["steps"])
    for v, mv in (w.get("mvec") or {}).items():
        if kp[v] - k[v] != mv:
            _fail(f"step counts at {v!r} differ by {kp[v] - k[v]}, expected {mv}")


def verify_congruence(g: DirectedGraph, w: dict) -> None:
    _, a = _trace(g, w["left"], "left")
    _, b = _trace(g, w["right"], "right")
    if not _same(a, b):
        _fail("congruence traces do not meet")


def verify_properly_infinite(g: DirectedGraph, w: dict) -> None:
    start, end = _trace(g, w["trace"], "trace")
    if not start:
        _fail("the zero element is not properly infinite")
    slack = _element(g, w.get("slack", {}), "slack")
    want = Counter({v: 2 * c for v, c in start.items()}) + slack
    if not _same(end, want):
        _fail("trace does not end at 2u + slack")


def _cycle(g: DirectedGraph, c: dict, where: str) -> tuple[list[str], list[str]]:
    verts, edges = list(c.get("vertices", [])), list(c.get("edges", []))
    if not edges or len(verts) != len(edges) or len(set(verts)) != len(verts):
        _fail(f"{where}: malformed cycle")
    for i, eid in enumerate(edges):
        e = g.edge_by_id.get(eid)
        if e is None or e.source != verts[i] or e.range != verts[(i + 1) % len(verts)]:
            _fail(f"{where}: edge {eid!r} does not compose")
    return verts, edges


def verify_two_cycle(g: DirectedGraph, w: dict) -> None:
    v = w.get("vertex")
    cycles = w.get("cycles", [])
    if v not in g.index or len(cycles) != 2:
        _fail("two-cycle certificate needs a vertex and two cycles")
    (v1, e1), (v2, e2) = (_cycle(g, c, f"cycles[{i}]") for i, c in enumerate(cycles))
    if v1[0] != v or v2[0] != v:
        _fail("cycles are not based at the vertex")
    if e1 == e2:
        _fail("the two cycles coincide")
    if g.in_degree(v) < 2:
        _fail("vertex has in-degree below 2")


def verify_exit(g: DirectedGraph, w: dict) -> None:
    verts, edges = _cycle(g, w.get("cycle", {}), "cycle")
    f = g.edge_by_id.get(w.get("exit"))
    if f is None or f.source not in verts or f.id in edges:
        _fail("exit edge does not leave the cycle")


def _in_degrees(vertices: set[str], g: DirectedGraph) -> Counter:
    return Counter(e.range for e in g.edges if e.source in vertices and e.range in vertices)


def _strip_sources(g: DirectedGraph) -> set[str]:
    """Vertices left after repeatedly deleting every vertex with no in-edge."""
    alive = set(g.vertices)
    while True:
        deg = _in_degrees(alive, g)
        dead = {v for v in alive if deg[v] == 0}
        if not dead:
            return alive
        alive -= dead


def verify_isolated_vertex(g: DirectedGraph, w: dict) -> None:
    alive = set(g.vertices)
    order = w.get("eliminated")
    if not isinstance(order, list) or w.get("step") != len(order):
        _fail("isolated-vertex certificate needs the list of eliminated sources")
    for i, v in enumerate(order):
        if v not in alive or _in_degrees(alive, g)[v]:
            _fail(f"eliminated[{i}]: {v!r} is not a source at that point")
        alive.discard(v)
    v = w.get("vertex")
    if v not in alive:
        _fail(f"vertex {v!r} is not present after the eliminations")
    if _in_degrees(alive, g)[v] or any(e.source == v for e in g.edges):
        _fail(f"vertex {v!r} is not isolated after the eliminations")


def verify_source_cycle(g: DirectedGraph, w: dict) -> None:
    verts, _ = _cycle(g, w.get("cycle", {}), "cycle")
    where = w.get("where")
    if where == "input":
        alive = set(g.vertices)
    elif where == "E_sf":
        alive = _strip_sources(g)
    else:
        _fail(f"unknown location {where!r}")
    deg = _in_degrees(alive, g)
    for v in verts:
        if v not in alive or deg[v] != 1:
            _fail(f"cycle vertex {v!r} does not have in-degree 1 in {where}")


def verify_source(g: DirectedGraph, w: dict) -> None:
    v = w.get("vertex")
    if v not in g.index or g.in_edges(v):
        _fail(f"{v!r} is not a source")


_CHECKS = {
    "isolated_vertex": verify_isolated_vertex,
    "source_cycle": verify_source_cycle,
    "source": verify_source,
    "ugn_witness": verify_ugn_witness,
    "congruence": verify_congruence,
    "properly_infinite": verify_properly_infinite,
    "two_cycle": verify_two_cycle,
    "exit": verify_exit,
}


def _kind(node: dict) -> str | None:
    if node.get("kind") in _CHECKS:
        return node["kind"]
    if node.get("result") == "equal" and "left" in node:
        return "congruence"
    if node.get("result") == "properly_infinite" and "trace" in node:
        return "properly_infinite"
    return None


def certificates(doc: object, host: str = "input") -> Iterator[tuple[str, str, dict]]:
    """Every certificate in a report, with the graph it refers to."""
    if isinstance(doc, dict):
        if doc.get("algebra") == "cohn":
            host = "expansion"
        kind = _kind(doc)
        if kind is not None:
            yield kind, host, doc
            return
        for key, value in doc.items():
            if key != "graph":
                yield from certificates(value, host)
    elif isinstance(doc, list):
        for item in doc:
            yield from certificates(item, host)


def expansion(g: DirectedGraph) -> DirectedGraph:
    """The Cohn expansion graph, rebuilt here so replay does not trust the producer."""
    regular = {e.source for e in g.edges}
    vertices = g.vertices + tuple(v + "'" for v in g.vertices if v in regular)
    extra = tuple(Edge(e.id + "'", e.source, e.range + "'") for e in g.edges if e.range in regular)
    return DirectedGraph(vertices, g.edges + extra)


def verify_document(g: DirectedGraph, doc: object) -> list[str]:
    """Replay every certificate in ``doc``; returns the kinds checked."""
    found = list(certificates(doc))
    if not found:
        _fail("no certificate found in the document")
    expanded = None
    kinds = []
    for kind, host, cert in found:
        graph = g
        if host == "expansion":
            expanded = expanded or expansion(g)
            graph = expanded
        _CHECKS[kind](graph, cert)
        kinds.append(kind)
    return kinds
