"""Finite directed multigraphs and their structural queries.

Vertex order is the order of the input file, and every vector in the package
indexes vertices by that order.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

PRIME = "'"
TRIV = "_triv"


class GraphFormatError(ValueError):
    """Raised for malformed graph files; the message names the offending location."""


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    range: str

    def to_json(self) -> dict:
        return {"id": self.id, "source": self.source, "range": self.range}


@dataclass(frozen=True)
class DirectedGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex id")
        if len({e.id for e in self.edges}) != len(self.edges):
            raise ValueError("duplicate edge id")
        known = set(self.vertices)
        for e in self.edges:
            if e.source not in known or e.range not in known:
                raise ValueError(f"edge {e.id!r}: dangling endpoint")

    # -- indexing ---------------------------------------------------------

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_by_id(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _out(self) -> tuple[tuple[Edge, ...], ...]:
        out: list[list[Edge]] = [[] for _ in self.vertices]
        for e in self.edges:
            out[self.index[e.source]].append(e)
        return tuple(tuple(x) for x in out)

    @cached_property
    def _in(self) -> tuple[tuple[Edge, ...], ...]:
        inc: list[list[Edge]] = [[] for _ in self.vertices]
        for e in self.edges:
            inc[self.index[e.range]].append(e)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        """Range indices of the out-edges of each vertex, with multiplicity."""
        return tuple(tuple(self.index[e.range] for e in out) for out in self._out)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def out_edges(self, v: str) -> tuple[Edge, ...]:
        return self._out[self.index[v]]

    def in_edges(self, v: str) -> tuple[Edge, ...]:
        return self._in[self.index[v]]

    def out_degree(self, v: str) -> int:
        return len(self.out_edges(v))

    def in_degree(self, v: str) -> int:
        return len(self.in_edges(v))

    def is_sink(self, v: str) -> bool:
        return not self.out_edges(v)

    def is_source(self, v: str) -> bool:
        return not self.in_edges(v)

    def is_regular(self, v: str) -> bool:
        return bool(self.out_edges(v))

    def sinks(self) -> list[str]:
        return [v for v in self.vertices if self.is_sink(v)]

    def sources(self) -> list[str]:
        return [v for v in self.vertices if self.is_source(v)]

    def regular_vertices(self) -> list[str]:
        return [v for v in self.vertices if self.is_regular(v)]

    def isolated_vertices(self) -> list[str]:
        return [v for v in self.vertices if self.is_source(v) and self.is_sink(v)]

    def is_source_free(self) -> bool:
        return not self.sources()

    # -- derived graphs ---------------------------------------------------

    def subgraph(self, vertices: Iterable[str], edges: Iterable[str] | None = None) -> DirectedGraph:
        """Subgraph on ``vertices`` keeping canonical order.

        Without ``edges`` the subgraph is induced; otherwise only the named
        edges are kept (they must have both endpoints kept).
        """
        keep = set(vertices)
        vs = tuple(v for v in self.vertices if v in keep)
        if edges is None:
            es = tuple(e for e in self.edges if e.source in keep and e.range in keep)
        else:
            wanted = set(edges)
            es = tuple(e for e in self.edges if e.id in wanted)
        return DirectedGraph(vs, es)

    def key(self) -> tuple[frozenset[str], frozenset[Edge]]:
        """Order-free identity: vertex and edge sets."""
        return frozenset(self.vertices), frozenset(self.edges)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [e.to_json() for e in self.edges]}

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json(), indent=indent)


def parse_graph(text: str | bytes) -> DirectedGraph:
    """Parse the JSON graph format, reporting the location of any problem."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GraphFormatError(f"byte {exc.start}: not valid UTF-8") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return graph_from_json(data)


def graph_from_json(data: object, allow_reserved: bool = False) -> DirectedGraph:
    """Build a graph from decoded JSON.

    ``allow_reserved`` admits primed ids and ``_triv``, which appear in graphs
    the tool itself emits (expansions, the trivial core) but never in input files.
    """
    if not isinstance(data, dict):
        raise GraphFormatError("top level: expected an object")
    extra = set(data) - {"vertices", "edges"}
    if extra:
        raise GraphFormatError(f"top level: unknown key(s) {sorted(extra)}")
    if "vertices" not in data:
        raise GraphFormatError("top level: missing 'vertices'")
    vertices = data["vertices"]
    edges = data.get("edges", [])
    if not isinstance(vertices, list) or not vertices:
        raise GraphFormatError("vertices: expected a non-empty list")
    if not isinstance(edges, list):
        raise GraphFormatError("edges: expected a list")

    seen: set[str] = set()
    for i, v in enumerate(vertices):
        _check_id(v, f"vertices[{i}]", allow_reserved)
        if v in seen:
            raise GraphFormatError(f"vertices[{i}]: duplicate vertex id {v!r}")
        seen.add(v)

    parsed: list[Edge] = []
    edge_ids: set[str] = set()
    for i, e in enumerate(edges):
        where = f"edges[{i}]"
        if not isinstance(e, dict):
            raise GraphFormatError(f"{where}: expected an object")
        extra = set(e) - {"id", "source", "range"}
        if extra:
            raise GraphFormatError(f"{where}: unknown key(s) {sorted(extra)}")
        for k in ("id", "source", "range"):
            if k not in e:
                raise GraphFormatError(f"{where}: missing {k!r}")
            _check_id(e[k], f"{where}.{k}", allow_reserved)
        if e["id"] in edge_ids:
            raise GraphFormatError(f"{where}.id: duplicate edge id {e['id']!r}")
        for k in ("source", "range"):
            if e[k] not in seen:
                raise GraphFormatError(f"{where}.{k}: dangling endpoint {e[k]!r}")
        edge_ids.add(e["id"])
        parsed.append(Edge(e["id"], e["source"], e["range"]))
    return DirectedGraph(tuple(vertices), tuple(parsed))


def _check_id(value: object, where: str, allow_reserved: bool = False) -> None:
    if not isinstance(value, str) or not value:
        raise GraphFormatError(f"{where}: expected a non-empty string")
    if allow_reserved:
        return
    if PRIME in value:
        raise GraphFormatError(f"{where}: the character {PRIME!r} is reserved")
    if value == TRIV:
        raise GraphFormatError(f"{where}: the id {TRIV!r} is reserved")


def load_graph(path: str | Path) -> DirectedGraph:
    return parse_graph(Path(path).read_bytes())


def make_graph(vertices: Sequence[str], edges: Iterable[tuple[str, str, str]]) -> DirectedGraph:
    """Build a graph from ``(id, source, range)`` triples."""
    return DirectedGraph(tuple(vertices), tuple(Edge(*e) for e in edges))


# -- matrices and vertex classes ---------------------------------------------


def incidence_matrix(g: DirectedGraph) -> np.ndarray:
    """Entry (i, j) counts edges from vertex i to vertex j."""
    a = np.zeros((g.n, g.n), dtype=np.int64)
    for e in g.edges:
        a[g.index[e.source], g.index[e.range]] += 1
    return a


@dataclass(frozen=True)
class VertexInfo:
    is_sink: bool
    is_source: bool
    is_isolated: bool
    is_regular: bool
    out_degree: int
    in_degree: int


def classify_vertices(g: DirectedGraph) -> dict[str, VertexInfo]:
    info = {}
    for v in g.vertices:
        out, inc = g.out_degree(v), g.in_degree(v)
        info[v] = VertexInfo(out == 0, inc == 0, out == 0 and inc == 0, out >= 1, out, inc)
    return info


def tree(g: DirectedGraph, v: str | Iterable[str]) -> set[str]:
    """Vertices reachable from ``v`` (or from any of several vertices), ``v`` included."""
    starts = [v] if isinstance(v, str) else list(v)
    idx = _reach(g, [g.index[s] for s in starts])
    return {g.vertices[i] for i in idx}


def _reach(g: DirectedGraph, starts: Iterable[int]) -> set[int]:
    seen = set(starts)
    stack = list(seen)
    while stack:
        i = stack.pop()
        for j in g.successors[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return seen


def shortest_path(g: DirectedGraph, u: str, w: str) -> list[Edge] | None:
    """A minimum-length edge path from ``u`` to ``w`` (empty when ``u == w``)."""
    if u == w:
        return []
    parent: dict[str, Edge] = {}
    queue = deque([u])
    seen = {u}
    while queue:
        x = queue.popleft()
        for e in g.out_edges(x):
            if e.range in seen:
                continue
            seen.add(e.range)
            parent[e.range] = e
            if e.range == w:
                path = []
                y = w
                while y != u:
                    path.append(parent[y])
                    y = parent[y].source
                return path[::-1]
            queue.append(e.range)
    return None


def distances_from(g: DirectedGraph, u: str) -> dict[str, int]:
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for e in g.out_edges(x):
            if e.range not in dist:
                dist[e.range] = dist[x] + 1
                queue.append(e.range)
    return dist


# -- cycles -------------------------------------------------------------------


@dataclass(frozen=True)
class Cycle:
    """A cycle given by its vertex list and the edge leaving each listed vertex.

    ``edges[i]`` goes from ``vertices[i]`` to ``vertices[i + 1]`` (cyclically);
    the base is ``vertices[0]``.
    """

    vertices: tuple[str, ...]
    edges: tuple[str, ...]

    @property
    def base(self) -> str:
        return self.vertices[0]

    def __len__(self) -> int:
        return len(self.edges)

    def rotated_to(self, v: str) -> Cycle:
        k = self.vertices.index(v)
        return Cycle(self.vertices[k:] + self.vertices[:k], self.edges[k:] + self.edges[:k])

    def canonical(self, g: DirectedGraph) -> Cycle:
        return self.rotated_to(min(self.vertices, key=g.index.__getitem__))

    def edge_set(self) -> frozenset[str]:
        return frozenset(self.edges)

    def check(self, g: DirectedGraph) -> None:
        """Raise ``ValueError`` unless this is a cycle of ``g``."""
        if not self.edges or len(self.edges) != len(self.vertices):
            raise ValueError("cycle must list one edge per vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("cycle vertices are not distinct")
        k = len(self.edges)
        for i, eid in enumerate(self.edges):
            e = g.edge_by_id.get(eid)
            if e is None:
                raise ValueError(f"unknown edge {eid!r}")
            if e.source != self.vertices[i] or e.range != self.vertices[(i + 1) % k]:
                raise ValueError(f"edge {eid!r} does not compose")

    def to_json(self) -> dict:
        return {"base": self.base, "vertices": list(self.vertices), "edges": list(self.edges)}


def _cycle_sort_key(g: DirectedGraph, c: Cycle) -> tuple:
    return (g.index[c.base], len(c), tuple(g.index[v] for v in c.vertices), c.edges)


def enumerate_cycles(g: DirectedGraph) -> list[Cycle]:
    """All simple cycles, one per rotation class, based at their smallest vertex."""
    simple = nx.DiGraph()
    simple.add_nodes_from(range(g.n))
    parallel: dict[tuple[int, int], list[str]] = {}
    for e in g.edges:
        key = (g.index[e.source], g.index[e.range])
        parallel.setdefault(key, []).append(e.id)
        simple.add_edge(*key)
    cycles = []
    for nodes in nx.simple_cycles(simple):
        k = nodes.index(min(nodes))
        nodes = nodes[k:] + nodes[:k]
        hops = [parallel[(nodes[i], nodes[(i + 1) % len(nodes)])] for i in range(len(nodes))]
        names = tuple(g.vertices[i] for i in nodes)
        for choice in product(*hops):
            cycles.append(Cycle(names, tuple(choice)))
    cycles.sort(key=lambda c: _cycle_sort_key(g, c))
    return cycles


def is_acyclic(g: DirectedGraph) -> bool:
    return not cycle_vertices(g)


def cycle_vertices(g: DirectedGraph) -> set[str]:
    """Vertices lying on at least one cycle."""
    simple = nx.DiGraph()
    simple.add_nodes_from(range(g.n))
    simple.add_edges_from((g.index[e.source], g.index[e.range]) for e in g.edges)
    on_cycle: set[int] = set()
    for comp in nx.strongly_connected_components(simple):
        if len(comp) > 1:
            on_cycle |= comp
        else:
            (i,) = comp
            if simple.has_edge(i, i):
                on_cycle.add(i)
    return {g.vertices[i] for i in on_cycle}


def source_cycles(g: DirectedGraph) -> list[Cycle]:
    """Cycles all of whose vertices have in-degree exactly one.

    Found by following unique predecessors, so no cycle enumeration is needed;
    distinct source cycles are vertex-disjoint.
    """
    found: list[Cycle] = []
    claimed: set[str] = set()
    for v in g.vertices:
        if v in claimed or g.in_degree(v) != 1:
            continue
        chain = [v]
        back_edges = []
        x = v
        while True:
            (e,) = g.in_edges(x)
            back_edges.append(e)
            x = e.source
            if x == v:
                break
            if x in chain or g.in_degree(x) != 1:
                chain = []
                break
            chain.append(x)
        if not chain:
            continue
        # chain walks backwards; reverse into forward orientation
        verts = tuple(reversed(chain))
        edges = tuple(e.id for e in reversed(back_edges))
        # edges[i] currently enters verts[i]; shift so edges[i] leaves verts[i]
        edges = edges[1:] + edges[:1]
        c = Cycle(verts, edges).canonical(g)
        claimed.update(c.vertices)
        found.append(c)
    found.sort(key=lambda c: _cycle_sort_key(g, c))
    return found


def exits_of_cycle(g: DirectedGraph, c: Cycle) -> list[Edge]:
    on = set(c.vertices)
    own = c.edge_set()
    return [e for e in g.edges if e.source in on and e.id not in own]


def is_no_exit(g: DirectedGraph) -> bool:
    """No cycle has an exit: every vertex on a cycle emits exactly one edge."""
    return all(g.out_degree(v) == 1 for v in cycle_vertices(g))

