"""The Cohn path algebra of E as the Leavitt path algebra of an expanded graph.

``F(E)`` adds a sink ``v'`` for every regular vertex ``v`` and, for every edge
``e`` whose range is regular, an edge ``e'`` from ``s(e)`` to ``r(e)'``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import PRIME, DirectedGraph, Edge, source_cycles
from .ugn import NoObstruction, Source, SourceCycle, UgnVerdict, decide_ugn_leavitt


class CohnError(ValueError):
    pass


def primed(name: str) -> str:
    return name + PRIME


@dataclass(frozen=True)
class CohnExpansion:
    original: DirectedGraph
    expanded: DirectedGraph
    vertex_map: dict[str, str]  # regular v -> v'
    edge_map: dict[str, str]  # e with regular range -> e'

    def to_json(self) -> dict:
        return self.expanded.to_json()


def cohn_expand(g: DirectedGraph) -> CohnExpansion:
    taken = set(g.vertices) | {e.id for e in g.edges}
    regular = set(g.regular_vertices())
    vmap = {v: primed(v) for v in g.vertices if v in regular}
    emap = {e.id: primed(e.id) for e in g.edges if e.range in regular}
    clash = (set(vmap.values()) | set(emap.values())) & taken
    if clash:
        raise CohnError(f"primed id collides with an existing id: {sorted(clash)[0]!r}")
    if set(vmap.values()) & set(emap.values()):
        raise CohnError("primed vertex and edge ids collide")
    vertices = g.vertices + tuple(vmap[v] for v in g.vertices if v in vmap)
    extra = tuple(Edge(emap[e.id], e.source, vmap[e.range]) for e in g.edges if e.id in emap)
    return CohnExpansion(g, DirectedGraph(vertices, g.edges + extra), vmap, emap)


def decide_ugn_cohn(g: DirectedGraph) -> UgnVerdict:
    """UGN for the Cohn path algebra: a source or a source cycle is present.

    The verdict is cross-checked against the Leavitt decision on ``F(E)``.
    """
    srcs = g.sources()
    sc = source_cycles(g)
    if srcs:
        verdict = UgnVerdict("cohn", True, Source(srcs[0]))
    elif sc:
        verdict = UgnVerdict("cohn", True, SourceCycle(sc[0], "input"))
    else:
        verdict = UgnVerdict("cohn", False, NoObstruction())
    via = decide_ugn_leavitt(cohn_expand(g).expanded, with_witness=False)
    if via.ugn != verdict.ugn:
        raise AssertionError(
            f"Cohn criterion ({verdict.ugn}) disagrees with the expanded-graph route ({via.ugn})"
        )
    return verdict
