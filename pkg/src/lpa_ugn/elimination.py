"""Source elimination and the source-free core of a graph."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .graph import TRIV, DirectedGraph, cycle_vertices, tree


class EliminationError(ValueError):
    pass


E_TRIV = DirectedGraph((TRIV,), ())


@dataclass(frozen=True)
class EliminationStep:
    eliminated: str
    isolated: bool
    snapshot: DirectedGraph


@dataclass(frozen=True)
class EliminationSequence:
    initial: DirectedGraph
    steps: tuple[EliminationStep, ...]
    terminal: DirectedGraph
    isolated_encountered: bool

    def snapshots(self) -> list[DirectedGraph]:
        """``E_0, E_1, ...``: the input followed by the graph after each step."""
        return [self.initial] + [s.snapshot for s in self.steps]

    def first_isolated(self) -> tuple[int, str] | None:
        """Smallest ``i`` with an isolated vertex in ``E_i``, and that vertex."""
        for i, h in enumerate(self.snapshots()):
            iso = h.isolated_vertices()
            if iso:
                return i, iso[0]
        return None

    def to_json(self) -> dict:
        return {
            "steps": [{"eliminated": s.eliminated, "isolated": s.isolated} for s in self.steps],
            "terminal": self.terminal.to_json(),
            "isolated_encountered": self.isolated_encountered,
        }


def eliminate_source(g: DirectedGraph, v: str) -> DirectedGraph:
    if v not in g.index:
        raise EliminationError(f"vertex {v!r} not present")
    if not g.is_source(v):
        raise EliminationError(f"vertex {v!r} is not a source")
    return DirectedGraph(
        tuple(w for w in g.vertices if w != v),
        tuple(e for e in g.edges if e.source != v),
    )


def run_elimination(
    g: DirectedGraph,
    order: Sequence[str] | None = None,
    rng: random.Random | None = None,
) -> EliminationSequence:
    """Eliminate sources until none remain.

    Vertices listed in ``order`` are eliminated first, in that order; after
    that (or without ``order``) the smallest-index source is taken, or a
    random one when ``rng`` is given. An acyclic graph empties completely and
    its terminal is the one-vertex graph ``E_TRIV``.
    """
    queue = list(order or ())
    current = g
    steps: list[EliminationStep] = []
    isolated_seen = bool(g.isolated_vertices())
    while current.n:
        srcs = current.sources()
        if queue:
            v = queue.pop(0)
            if v not in srcs:
                raise EliminationError(f"step {len(steps)}: {v!r} is not a source of the current graph")
        elif not srcs:
            break
        elif rng is not None:
            v = rng.choice(srcs)
        else:
            v = srcs[0]
        was_isolated = current.is_sink(v)
        current = eliminate_source(current, v)
        steps.append(EliminationStep(v, was_isolated, current))
        isolated_seen = isolated_seen or bool(current.isolated_vertices())
    if queue:
        raise EliminationError(f"step {len(steps)}: {queue[0]!r} is not a source of the current graph")
    terminal = current if current.n else E_TRIV
    return EliminationSequence(g, tuple(steps), terminal, isolated_seen)


def sf_support(g: DirectedGraph) -> set[str]:
    """Vertices of the source-free core, read off from cycles and trees."""
    on_cycle = cycle_vertices(g)
    if not on_cycle:
        raise EliminationError("graph is acyclic; its source-free core is E_triv")
    # T(c) for every cycle c together is the forward closure of all cycle vertices.
    return tree(g, on_cycle)


def source_free_core(g: DirectedGraph) -> DirectedGraph:
    if not cycle_vertices(g):
        return E_TRIV
    return g.subgraph(sf_support(g))
