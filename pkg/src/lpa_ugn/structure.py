"""Cancellation, Hermite, stable and direct finiteness through the no-exit criterion.

For a no-exit graph the Leavitt path algebra is a finite sum of matrix rings:
one over the Laurent polynomials per cycle and one over the base field per
sink, with sizes given by path counts. Otherwise a cycle with an exit yields
elements ``a, b`` with ``ba = 1`` and ``ab != 1``; that recipe is recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cohn import cohn_expand
from .graph import (
    Cycle,
    DirectedGraph,
    cycle_vertices,
    enumerate_cycles,
    exits_of_cycle,
    is_acyclic,
    is_no_exit,
    shortest_path,
)


class StructureError(ValueError):
    pass


PROPERTIES = ("cancellation", "hermite", "stably_finite", "directly_finite")


@dataclass(frozen=True)
class Summand:
    size: int
    ring: str  # "laurent" or "base_field"
    anchor: str | Cycle  # a cycle is anchored at its base vertex

    def to_json(self) -> dict:
        out: dict = {"size": self.size, "ring": self.ring}
        if isinstance(self.anchor, Cycle):
            out["anchor"] = self.anchor.to_json()
        else:
            out["anchor"] = self.anchor
        return out


@dataclass(frozen=True)
class ExitWitness:
    """A cycle ``c`` with exit ``f``; ``a = c + x`` and ``b = c* + x`` with ``x``
    the sum of the vertices off ``c``."""

    cycle: Cycle
    exit_edge: str
    others: tuple[str, ...]

    def check(self, g: DirectedGraph) -> None:
        self.cycle.check(g)
        if self.exit_edge not in {e.id for e in exits_of_cycle(g, self.cycle)}:
            raise StructureError(f"{self.exit_edge!r} is not an exit of the cycle")

    def to_json(self) -> dict:
        return {
            "kind": "exit",
            "cycle": self.cycle.to_json(),
            "exit": self.exit_edge,
            "recipe": {
                "x": list(self.others),
                "a": {"path": list(self.cycle.edges), "plus": "x"},
                "b": {"ghost_path": list(reversed(self.cycle.edges)), "plus": "x"},
                "ba": "1",
                "ab": "not 1",
            },
        }


@dataclass(frozen=True)
class StructureReport:
    algebra: str  # "leavitt" or "cohn"
    no_exit: bool
    summands: tuple[Summand, ...] = ()
    exit_witness: ExitWitness | None = None
    cycles: tuple[Cycle, ...] = field(default=())
    sinks: tuple[str, ...] = field(default=())

    @property
    def properties(self) -> bool:
        """The four equivalent ring properties, reported together."""
        return self.no_exit

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra,
            "no_exit": self.no_exit,
            "properties": {p: self.properties for p in PROPERTIES},
            "summands": [s.to_json() for s in self.summands],
            "exit_witness": self.exit_witness.to_json() if self.exit_witness else None,
        }


def _require_no_exit(g: DirectedGraph) -> None:
    if not is_no_exit(g):
        raise StructureError("graph has a cycle with an exit")


def _count_into(g: DirectedGraph, memo: dict[str, int], v: str, active: set[str]) -> int:
    """Paths ending at ``v``, trivial path included; the tree behind ``v`` must be acyclic."""
    if v in memo:
        return memo[v]
    if v in active:
        raise StructureError(f"a cycle reaches {v!r}; path count is infinite")
    active.add(v)
    total = 1 + sum(_count_into(g, memo, e.source, active) for e in g.in_edges(v))
    active.discard(v)
    memo[v] = total
    return total


def count_paths_to_sink(g: DirectedGraph, v: str) -> int:
    _require_no_exit(g)
    if not g.is_sink(v):
        raise StructureError(f"{v!r} is not a sink")
    return _count_into(g, {}, v, set())


def count_paths_to_cycle(g: DirectedGraph, c: Cycle, base: str | None = None) -> int:
    """Paths ending at ``base`` that do not run through all of ``c``.

    Such a path walks backwards along at most ``|c| - 1`` cycle edges and may
    then leave the cycle backwards through one entering edge, so every cycle
    vertex contributes its trivial path plus the paths behind each entry.
    """
    _require_no_exit(g)
    c.check(g)
    base = c.base if base is None else base
    if base not in c.vertices:
        raise StructureError(f"{base!r} is not on the cycle")
    own = c.edge_set()
    memo: dict[str, int] = {}
    total = 0
    for u in c.vertices:
        total += 1
        for e in g.in_edges(u):
            if e.id not in own:
                total += _count_into(g, memo, e.source, set())
    return total


def _exit_witness(g: DirectedGraph) -> ExitWitness:
    on = cycle_vertices(g)
    v = next(u for u in g.vertices if u in on and g.out_degree(u) > 1)
    for e in g.out_edges(v):
        back = shortest_path(g, e.range, v)
        if back is None:
            continue
        verts = (v, e.range) + tuple(p.range for p in back[:-1]) if back else (v,)
        c = Cycle(verts, (e.id,) + tuple(p.id for p in back))
        c.check(g)
        f = next(x for x in g.out_edges(v) if x.id != e.id)
        others = tuple(u for u in g.vertices if u not in c.vertices)
        w = ExitWitness(c, f.id, others)
        w.check(g)
        return w
    raise AssertionError("cycle vertex without a returning out-edge")


def classify_cancellation(g: DirectedGraph) -> StructureReport:
    if not is_no_exit(g):
        return StructureReport("leavitt", False, exit_witness=_exit_witness(g))
    cycles = tuple(enumerate_cycles(g))
    seen: set[str] = set()
    for c in cycles:
        if seen & set(c.vertices):
            raise AssertionError("cycles of a no-exit graph must be vertex-disjoint")
        seen |= set(c.vertices)
    summands = [Summand(count_paths_to_cycle(g, c), "laurent", c) for c in cycles]
    sinks = tuple(g.sinks())
    summands += [Summand(count_paths_to_sink(g, v), "base_field", v) for v in sinks]
    return StructureReport("leavitt", True, tuple(summands), None, cycles, sinks)


def classify_cancellation_cohn(g: DirectedGraph) -> StructureReport:
    """The Cohn path algebra has the four properties exactly when ``g`` is acyclic."""
    direct = is_acyclic(g)
    via = classify_cancellation(cohn_expand(g).expanded)
    if via.no_exit != direct:
        raise AssertionError(f"acyclicity ({direct}) disagrees with the expanded graph ({via.no_exit})")
    return StructureReport("cohn", via.no_exit, via.summands, via.exit_witness, via.cycles, via.sinks)
