"""Brute-force oracles and exhaustive small-graph generators.

Nothing here calls the decision procedures it is meant to check: the UGN
oracle only rewrites monoid elements one relation at a time, and the path
oracle materialises every path.
"""

from __future__ import annotations

import json
import random
import time
from collections import deque
from dataclasses import dataclass
from typing import IO, Iterator

import numpy as np

from .graph import Cycle, DirectedGraph, Edge
from .monoid import Budget, MonoidElement, apply_relation, congruent_bounded, Congruent


class OracleError(RuntimeError):
    pass


# -- graph families -------------------------------------------------------------


@dataclass(frozen=True)
class GraphFamilySpec:
    max_vertices: int
    max_edges: int
    max_multiplicity: int = 1
    include_loops: bool = True
    seed: int = 0  # used by the random sampler only; enumeration is seed-free
    limit: int = 100_000
    min_vertices: int = 1

    def __post_init__(self) -> None:
        if self.max_vertices < 1 or self.min_vertices < 1 or self.min_vertices > self.max_vertices:
            raise ValueError("vertex bounds must satisfy 1 <= min_vertices <= max_vertices")
        if self.max_edges < 0 or self.max_multiplicity < 0 or self.limit < 1:
            raise ValueError("edge bounds must be nonnegative and the limit positive")


def _pairs(n: int, loops: bool) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(n) if loops or i != j]


def _count_assignments(slots: int, mult: int, total: int) -> int:
    """Tuples of length ``slots`` with entries in ``0..mult`` summing to at most ``total``."""
    ways = [1] + [0] * total
    for _ in range(slots):
        nxt = [0] * (total + 1)
        for s, w in enumerate(ways):
            if w:
                for k in range(min(mult, total - s) + 1):
                    nxt[s + k] += w
        ways = nxt
    return sum(ways)


def family_size(spec: GraphFamilySpec) -> int:
    return sum(
        _count_assignments(len(_pairs(n, spec.include_loops)), spec.max_multiplicity, spec.max_edges)
        for n in range(spec.min_vertices, spec.max_vertices + 1)
    )


def _build(n: int, pairs: list[tuple[int, int]], mult: tuple[int, ...]) -> DirectedGraph:
    names = tuple(f"v{i + 1}" for i in range(n))
    edges = []
    for (i, j), k in zip(pairs, mult):
        for _ in range(k):
            edges.append(Edge(f"e{len(edges) + 1}", names[i], names[j]))
    return DirectedGraph(names, tuple(edges))


def enumerate_graphs(spec: GraphFamilySpec) -> Iterator[DirectedGraph]:
    """Every labeled multigraph within the bounds, each exactly once, in a fixed order."""
    size = family_size(spec)
    if size > spec.limit:
        raise OracleError(f"family has {size} graphs, above the limit {spec.limit}")
    for n in range(spec.min_vertices, spec.max_vertices + 1):
        pairs = _pairs(n, spec.include_loops)
        for mult in _assignments(len(pairs), spec.max_multiplicity, spec.max_edges):
            yield _build(n, pairs, mult)


def _assignments(slots: int, mult: int, total: int) -> Iterator[tuple[int, ...]]:
    """Lexicographic tuples with entries in ``0..mult`` and sum at most ``total``."""
    if slots == 0:
        yield ()
        return
    for k in range(min(mult, total) + 1):
        for rest in _assignments(slots - 1, mult, total - k):
            yield (k,) + rest


def random_graph(rng: random.Random, n: int, max_edges: int, max_multiplicity: int = 2) -> DirectedGraph:
    pairs = _pairs(n, True)
    target = rng.randint(0, max_edges)
    mult = [0] * len(pairs)
    for _ in range(target):
        k = rng.randrange(len(pairs))
        if mult[k] < max_multiplicity:
            mult[k] += 1
    return _build(n, pairs, tuple(mult))


def sample_graphs(spec: GraphFamilySpec, count: int) -> list[DirectedGraph]:
    rng = random.Random(spec.seed)
    return [
        random_graph(rng, rng.randint(spec.min_vertices, spec.max_vertices), spec.max_edges, spec.max_multiplicity)
        for _ in range(count)
    ]


# -- UGN oracle -------------------------------------------------------------------


@dataclass(frozen=True)
class CounterexampleFound:
    """``m[1] + [x] = n[1]`` with ``m > n``, confirmed by the bounded congruence search."""

    m: int
    n: int
    x: MonoidElement
    certificate: Congruent

    def to_json(self) -> dict:
        return {
            "result": "counterexample",
            "m": self.m,
            "n": self.n,
            "x": self.x.to_json(),
            "congruence": self.certificate.to_json(),
        }


@dataclass(frozen=True)
class NoneWithinBudget:
    nodes_expanded: int
    exhaustive: bool

    def to_json(self) -> dict:
        return {"result": "none_within_budget", "nodes_expanded": self.nodes_expanded, "exhaustive": self.exhaustive}


def _closure(g: DirectedGraph, start: MonoidElement, cap: int, nodes: int) -> tuple[list[MonoidElement], int, bool]:
    """Forward rewrites of ``start`` with total at most ``cap``, by plain BFS."""
    seen = {start}
    order = [start]
    queue = deque([start])
    expanded = 0
    complete = True
    while queue:
        if expanded >= nodes:
            complete = False
            break
        x = queue.popleft()
        expanded += 1
        for v in g.regular_vertices():
            if x[v] == 0:
                continue
            y = apply_relation(g, x, v)
            if y.total > cap:
                complete = False
                continue
            if y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)
    return order, expanded, complete


def oracle_ugn_search(
    g: DirectedGraph,
    budget: Budget | None = None,
    max_m: int = 3,
    cap: int | None = None,
) -> CounterexampleFound | NoneWithinBudget:
    """Look for ``m[1] <= n[1]`` with ``max_m >= m > n >= 1`` by brute force.

    ``[a] <= [b]`` holds exactly when some forward rewrite of ``a`` lies
    coefficientwise below some forward rewrite of ``b``, so the search compares
    the bounded forward closures of ``k[1]`` for ``k <= max_m``. A hit gives
    ``x = b' - a'``, which is then confirmed independently.
    """
    budget = budget or Budget.default()
    unit = MonoidElement.unit(g)
    cap = cap if cap is not None else (budget.max_total or (max_m + 4) * g.n + 8)
    closures: dict[int, np.ndarray] = {}
    elements: dict[int, list[MonoidElement]] = {}
    used = 0
    exhaustive = True
    for k in range(1, max_m + 1):
        elems, expanded, complete = _closure(g, k * unit, cap, max(budget.max_nodes - used, 1))
        used += expanded
        exhaustive = exhaustive and complete
        elements[k] = elems
        closures[k] = np.array([e.coeffs for e in elems], dtype=np.int64)
    for m in range(2, max_m + 1):
        for n in range(1, m):
            big = closures[n]
            for a in elements[m]:
                hits = np.nonzero((big >= np.array(a.coeffs)).all(axis=1))[0]
                if hits.size:
                    b = elements[n][int(hits[0])]
                    x = b - a
                    res = congruent_bounded(g, m * unit + x, n * unit, budget)
                    if not isinstance(res, Congruent):
                        raise OracleError(f"domination {a} <= {b} was not confirmed as a congruence")
                    return CounterexampleFound(m, n, x, res)
    return NoneWithinBudget(used, exhaustive)


# -- path oracle ----------------------------------------------------------------


def oracle_path_count(
    g: DirectedGraph, target: str, forbidden_cycle: Cycle | None = None, limit: int = 100_000
) -> int:
    """Count paths ending at ``target`` by listing them, trivial path included.

    Paths containing ``forbidden_cycle`` (in any rotation) as a run of
    consecutive edges are dropped; every extension of such a path contains it too.
    """
    rotations: set[tuple[str, ...]] = set()
    if forbidden_cycle is not None:
        es = forbidden_cycle.edges
        rotations = {es[i:] + es[:i] for i in range(len(es))}
        k = len(es)
    found: list[tuple[str, ...]] = []
    stack: list[tuple[str, tuple[str, ...]]] = [(target, ())]
    while stack:
        start, path = stack.pop()
        found.append(path)
        if len(found) > limit:
            raise OracleError(f"more than {limit} paths into {target!r}")
        for e in g.in_edges(start):
            longer = (e.id,) + path
            if rotations and longer[:k] in rotations:
                continue
            stack.append((e.source, longer))
    return len(found)


# -- harness -------------------------------------------------------------------------


def harness_record(g: DirectedGraph, budget: Budget | None = None) -> dict:
    from .cohn import cohn_expand, decide_ugn_cohn
    from .ugn import decide_ugn_leavitt

    t0 = time.perf_counter()
    verdict = decide_ugn_leavitt(g, with_witness=False)
    oracle = oracle_ugn_search(g, budget)
    cohn = decide_ugn_cohn(g)
    via = decide_ugn_leavitt(cohn_expand(g).expanded, with_witness=False)
    found = isinstance(oracle, CounterexampleFound)
    return {
        "graph": g.to_json(),
        "ugn_leavitt": verdict.ugn,
        "oracle": oracle.to_json()["result"],
        "agree": verdict.ugn != found,
        "ugn_cohn": cohn.ugn,
        "ugn_leavitt_of_expansion": via.ugn,
        "cohn_agree": cohn.ugn == via.ugn,
        "seconds": round(time.perf_counter() - t0, 6),
    }


def run_harness(graphs, out: IO[str], budget: Budget | None = None) -> dict:
    """Write one JSON line per graph and return a summary."""
    total = disagree = 0
    for g in graphs:
        rec = harness_record(g, budget)
        total += 1
        disagree += not (rec["agree"] and rec["cohn_agree"])
        out.write(json.dumps(rec, sort_keys=True) + "\n")
    return {"graphs": total, "disagreements": disagree}
