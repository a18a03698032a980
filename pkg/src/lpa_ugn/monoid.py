"""The graph monoid as a forward rewriting system on the free abelian monoid.

An element of the free monoid is a vector of nonnegative coefficients over the
vertices of a graph. Rewriting at a regular vertex ``v`` replaces one copy of
``v`` by the ranges of its out-edges. Two elements are congruent exactly when
forward rewrites of each reach a common element, which is what the searches
here look for.
"""

from __future__ import annotations

import os
from math import comb
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from .graph import DirectedGraph, tree

Vec = tuple[int, ...]


class MonoidError(ValueError):
    pass


class TraceError(MonoidError):
    def __init__(self, position: int, message: str):
        super().__init__(f"step {position}: {message}")
        self.position = position


@dataclass(frozen=True)
class MonoidElement:
    """A vector of nonnegative coefficients, tied to a vertex order."""

    vertices: tuple[str, ...]
    coeffs: Vec

    def __post_init__(self) -> None:
        if len(self.coeffs) != len(self.vertices):
            raise MonoidError("coefficient vector does not match the vertex count")
        if any(c < 0 for c in self.coeffs):
            raise MonoidError("coefficients must be nonnegative")

    @classmethod
    def of(cls, g: DirectedGraph, coeffs: Mapping[str, int] | Sequence[int] | None = None) -> MonoidElement:
        if coeffs is None:
            return cls(g.vertices, (0,) * g.n)
        if isinstance(coeffs, Mapping):
            vec = [0] * g.n
            for v, c in coeffs.items():
                if v not in g.index:
                    raise MonoidError(f"unknown vertex {v!r}")
                if not isinstance(c, int) or isinstance(c, bool):
                    raise MonoidError(f"coefficient of {v!r} must be an integer")
                vec[g.index[v]] += c
            return cls(g.vertices, tuple(vec))
        return cls(g.vertices, tuple(int(c) for c in coeffs))

    @classmethod
    def unit(cls, g: DirectedGraph) -> MonoidElement:
        """The sum of all vertices."""
        return cls(g.vertices, (1,) * g.n)

    def _same(self, other: MonoidElement) -> None:
        if other.vertices != self.vertices:
            raise MonoidError("elements belong to different graphs")

    def __add__(self, other: MonoidElement) -> MonoidElement:
        self._same(other)
        return MonoidElement(self.vertices, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: MonoidElement) -> MonoidElement:
        self._same(other)
        return MonoidElement(self.vertices, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rmul__(self, k: int) -> MonoidElement:
        return MonoidElement(self.vertices, tuple(k * a for a in self.coeffs))

    def __getitem__(self, v: str) -> int:
        return self.coeffs[self.vertices.index(v)]

    def dominates(self, other: MonoidElement) -> bool:
        self._same(other)
        return all(a >= b for a, b in zip(self.coeffs, other.coeffs))

    @property
    def total(self) -> int:
        return sum(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_json(self) -> dict[str, int]:
        return {v: c for v, c in zip(self.vertices, self.coeffs) if c}

    def __str__(self) -> str:
        terms = [f"{c}{v}" if c != 1 else v for v, c in zip(self.vertices, self.coeffs) if c]
        return " + ".join(terms) or "0"


def element_from_json(g: DirectedGraph, data: object) -> MonoidElement:
    if not isinstance(data, dict):
        raise MonoidError("element must be a JSON object mapping vertex ids to counts")
    return MonoidElement.of(g, data)


# -- rewriting ----------------------------------------------------------------


def _deltas(g: DirectedGraph) -> list[Vec | None]:
    """Per vertex: row of the incidence matrix minus the unit vector (None for sinks)."""
    out: list[Vec | None] = []
    for j, succ in enumerate(g.successors):
        if not succ:
            out.append(None)
            continue
        d = [0] * g.n
        d[j] -= 1
        for i in succ:
            d[i] += 1
        out.append(tuple(d))
    return out


def _vertex_index(g: DirectedGraph, j: int | str) -> int:
    if isinstance(j, str):
        if j not in g.index:
            raise MonoidError(f"unknown vertex {j!r}")
        return g.index[j]
    if not 0 <= j < g.n:
        raise MonoidError(f"vertex index {j} out of range")
    return j


def _check_graph(g: DirectedGraph, x: MonoidElement) -> None:
    if x.vertices != g.vertices:
        raise MonoidError("element does not belong to this graph")


def apply_relation(g: DirectedGraph, x: MonoidElement, j: int | str) -> MonoidElement:
    """Rewrite one copy of vertex ``j`` as the sum of the ranges of its out-edges."""
    _check_graph(g, x)
    j = _vertex_index(g, j)
    if g.is_sink(g.vertices[j]):
        raise MonoidError(f"{g.vertices[j]!r} is a sink; no relation applies")
    if x.coeffs[j] < 1:
        raise MonoidError(f"coefficient of {g.vertices[j]!r} is zero")
    vec = list(x.coeffs)
    vec[j] -= 1
    for i in g.successors[j]:
        vec[i] += 1
    return MonoidElement(x.vertices, tuple(vec))


@dataclass(frozen=True)
class RewriteTrace:
    start: MonoidElement
    steps: tuple[int, ...]
    intermediates: tuple[MonoidElement, ...]

    @property
    def end(self) -> MonoidElement:
        return self.intermediates[-1] if self.intermediates else self.start

    def counts(self) -> list[int]:
        k = [0] * len(self.start.vertices)
        for j in self.steps:
            k[j] += 1
        return k

    def step_ids(self) -> list[str]:
        return [self.start.vertices[j] for j in self.steps]

    def to_json(self, intermediates: bool = False) -> dict:
        out = {"start": self.start.to_json(), "steps": self.step_ids(), "end": self.end.to_json()}
        if intermediates:
            out["intermediates"] = [m.to_json() for m in self.intermediates]
        return out


def run_trace(g: DirectedGraph, start: MonoidElement, sigma: Iterable[int | str]) -> RewriteTrace:
    _check_graph(g, start)
    deltas = _deltas(g)
    cur = start.coeffs
    steps: list[int] = []
    mids: list[MonoidElement] = []
    for pos, j in enumerate(sigma):
        try:
            j = _vertex_index(g, j)
        except MonoidError as exc:
            raise TraceError(pos, str(exc)) from None
        d = deltas[j]
        if d is None:
            raise TraceError(pos, f"{g.vertices[j]!r} is a sink")
        if cur[j] < 1:
            raise TraceError(pos, f"coefficient of {g.vertices[j]!r} is zero")
        cur = tuple(a + b for a, b in zip(cur, d))
        steps.append(j)
        mids.append(MonoidElement(g.vertices, cur))
    return RewriteTrace(start, tuple(steps), tuple(mids))


def trace_from_json(g: DirectedGraph, data: Mapping) -> RewriteTrace:
    start = element_from_json(g, data["start"])
    trace = run_trace(g, start, list(data["steps"]))
    if "end" in data and trace.end != element_from_json(g, data["end"]):
        raise MonoidError("trace does not end at its recorded end element")
    return trace


# -- budgets ------------------------------------------------------------------

BUDGET_ENV = "LPA_BUDGET"
DEFAULT_NODES = 100_000


@dataclass(frozen=True)
class Budget:
    """Search limits. ``max_total=None`` picks a bound from the inputs."""

    max_nodes: int = DEFAULT_NODES
    max_total: int | None = None
    max_steps: int | None = None

    @classmethod
    def default(cls) -> Budget:
        raw = os.environ.get(BUDGET_ENV)
        if raw:
            try:
                return cls(max_nodes=int(raw))
            except ValueError:
                raise MonoidError(f"{BUDGET_ENV} must be an integer node count, got {raw!r}") from None
        return cls()

    def total_bound(self, g: DirectedGraph, *elements: MonoidElement, factor: int = 2) -> int:
        if self.max_total is not None:
            return self.max_total
        return factor * max(x.total for x in elements) + 2 * g.n + 8

    def to_json(self) -> dict:
        return {"max_nodes": self.max_nodes, "max_total": self.max_total, "max_steps": self.max_steps}


@dataclass(frozen=True)
class Inconclusive:
    """No certificate within the budget. This is not a proof of the negative,
    except when ``exhaustive`` is set: then every forward rewrite was explored
    without hitting a limit."""

    budget: Budget
    nodes_expanded: int
    exhaustive: bool = False

    def to_json(self) -> dict:
        return {
            "result": "inconclusive",
            "budget": self.budget.to_json(),
            "nodes_expanded": self.nodes_expanded,
            "exhaustive": self.exhaustive,
        }


# -- congruence -----------------------------------------------------------------


@dataclass(frozen=True)
class Congruent:
    left: RewriteTrace
    right: RewriteTrace

    @property
    def common_end(self) -> MonoidElement:
        return self.left.end

    def to_json(self) -> dict:
        return {
            "result": "equal",
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "common_end": self.common_end.to_json(),
        }


def _successors(deltas: list[Vec | None], x: Vec) -> Iterable[tuple[int, Vec]]:
    for j, d in enumerate(deltas):
        if d is not None and x[j]:
            yield j, tuple(a + b for a, b in zip(x, d))


def _path(parents: dict[Vec, tuple[Vec, int] | None], node: Vec) -> list[int]:
    steps = []
    while parents[node] is not None:
        node, j = parents[node]
        steps.append(j)
    return steps[::-1]


def congruent_bounded(
    g: DirectedGraph,
    x: MonoidElement,
    y: MonoidElement,
    budget: Budget | None = None,
) -> Congruent | Inconclusive:
    """Bidirectional breadth-first search over forward rewrites of ``x`` and ``y``."""
    budget = budget or Budget.default()
    _check_graph(g, x)
    _check_graph(g, y)
    if x == y:
        return Congruent(run_trace(g, x, ()), run_trace(g, y, ()))
    deltas = _deltas(g)
    cap = budget.total_bound(g, x, y)
    parents: list[dict[Vec, tuple[Vec, int] | None]] = [{x.coeffs: None}, {y.coeffs: None}]
    depth: list[dict[Vec, int]] = [{x.coeffs: 0}, {y.coeffs: 0}]
    frontier = [deque([x.coeffs]), deque([y.coeffs])]
    expanded = 0
    pruned = False
    while (frontier[0] or frontier[1]) and expanded < budget.max_nodes:
        if not frontier[1] or (frontier[0] and len(frontier[0]) <= len(frontier[1])):
            side = 0
        else:
            side = 1
        node = frontier[side].popleft()
        expanded += 1
        d = depth[side][node]
        if budget.max_steps is not None and d >= budget.max_steps:
            pruned = True
            continue
        for j, child in _successors(deltas, node):
            if sum(child) > cap:
                pruned = True
                continue
            if child in parents[side]:
                continue
            parents[side][child] = (node, j)
            depth[side][child] = d + 1
            if child in parents[1 - side]:
                left = run_trace(g, x, _path(parents[0], child))
                right = run_trace(g, y, _path(parents[1], child))
                if left.end != right.end:  # pragma: no cover - replay guard
                    raise AssertionError("congruence traces failed to replay")
                return Congruent(left, right)
            frontier[side].append(child)
    exhaustive = not pruned and not frontier[0] and not frontier[1]
    return Inconclusive(budget, expanded, exhaustive)


# -- properly infinite elements and order-units ---------------------------------


@dataclass(frozen=True)
class ProperlyInfinite:
    """``trace`` rewrites ``u`` to ``2u + slack``, so ``[u] = 2[u] + [slack]``."""

    trace: RewriteTrace
    slack: MonoidElement

    @property
    def element(self) -> MonoidElement:
        return self.trace.start

    def to_json(self) -> dict:
        return {"result": "properly_infinite", "trace": self.trace.to_json(), "slack": self.slack.to_json()}


def properly_infinite_bounded(
    g: DirectedGraph, u: MonoidElement, budget: Budget | None = None
) -> ProperlyInfinite | Inconclusive:
    """Search for a forward rewrite of ``u`` dominating ``2u`` coefficientwise."""
    budget = budget or Budget.default()
    _check_graph(g, u)
    if u.is_zero():
        raise MonoidError("the zero element is excluded")
    deltas = _deltas(g)
    cap = budget.total_bound(g, u, factor=4)
    target = tuple(2 * c for c in u.coeffs)
    parents: dict[Vec, tuple[Vec, int] | None] = {u.coeffs: None}
    depth = {u.coeffs: 0}
    queue = deque([u.coeffs])
    expanded = 0
    pruned = False
    while queue and expanded < budget.max_nodes:
        node = queue.popleft()
        expanded += 1
        if budget.max_steps is not None and depth[node] >= budget.max_steps:
            pruned = True
            continue
        for j, child in _successors(deltas, node):
            if sum(child) > cap:
                pruned = True
                continue
            if child in parents:
                continue
            parents[child] = (node, j)
            depth[child] = depth[node] + 1
            if all(a >= b for a, b in zip(child, target)):
                trace = run_trace(g, u, _path(parents, child))
                return ProperlyInfinite(trace, trace.end - 2 * u)
            queue.append(child)
    return Inconclusive(budget, expanded, not pruned and not queue)


def is_order_unit(g: DirectedGraph, d: MonoidElement) -> bool:
    """Whether every vertex lies below some multiple of ``d``.

    A vertex qualifies when it can be rewritten entirely into the tree of the
    support of ``d``; that set is computed as a least fixed point.
    """
    _check_graph(g, d)
    support = [v for v, c in zip(g.vertices, d.coeffs) if c]
    if not support:
        return False
    good = tree(g, support)
    changed = True
    while changed:
        changed = False
        for v in g.vertices:
            if v in good or g.is_sink(v):
                continue
            if all(e.range in good for e in g.out_edges(v)):
                good.add(v)
                changed = True
    return len(good) == g.n


@dataclass(frozen=True)
class FailsUGN:
    """``multiple * d`` is properly infinite, so the order-unit ``d`` lacks UGN."""

    multiple: int
    certificate: ProperlyInfinite

    def to_json(self) -> dict:
        return {"result": "fails_ugn", "multiple": self.multiple, "certificate": self.certificate.to_json()}


def order_unit_ugn_bounded(
    g: DirectedGraph,
    d: MonoidElement,
    budget: Budget | None = None,
    max_multiple: int = 4,
) -> FailsUGN | Inconclusive:
    budget = budget or Budget.default()
    if not is_order_unit(g, d):
        raise MonoidError(f"{d} is not an order-unit")
    expanded = 0
    exhaustive = True
    for k in range(1, max_multiple + 1):
        res = properly_infinite_bounded(g, k * d, budget)
        if isinstance(res, ProperlyInfinite):
            return FailsUGN(k, res)
        expanded += res.nodes_expanded
        exhaustive = exhaustive and res.exhaustive
    return Inconclusive(budget, expanded, exhaustive)


# -- enumeration of classes ------------------------------------------------------


@dataclass(frozen=True)
class Overflow:
    elements: int
    limit: int

    def to_json(self) -> dict:
        return {"result": "overflow", "elements": self.elements, "limit": self.limit}


@dataclass(frozen=True)
class ClassEnumeration:
    """Classes of elements with total coefficient at most ``bound``.

    Two elements are merged when a forward rewrite inside the bound links
    them. ``leaked`` records whether some rewrite left the bound, in which case
    congruences realised only above the bound are not visible.
    """

    bound: int
    classes: tuple[tuple[MonoidElement, ...], ...]
    leaked: bool = field(default=False)

    @property
    def representatives(self) -> list[MonoidElement]:
        return [c[0] for c in self.classes]

    def class_of(self, x: MonoidElement) -> int:
        for i, members in enumerate(self.classes):
            if x in members:
                return i
        raise KeyError(str(x))

    def to_json(self) -> dict:
        return {
            "result": "classes",
            "bound": self.bound,
            "count": len(self.classes),
            "leaked": self.leaked,
            "classes": [
                {"representative": c[0].to_json(), "size": len(c)} for c in self.classes
            ],
        }


def _elements_up_to(n: int, bound: int) -> list[Vec]:
    out: list[Vec] = []
    for total in range(bound + 1):
        for combo in combinations_with_replacement(range(n), total):
            v = [0] * n
            for i in combo:
                v[i] += 1
            out.append(tuple(v))
    return out


def _count_up_to(n: int, bound: int) -> int:
    return comb(bound + n, n)


def enumerate_classes(
    g: DirectedGraph, coefficient_bound: int, max_elements: int = 200_000
) -> ClassEnumeration | Overflow:
    count = _count_up_to(g.n, coefficient_bound)
    if count > max_elements:
        return Overflow(count, max_elements)
    elems = _elements_up_to(g.n, coefficient_bound)
    pos = {v: i for i, v in enumerate(elems)}
    parent = list(range(len(elems)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    deltas = _deltas(g)
    leaked = False
    for i, x in enumerate(elems):
        for _, child in _successors(deltas, x):
            k = pos.get(child)
            if k is None:
                leaked = True
                continue
            a, b = find(i), find(k)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[Vec]] = {}
    for i, x in enumerate(elems):
        groups.setdefault(find(i), []).append(x)
    classes = []
    for members in groups.values():
        members.sort(key=lambda v: (sum(v), v))
        classes.append(tuple(MonoidElement(g.vertices, v) for v in members))
    classes.sort(key=lambda c: (c[0].total, c[0].coeffs))
    return ClassEnumeration(coefficient_bound, tuple(classes), leaked)
