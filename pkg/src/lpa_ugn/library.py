"""Named graph families and the bundled example files."""

from __future__ import annotations

from importlib import resources

from .graph import DirectedGraph, make_graph, parse_graph


def line(n: int) -> DirectedGraph:
    """``A_n``: v1 -> v2 -> ... -> vn."""
    vs = [f"v{i}" for i in range(1, n + 1)]
    return make_graph(vs, [(f"e{i}", vs[i - 1], vs[i]) for i in range(1, n)])


def cycle(n: int) -> DirectedGraph:
    """``C_n``: a single oriented cycle through v1, ..., vn."""
    vs = [f"v{i}" for i in range(1, n + 1)]
    return make_graph(vs, [(f"e{i}", vs[i - 1], vs[i % n]) for i in range(1, n + 1)])


def rose(n: int) -> DirectedGraph:
    """``R_n``: one vertex with ``n`` loops."""
    return make_graph(["v"], [(f"e{i}", "v", "v") for i in range(1, n + 1)])


def bundled_names() -> list[str]:
    root = resources.files("lpa_ugn") / "graphs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled(name: str) -> DirectedGraph:
    return parse_graph((resources.files("lpa_ugn") / "graphs" / f"{name}.json").read_bytes())
