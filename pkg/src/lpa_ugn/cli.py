"""Command-line front end: JSON reports on stdout, diagnostics on stderr.

Exit codes: 0 success, 1 parse error, 2 precondition or contract violation,
3 inconclusive bounded search.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from pathlib import Path
from typing import Sequence

from . import __version__
from .cohn import CohnError, cohn_expand, decide_ugn_cohn
from .elimination import EliminationError, run_elimination
from .graph import (
    DirectedGraph,
    GraphFormatError,
    classify_vertices,
    enumerate_cycles,
    is_no_exit,
    parse_graph,
    source_cycles,
)
from .monoid import (
    Budget,
    Congruent,
    MonoidError,
    ProperlyInfinite,
    FailsUGN,
    congruent_bounded,
    element_from_json,
    enumerate_classes,
    order_unit_ugn_bounded,
    properly_infinite_bounded,
)
from .structure import classify_cancellation, classify_cancellation_cohn
from .ugn import PreconditionError, UgnError, decide_ugn_leavitt, two_cycle_vertex
from .verify import VerificationError, verify_document

EXIT_OK, EXIT_PARSE, EXIT_CONTRACT, EXIT_INCONCLUSIVE = 0, 1, 2, 3
MAX_LISTED_CYCLES = 1000


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> bytes:
    try:
        return sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc.strerror}") from None


def _load(path: str) -> tuple[DirectedGraph, str]:
    raw = _read(path)
    try:
        g = parse_graph(raw)
    except GraphFormatError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from None
    return g, hashlib.sha256(raw).hexdigest()


def _json_arg(text: str, what: str) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_PARSE, f"{what}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _budget(args: argparse.Namespace) -> Budget:
    if getattr(args, "budget", None) is not None:
        return Budget(max_nodes=args.budget)
    try:
        return Budget.default()
    except MonoidError as exc:
        raise CliError(EXIT_CONTRACT, str(exc)) from None


def _envelope(args: argparse.Namespace, digest: str | None, result: dict) -> dict:
    out = {"tool": "lpa-ugn", "version": __version__, "subcommand": args.command}
    if digest is not None:
        out["input"] = {"path": args.graph, "sha256": digest}
    out["result"] = result
    return out


# -- subcommands ------------------------------------------------------------------


def analyze_graph(g: DirectedGraph) -> dict:
    info = classify_vertices(g)
    cycles = []
    for i, c in enumerate(enumerate_cycles(g)):
        if i == MAX_LISTED_CYCLES:
            break
        cycles.append(c.to_json())
    seq = run_elimination(g)
    leavitt = decide_ugn_leavitt(g)
    report = {
        "vertices": {
            v: {
                "sink": x.is_sink,
                "source": x.is_source,
                "isolated": x.is_isolated,
                "regular": x.is_regular,
                "out_degree": x.out_degree,
                "in_degree": x.in_degree,
            }
            for v, x in info.items()
        },
        "cycles": cycles,
        "cycles_truncated": len(cycles) == MAX_LISTED_CYCLES,
        "source_cycles": [c.to_json() for c in source_cycles(g)],
        "no_exit": is_no_exit(g),
        "source_free_core": {
            "vertices": list(seq.terminal.vertices),
            "edge_count": len(seq.terminal.edges),
            "eliminated": [s.eliminated for s in seq.steps],
            "isolated_encountered": seq.isolated_encountered,
        },
        "ugn_leavitt": leavitt.ugn,
        "ugn_cohn": decide_ugn_cohn(g).ugn,
        "leavitt": leavitt.to_json(),
        "structure": classify_cancellation(g).to_json(),
        "structure_cohn": classify_cancellation_cohn(g).to_json(),
    }
    if not leavitt.ugn:
        report["two_cycle"] = two_cycle_vertex(seq.terminal).to_json()
    return report


def cmd_analyze(args: argparse.Namespace) -> tuple[dict, int]:
    if args.dir:
        files = sorted(Path(args.dir).glob("*.json"))
        reports, code = [], EXIT_OK
        for f in files:
            try:
                g, digest = _load(str(f))
            except CliError as exc:
                print(str(exc), file=sys.stderr)
                reports.append({"path": str(f), "error": str(exc)})
                code = EXIT_PARSE
                continue
            reports.append({"path": str(f), "sha256": digest, "report": analyze_graph(g)})
        return {"tool": "lpa-ugn", "version": __version__, "subcommand": "analyze", "result": reports}, code
    if not args.graph:
        raise CliError(EXIT_CONTRACT, "analyze needs a graph file or --dir")
    g, digest = _load(args.graph)
    return _envelope(args, digest, analyze_graph(g)), EXIT_OK


def cmd_ugn(args: argparse.Namespace) -> tuple[dict, int]:
    g, digest = _load(args.graph)
    explicit = args.m is not None or args.n is not None
    m = 2 if args.m is None else args.m
    n = 1 if args.n is None else args.n
    if not m > n >= 1:
        raise CliError(EXIT_CONTRACT, f"need M > N >= 1, got M={m} N={n}")
    if args.algebra == "leavitt":
        verdict = decide_ugn_leavitt(g, m=m, n=n)
        result = verdict.to_json()
    else:
        verdict = decide_ugn_cohn(g)
        result = verdict.to_json()
        if not verdict.ugn:
            via = decide_ugn_leavitt(cohn_expand(g).expanded, m=m, n=n)
            result["witness"] = via.witness.to_json()
            result["lift"] = via.lift
            result["host"] = "expansion"
    if explicit and verdict.ugn:
        raise CliError(EXIT_CONTRACT, "graph has UGN; no witness exists")
    return _envelope(args, digest, result), EXIT_OK


def cmd_monoid(args: argparse.Namespace) -> tuple[dict, int]:
    g, digest = _load(args.graph)
    budget = _budget(args)
    try:
        if args.equal:
            x = element_from_json(g, _json_arg(args.equal[0], "X"))
            y = element_from_json(g, _json_arg(args.equal[1], "Y"))
            res = congruent_bounded(g, x, y, budget)
            code = EXIT_OK if isinstance(res, Congruent) else EXIT_INCONCLUSIVE
        elif args.enumerate:
            res = enumerate_classes(g, args.bound)
            code = EXIT_OK if hasattr(res, "classes") else EXIT_INCONCLUSIVE
        elif args.properly_infinite:
            u = element_from_json(g, _json_arg(args.properly_infinite, "U"))
            res = properly_infinite_bounded(g, u, budget)
            code = EXIT_OK if isinstance(res, ProperlyInfinite) else EXIT_INCONCLUSIVE
        else:
            d = element_from_json(g, _json_arg(args.order_unit, "D"))
            res = order_unit_ugn_bounded(g, d, budget)
            code = EXIT_OK if isinstance(res, FailsUGN) else EXIT_INCONCLUSIVE
    except MonoidError as exc:
        raise CliError(EXIT_CONTRACT, str(exc)) from None
    return _envelope(args, digest, res.to_json()), code


def cmd_transform(args: argparse.Namespace) -> tuple[dict, int]:
    g, _ = _load(args.graph)
    return cohn_expand(g).expanded.to_json(), EXIT_OK


def cmd_structure(args: argparse.Namespace) -> tuple[dict, int]:
    g, digest = _load(args.graph)
    rep = classify_cancellation(g) if args.algebra == "leavitt" else classify_cancellation_cohn(g)
    return _envelope(args, digest, rep.to_json()), EXIT_OK


def cmd_eliminate(args: argparse.Namespace) -> tuple[dict, int]:
    g, digest = _load(args.graph)
    order = [v for v in args.order.split(",") if v] if args.order else None
    rng = random.Random(args.seed) if args.seed is not None else None
    seq = run_elimination(g, order, rng)
    return _envelope(args, digest, seq.to_json()), EXIT_OK


def cmd_verify(args: argparse.Namespace) -> tuple[dict, int]:
    g, digest = _load(args.graph)
    doc = _json_arg(_read(args.witness).decode("utf-8", "replace"), args.witness)
    try:
        kinds = verify_document(g, doc)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return _envelope(args, digest, {"verified": False, "error": str(exc)}), EXIT_CONTRACT
    return _envelope(args, digest, {"verified": True, "checked": kinds}), EXIT_OK


def cmd_harness(args: argparse.Namespace) -> tuple[dict, int]:
    from .oracles import GraphFamilySpec, enumerate_graphs, run_harness

    spec = GraphFamilySpec(args.max_vertices, args.max_edges, args.max_multiplicity, limit=args.limit)
    out = open(args.out, "w") if args.out else sys.stderr
    try:
        summary = run_harness(enumerate_graphs(spec), out, _budget(args))
    finally:
        if args.out:
            out.close()
    return {"tool": "lpa-ugn", "version": __version__, "subcommand": "harness", "result": summary}, (
        EXIT_OK if summary["disagreements"] == 0 else EXIT_CONTRACT
    )


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lpa", description="UGN and finiteness invariants of graph algebras.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="full report for a graph")
    a.add_argument("graph", nargs="?")
    a.add_argument("--dir", help="analyze every *.json file in a directory")
    a.set_defaults(func=cmd_analyze)

    u = sub.add_parser("ugn", help="UGN verdict with witness")
    u.add_argument("graph")
    u.add_argument("--algebra", choices=("leavitt", "cohn"), default="leavitt")
    u.add_argument("--m", type=int)
    u.add_argument("--n", type=int)
    u.set_defaults(func=cmd_ugn)

    m = sub.add_parser("monoid", help="graph monoid computations")
    m.add_argument("graph")
    mode = m.add_mutually_exclusive_group(required=True)
    mode.add_argument("--equal", nargs=2, metavar=("X", "Y"))
    mode.add_argument("--enumerate", action="store_true")
    mode.add_argument("--properly-infinite", metavar="U")
    mode.add_argument("--order-unit", metavar="D", help="search for a UGN failure of the order-unit D")
    m.add_argument("--bound", type=int, default=5)
    m.add_argument("--budget", type=int, help="maximum expanded nodes")
    m.set_defaults(func=cmd_monoid)

    t = sub.add_parser("transform", help="emit the Cohn expansion graph")
    t.add_argument("graph")
    t.set_defaults(func=cmd_transform)

    s = sub.add_parser("structure", help="no-exit classification and matrix decomposition")
    s.add_argument("graph")
    s.add_argument("--algebra", choices=("leavitt", "cohn"), default="leavitt")
    s.set_defaults(func=cmd_structure)

    e = sub.add_parser("eliminate", help="source elimination sequence")
    e.add_argument("graph")
    e.add_argument("--order", help="comma-separated vertices to eliminate first")
    e.add_argument("--seed", type=int, help="pick sources at random with this seed")
    e.set_defaults(func=cmd_eliminate)

    v = sub.add_parser("verify", help="replay a witness against its graph")
    v.add_argument("graph")
    v.add_argument("witness", help="witness or report JSON file ('-' for stdin)")
    v.set_defaults(func=cmd_verify)

    h = sub.add_parser("harness", help="compare decisions with brute-force oracles on a graph family")
    h.add_argument("--max-vertices", type=int, default=3)
    h.add_argument("--max-edges", type=int, default=5)
    h.add_argument("--max-multiplicity", type=int, default=2)
    h.add_argument("--limit", type=int, default=100_000)
    h.add_argument("--budget", type=int)
    h.add_argument("--out", help="JSONL output file (default stderr)")
    h.set_defaults(func=cmd_harness, graph=None)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        report, code = args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (PreconditionError, EliminationError, CohnError, UgnError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    if args.timing:
        report["seconds"] = round(time.perf_counter() - t0, 6)
    json.dump(report, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
