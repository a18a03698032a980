"""Decision procedures for UGN and finiteness properties of Leavitt and Cohn path algebras."""

from __future__ import annotations

__version__ = "0.1.0"

from .cohn import CohnExpansion, cohn_expand, decide_ugn_cohn
from .elimination import E_TRIV, EliminationSequence, run_elimination, source_free_core
from .graph import Cycle, DirectedGraph, Edge, GraphFormatError, load_graph, make_graph, parse_graph
from .monoid import Budget, MonoidElement, congruent_bounded, enumerate_classes
from .structure import StructureReport, classify_cancellation, classify_cancellation_cohn
from .ugn import (
    UgnVerdict,
    UgnWitness,
    decide_ugn_leavitt,
    decide_ugn_source_free,
    lemma43_vector,
    synthesize_witness,
    two_cycle_vertex,
)

__all__ = [
    "Budget", "CohnExpansion", "Cycle", "DirectedGraph", "E_TRIV", "Edge", "EliminationSequence",
    "GraphFormatError", "MonoidElement", "StructureReport", "UgnVerdict", "UgnWitness",
    "classify_cancellation", "classify_cancellation_cohn", "cohn_expand", "congruent_bounded",
    "decide_ugn_cohn", "decide_ugn_leavitt", "decide_ugn_source_free", "enumerate_classes",
    "lemma43_vector", "load_graph", "make_graph", "parse_graph", "run_elimination",
    "source_free_core", "synthesize_witness", "two_cycle_vertex",
]
