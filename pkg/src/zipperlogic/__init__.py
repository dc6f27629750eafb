"""Zipper logic: half-zipper graph rewriting that runs SKI combinators, with
a knot-diagram reading of the CLICK and ZIP moves."""

from .combinators import ReadbackError, compile_term, node_count, readback
from .engine import (
    Strategy,
    Trace,
    equal_mod_loops,
    kill,
    multiply,
    reduce,
    search_path,
)
from .graph import Arrow, Free, NodeKind, PortRef, ZGraph, components, strip_loops, validate
from .iso import find_isomorphism, isomorphic
from .knots import TangleDiagram, apply_r2, diagram_iso, encode, realize_click, unpair
from .moves import Match, MoveKind, apply_move, enumerate_matches, reverse
from .terms import oracle_nf, parse_term, show
from .verify import run_suite
from .zgformat import emit_dot, emit_zg, parse_zg

__all__ = [
    "Arrow",
    "Free",
    "Match",
    "MoveKind",
    "NodeKind",
    "PortRef",
    "ReadbackError",
    "Strategy",
    "TangleDiagram",
    "Trace",
    "ZGraph",
    "apply_move",
    "apply_r2",
    "compile_term",
    "components",
    "diagram_iso",
    "emit_dot",
    "emit_zg",
    "encode",
    "enumerate_matches",
    "equal_mod_loops",
    "find_isomorphism",
    "isomorphic",
    "kill",
    "multiply",
    "node_count",
    "oracle_nf",
    "parse_term",
    "parse_zg",
    "readback",
    "realize_click",
    "reduce",
    "reverse",
    "run_suite",
    "search_path",
    "show",
    "strip_loops",
    "unpair",
    "validate",
]
