"""Command line: compile, reduce, verify, fuzz, dot, knots.

Exit status is 0 when everything ran and every check passed, 1 when a
check failed, 2 on bad usage or unparsable input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .combinators import ReadbackError, compile_term, node_count, readback
from .engine import DEFAULT_PRIORITY, DISCIPLINES, TIE_BREAKS, Strategy, reduce
from .graph import validate
from .knots import KnotError, diagram_dot, emit_diagram, encode
from .moves import MoveKind
from .terms import TermSyntaxError, parse_term, show
from .verify import SUITES, fuzz, run_suite
from .zgformat import ZgSyntaxError, emit_dot, emit_zg, parse_zg


class UsageError(Exception):
    pass


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load(source: str):
    """(graph, term or None) from a .zg path or a term string."""
    if source.endswith(".zg"):
        path = Path(source)
        if not path.is_file():
            raise UsageError(f"no such file: {source}")
        try:
            g = parse_zg(path.read_text())
        except ZgSyntaxError as exc:
            raise UsageError(f"{source}: {exc}") from None
        problems = validate(g)
        if problems:
            raise UsageError(f"{source}: invalid graph: {problems[0]}")
        return g, None
    try:
        t = parse_term(source)
    except TermSyntaxError as exc:
        raise UsageError(f"term: {exc}") from None
    return compile_term(t), t


def _strategy(args) -> Strategy:
    discipline = args.discipline
    if args.priority is not None:
        if discipline == "combinator":
            raise UsageError("--priority only applies to the free discipline")
        discipline = "free"
        try:
            priority = tuple(MoveKind.parse(x) for x in args.priority.split(",") if x.strip())
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        priority = DEFAULT_PRIORITY
    try:
        return Strategy(
            priority,
            args.max_steps,
            args.seed,
            args.tie_break,
            discipline or "combinator",
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_compile(args) -> int:
    try:
        t = parse_term(args.term)
    except TermSyntaxError as exc:
        raise UsageError(f"term: {exc}") from None
    g = compile_term(t)
    _write(emit_zg(g), args.output)
    print(f"{len(g)} nodes (formula {node_count(t)})", file=sys.stderr)
    return 0


def cmd_reduce(args) -> int:
    g, term = _load(args.input)
    trace = reduce(g, _strategy(args))
    _write(emit_zg(trace.final), args.output)
    if args.trace:
        Path(args.trace).write_text("\n".join(trace.to_log()) + "\n")
    print(f"{trace.status} after {len(trace)} steps, {trace.final.loop_count} loops", file=sys.stderr)
    if term is not None and trace.status == "normal-form":
        try:
            print(f"readback: {show(readback(trace.final))}", file=sys.stderr)
        except ReadbackError as exc:
            print(f"readback: not a combinator graph ({exc})", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    ok = True
    for name in names:
        res = run_suite(name, args.seed)
        lines = res.lines()
        if not args.verbose:
            lines = [ln for ln in lines if not ln.startswith("  PASS")]
        print("\n".join(lines))
        ok &= res.passed
    return 0 if ok else 1


def cmd_fuzz(args) -> int:
    res = fuzz(args.seed, args.count, args.max_size, args.fuel)
    lines = res.lines()
    if not args.verbose:
        lines = [ln for ln in lines if not ln.startswith("  PASS")]
    print("\n".join(lines))
    return 0 if res.passed else 1


def cmd_dot(args) -> int:
    g, _ = _load(args.input)
    _write(emit_dot(g), args.output)
    return 0


def cmd_knots(args) -> int:
    g, _ = _load(args.input)
    try:
        d = encode(g, strict=not args.lenient)
    except KnotError as exc:
        raise UsageError(f"{exc} (use --lenient to draw it with boundary points)") from None
    _write(diagram_dot(d) if args.format == "dot" else emit_diagram(d), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zipperlogic", description="Build and rewrite zipper logic graphs."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile an SKI term to a .zg graph")
    p.add_argument("term")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("reduce", help="reduce a term or .zg graph")
    p.add_argument("input", help="term string or path ending in .zg")
    p.add_argument("-o", "--output")
    p.add_argument("--trace", help="write the step log here")
    p.add_argument("--priority", help="comma-separated move names (implies --discipline free)")
    p.add_argument("--discipline", choices=DISCIPLINES)
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--tie-break", choices=TIE_BREAKS, default="first-match")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="run an acceptance suite")
    p.add_argument("suite", choices=[*SUITES, "all"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true", help="list passing cases too")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fuzz", help="compare graph reduction with the term oracle")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--max-size", type=int, default=12)
    p.add_argument("--fuel", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("dot", help="render a graph as Graphviz DOT")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("knots", help="encode a graph as a tangle diagram")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("text", "dot"), default="text")
    p.add_argument("--lenient", action="store_true", help="draw FO/FI/T ports as boundary points")
    p.set_defaults(func=cmd_knots)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"zipperlogic {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"zipperlogic {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
