"""Command-line front end.

Graph files use the PACE convention: a header ``n m 0`` followed by one
line per vertex listing its out-neighbours (1-indexed); lines starting with
``%`` are comments.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Iterable
from typing import TextIO

from .digraph import DiGraph
from .driver import SolveConfig, SolverError, solve_dfvs, validate
from .oracle import OracleLimitError, brute_force_dfvs
from .reductions import Rule, reduce

log = logging.getLogger("dfvs")


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _content_lines(stream: Iterable[str]):
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\r\n")
        if line.lstrip().startswith("%"):
            continue
        yield lineno, line


def _ints(lineno: int, line: str) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise ParseError(lineno, f"non-numeric token in {line!r}") from None


def parse_input(stream: Iterable[str]) -> DiGraph:
    lines = _content_lines(stream)
    header = None
    for lineno, line in lines:
        if line.strip():
            header = (lineno, _ints(lineno, line))
            break
    if header is None:
        raise ParseError(0, "missing header")
    hline, fields = header
    if len(fields) != 3 or fields[2] != 0:
        raise ParseError(hline, "header must be 'n m 0'")
    n, m, _ = fields
    g = DiGraph(range(1, n + 1))
    u = 0
    last = hline
    for lineno, line in lines:
        last = lineno
        u += 1
        if u > n:
            if line.strip():
                raise ParseError(lineno, f"more than {n} adjacency lines")
            continue
        for w in _ints(lineno, line):
            if not 1 <= w <= n:
                raise ParseError(lineno, f"vertex {w} out of range 1..{n}")
            if w == u:
                log.info("self-loop on vertex %d", u)
            g.add_arc(u, w)
    if g.arc_count != m:
        raise ParseError(last, f"header declares {m} arcs, found {g.arc_count}")
    return g


def write_graph(stream: TextIO, g: DiGraph) -> dict[int, int]:
    """Write ``g`` with vertices renumbered 1..n; returns new id -> old id."""
    order = sorted(g.succ)
    ids = {v: i for i, v in enumerate(order, 1)}
    stream.write(f"{len(order)} {g.arc_count} 0\n")
    for v in order:
        stream.write(" ".join(str(ids[w]) for w in sorted(g.succ[v], key=ids.get)) + "\n")
    return {i: v for v, i in ids.items()}


def write_solution(stream: TextIO, solution: Iterable[int]) -> None:
    for v in sorted(solution):
        stream.write(f"{v}\n")


def read_solution(stream: Iterable[str]) -> list[int]:
    out = []
    for lineno, line in _content_lines(stream):
        out.extend(_ints(lineno, line))
    return out


def _rules_from_args(args) -> Rule:
    if args.no_reductions:
        if args.rules is not None:
            raise SystemExit("--rules and --no-reductions are mutually exclusive")
        return Rule.NONE
    if args.rules is None:
        return Rule.DEFAULT
    try:
        value = int(args.rules, 0)
    except ValueError:
        value = 0
        for name in args.rules.split(","):
            key = name.strip().upper().replace("-", "")
            if key not in Rule.__members__:
                raise SystemExit(f"unknown rule {name!r}") from None
            value |= Rule[key]
    return Rule(value)


def _emit_stats(args, record: dict) -> None:
    if args.stats is None:
        return
    line = json.dumps(record, sort_keys=True)
    if args.stats in ("-", "json"):
        print(line, file=sys.stderr)
    else:
        with open(args.stats, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")


def _load(path: str) -> DiGraph:
    if path == "-":
        return parse_input(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return parse_input(fh)


def cmd_solve(args) -> int:
    g = _load(args.graph)
    config = SolveConfig(
        max_cycle_len=args.max_cycle_len,
        max_cycles=args.max_cycles,
        mode=args.mode,
        rules=_rules_from_args(args),
        seed=args.seed,
    )
    report = solve_dfvs(g, config)
    write_solution(sys.stdout, report.solution)
    _emit_stats(args, dict(report.as_dict(), command="solve", mode=args.mode, n=len(g), m=g.arc_count))
    return 0


def cmd_reduce(args) -> int:
    g = _load(args.graph)
    kernel, trace = reduce(g, _rules_from_args(args))
    write_graph(sys.stdout, kernel)
    _emit_stats(
        args,
        {
            "command": "reduce",
            "n": len(g),
            "m": g.arc_count,
            "kernel_vertices": len(kernel),
            "kernel_arcs": kernel.arc_count,
            "forced": sorted(trace.forced),
            "offset": trace.offset,
            "reductions": trace.stats_dict(),
        },
    )
    return 0


def cmd_verify(args) -> int:
    g = _load(args.graph)
    with open(args.solution, encoding="utf-8") as fh:
        sol = read_solution(fh)
    unknown = [v for v in sol if v not in g]
    if unknown:
        print(f"unknown vertices: {unknown}", file=sys.stderr)
        return 1
    if validate(g, sol):
        print(f"ok {len(set(sol))}")
        return 0
    print("not a feedback vertex set", file=sys.stderr)
    return 1


def cmd_oracle(args) -> int:
    g = _load(args.graph)
    k, witness = brute_force_dfvs(g)
    write_solution(sys.stdout, witness)
    _emit_stats(args, {"command": "oracle", "optimum": k})
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dfvs", description="Exact directed feedback vertex set solver")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_cmd(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("graph", help="graph file ('-' for stdin)")
        sp.set_defaults(func=func)
        return sp

    def rule_flags(sp):
        sp.add_argument("--no-reductions", action="store_true", help="only strip self-loops")
        sp.add_argument("--rules", help="bitmask (e.g. 0x7fff) or comma-separated rule names")
        sp.add_argument("--stats", nargs="?", const="-", help="append JSON-lines stats ('-' or 'json': stderr)")

    sp = graph_cmd("solve", cmd_solve, "print a minimum DFVS, one vertex per line")
    sp.add_argument("--mode", choices=("propagate", "cegar"), default="propagate")
    sp.add_argument("--max-cycle-len", type=int, default=4)
    sp.add_argument("--max-cycles", type=int, default=25000)
    sp.add_argument("--seed", type=int, default=0)
    rule_flags(sp)

    sp = graph_cmd("reduce", cmd_reduce, "print the kernel in input format")
    rule_flags(sp)

    sp = graph_cmd("verify", cmd_verify, "check a solution file")
    sp.add_argument("solution")

    sp = graph_cmd("oracle", cmd_oracle, "brute-force optimum (tiny graphs only)")
    sp.add_argument("--stats", nargs="?", const="-")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ParseError, OracleLimitError, SolverError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
