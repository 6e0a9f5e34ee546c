"""Brute-force reference answers for tiny graphs.

Deliberately naive and sharing nothing with the solver beyond the DiGraph
container: its own acyclicity test, its own cycle enumeration, plain subset
enumeration by increasing size.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .digraph import DiGraph


class OracleLimitError(ValueError):
    pass


@dataclass(frozen=True)
class OracleLimit:
    max_n: int = 12
    max_subsets: int = 1 << 16


DEFAULT_LIMIT = OracleLimit()


def _adjacency(g: DiGraph) -> dict[int, list[int]]:
    return {v: sorted(g.succ[v]) for v in g.succ}


def acyclic_without(adj: dict[int, list[int]], removed: set[int]) -> bool:
    """Kahn's algorithm on the graph minus ``removed``."""
    indeg = {v: 0 for v in adj if v not in removed}
    for v in indeg:
        for w in adj[v]:
            if w in indeg:
                indeg[w] += 1
    ready = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for w in adj[v]:
            if w in indeg:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
    return seen == len(indeg)


def _check(g: DiGraph, limit: OracleLimit) -> None:
    if len(g) > limit.max_n:
        raise OracleLimitError(f"{len(g)} vertices exceeds oracle limit {limit.max_n}")


def brute_force_dfvs(g: DiGraph, limit: OracleLimit = DEFAULT_LIMIT) -> tuple[int, set[int]]:
    _check(g, limit)
    adj = _adjacency(g)
    vs = sorted(adj)
    examined = 0
    for k in range(len(vs) + 1):
        for subset in combinations(vs, k):
            examined += 1
            if examined > limit.max_subsets:
                raise OracleLimitError("subset budget exhausted")
            if acyclic_without(adj, set(subset)):
                return k, set(subset)
    raise AssertionError("unreachable: removing every vertex leaves a DAG")


def is_dfvs(g: DiGraph, candidate) -> bool:
    return acyclic_without(_adjacency(g), set(candidate))


def all_simple_cycles(g: DiGraph, limit: OracleLimit = DEFAULT_LIMIT) -> list[tuple[int, ...]]:
    """Every elementary cycle, each reported once starting from its smallest vertex."""
    _check(g, limit)
    adj = _adjacency(g)
    out = []

    def extend(start, path, on_path):
        for w in adj[path[-1]]:
            if w == start:
                out.append(tuple(path))
            elif w > start and w not in on_path:
                on_path.add(w)
                path.append(w)
                extend(start, path, on_path)
                path.pop()
                on_path.discard(w)

    for s in sorted(adj):
        extend(s, [s], {s})
    return out


def brute_force_cycles(g: DiGraph, limit: OracleLimit = DEFAULT_LIMIT) -> set[frozenset[int]]:
    """Vertex sets of all uncovered cycles."""
    sets = {frozenset(c) for c in all_simple_cycles(g, limit)}
    return {s for s in sets if not any(t < s for t in sets)}
